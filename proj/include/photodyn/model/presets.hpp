#ifndef PHOTODYN_MODEL_PRESETS_HPP
#define PHOTODYN_MODEL_PRESETS_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "photodyn/model/types.hpp"

namespace photodyn::model {

// Measured characteristics of the five single SiV centres (room temperature).
struct EmitterRecord {
  int id;
  double zpl_peak_nm;
  double zpl_width_nm;
  double p_sat_uw;
  double i_sat_kw_cm2;
  double i_inf_kcps;
  double debye_waller;
  double huang_rhys;
};

struct ZplComponent {
  double center_nm;
  double fwhm_nm;
};

// Sideband features observed relative to the ZPL, in meV.
struct SidebandRecord {
  int id;
  std::vector<double> offsets_mev;
};

struct VisibilityRecord {
  int id;
  double v_exc;                 // fraction, excitation polarization scan
  std::optional<double> v_pl;   // fraction, analyzer scan
};

const std::array<EmitterRecord, 5>& emitter_table();
const EmitterRecord& emitter_record(int id);

// Emitter (2) ZPL is asymmetric and decomposes into three lines.
const std::array<ZplComponent, 3>& emitter2_zpl_components();

// Fine-structure components of emitter (5) at 30 K.
const std::array<ZplComponent, 4>& emitter5_fine_structure();

const std::array<SidebandRecord, 5>& sideband_table();
const std::array<VisibilityRecord, 5>& visibility_table();

// Rate models derived for emitters (1) and (3). The constant de-shelving
// presets take sigma from the tabulated saturation power.
EmitterModel emitter1_simple();
EmitterModel emitter3_simple();
EmitterModel emitter3_extended();

// Named lookup used by the command line: "emitter1-simple",
// "emitter3-simple", "emitter3-extended". Returns nullopt for unknown names.
std::optional<EmitterModel> preset_model(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace photodyn::model

#endif  // PHOTODYN_MODEL_PRESETS_HPP
