#include "photodyn/model/presets.hpp"

#include <algorithm>

#include "photodyn/error.hpp"
#include "photodyn/model/emission.hpp"

namespace photodyn::model {

const std::array<EmitterRecord, 5>& emitter_table() {
  static const std::array<EmitterRecord, 5> table{{
      {1, 740.7, 1.6, 14.3, 1.2, 263.0, 0.76, 0.28},
      {2, 737.6, 1.2, 43.0, 3.7, 512.0, 0.84, 0.18},
      {3, 739.9, 0.7, 40.9, 3.5, 395.0, 0.79, 0.24},
      {4, 738.2, 2.2, 306.7, 26.1, 4828.0, 0.75, 0.29},
      {5, 740.9, 1.0, 73.4, 6.2, 2395.0, 0.88, 0.13},
  }};
  return table;
}

const EmitterRecord& emitter_record(int id) {
  const auto& t = emitter_table();
  auto it = std::find_if(t.begin(), t.end(), [id](const EmitterRecord& r) { return r.id == id; });
  if (it == t.end()) throw ModelError("no such emitter: " + std::to_string(id));
  return *it;
}

const std::array<ZplComponent, 3>& emitter2_zpl_components() {
  static const std::array<ZplComponent, 3> lines{{{737.6, 1.2}, {738.7, 2.0}, {740.8, 4.9}}};
  return lines;
}

const std::array<ZplComponent, 4>& emitter5_fine_structure() {
  static const std::array<ZplComponent, 4> lines{{{738.91, 0.17}, {739.19, 0.17}, {740.11, 0.17}, {740.42, 0.17}}};
  return lines;
}

const std::array<SidebandRecord, 5>& sideband_table() {
  static const std::array<SidebandRecord, 5> table{{
      {1, {18.3, 33.7}},
      {2, {79.2}},
      {3, {22.6, 69.6, 84.1}},
      {4, {32.8, 43.9, 88.0}},
      {5, {36.9, 46.8, 88.4}},
  }};
  return table;
}

const std::array<VisibilityRecord, 5>& visibility_table() {
  static const std::array<VisibilityRecord, 5> table{{
      {1, 0.889, 0.876},
      {2, 0.830, 0.777},
      {3, 0.780, 0.910},
      {4, 0.849, std::nullopt},
      {5, 0.700, 0.843},
  }};
  return table;
}

namespace {

EmitterModel constant_model(double k21_mhz, double k23_mhz, double k31_mhz, double p_sat_uw) {
  EmitterModel m;
  m.k21 = Rate::mhz(k21_mhz);
  m.k23 = Rate::mhz(k23_mhz);
  m.deshelving = ConstantDeshelving{Rate::mhz(k31_mhz)};
  m.sigma_mhz_per_uw = sigma_from_saturation_power(m.k21, m.k23, Rate::mhz(k31_mhz), p_sat_uw);
  return m;
}

}  // namespace

EmitterModel emitter1_simple() { return constant_model(564.0, 1.4, 0.14, emitter_record(1).p_sat_uw); }

EmitterModel emitter3_simple() { return constant_model(469.0, 6.7, 5.0, emitter_record(3).p_sat_uw); }

EmitterModel emitter3_extended() {
  EmitterModel m;
  m.sigma_mhz_per_uw = 5.72;
  m.k21 = Rate::mhz(469.48);
  m.k23 = Rate::mhz(6.72);
  m.deshelving = SaturatingDeshelving{Rate::mhz(0.50), Rate::mhz(4.55), 98.1};
  return m;
}

std::optional<EmitterModel> preset_model(std::string_view name) {
  if (name == "emitter1-simple") return emitter1_simple();
  if (name == "emitter3-simple") return emitter3_simple();
  if (name == "emitter3-extended") return emitter3_extended();
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"emitter1-simple", "emitter3-simple", "emitter3-extended"}; }

}  // namespace photodyn::model
