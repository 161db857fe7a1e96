#ifndef PHOTODYN_SPECTRAL_METRICS_HPP
#define PHOTODYN_SPECTRAL_METRICS_HPP

#include <vector>

#include "photodyn/fitting/line_fit.hpp"
#include "photodyn/spectral/spectrum.hpp"

namespace photodyn::spectral {

// nm * eV, fixed so that meV tables are reproducible.
inline constexpr double kEvNm = 1239.8419;

struct WavelengthWindow {
  double lo_nm;
  double hi_nm;
  bool contains(const WavelengthWindow& other) const { return other.lo_nm >= lo_nm && other.hi_nm <= hi_nm; }
};

struct DebyeWallerOptions {
  // Subtract a straight line through the first and last samples of the total
  // window before integrating.
  bool subtract_baseline = true;
};

// Centre +/- 3 FWHM.
WavelengthWindow default_zpl_window(const fit::LinePeak& zpl);
WavelengthWindow full_window(const Spectrum& spectrum);

// Trapezoidal integral of the intensity on [lo, hi], interpolating linearly at
// the window edges.
double integrate(const Spectrum& spectrum, const WavelengthWindow& window);

double debye_waller(const Spectrum& spectrum, const WavelengthWindow& zpl_window,
                    const WavelengthWindow& total_window, const DebyeWallerOptions& options = {});
double debye_waller(const Spectrum& spectrum, const WavelengthWindow& zpl_window,
                    const DebyeWallerOptions& options = {});

double huang_rhys(double dw);

// Energy offset of each sideband from the ZPL in meV. Anti-Stokes features
// (shorter wavelength than the ZPL) come out negative.
std::vector<double> sideband_offsets(double zpl_nm, const std::vector<double>& sideband_nm);
double sideband_offset(double zpl_nm, double sideband_nm);
// Inverse of sideband_offset.
double sideband_wavelength(double zpl_nm, double offset_mev);

double visibility(double i_max, double i_min);

struct ZplShiftOptions {
  int n_peaks_first = 1;
  int n_peaks_second = 1;
  fit::LineShape shape = fit::LineShape::kLorentzian;
  fit::LineFitOptions line;
};

struct ZplShift {
  double shift_nm;  // centre(first) - centre(second)
  fit::LineFit first;
  fit::LineFit second;
};

// Fits both spectra and compares the centres of the tallest fitted peak.
ZplShift zpl_shift(const Spectrum& first, const Spectrum& second, const ZplShiftOptions& options = {});

}  // namespace photodyn::spectral

#endif  // PHOTODYN_SPECTRAL_METRICS_HPP
