#include "photodyn/spectral/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "photodyn/error.hpp"

namespace photodyn::spectral {

WavelengthWindow default_zpl_window(const fit::LinePeak& zpl) {
  return {zpl.center_nm - 3.0 * zpl.fwhm_nm, zpl.center_nm + 3.0 * zpl.fwhm_nm};
}

WavelengthWindow full_window(const Spectrum& s) {
  s.validate();
  return {s.wavelength_nm.front(), s.wavelength_nm.back()};
}

namespace {

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  auto it = std::upper_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double t = (at - x[j - 1]) / (x[j] - x[j - 1]);
  return y[j - 1] + t * (y[j] - y[j - 1]);
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y, const WavelengthWindow& w) {
  if (w.hi_nm <= w.lo_nm) return 0.0;
  double sum = 0.0;
  double px = w.lo_nm;
  double py = interpolate(x, y, w.lo_nm);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= w.lo_nm) continue;
    if (x[i] >= w.hi_nm) break;
    sum += 0.5 * (x[i] - px) * (y[i] + py);
    px = x[i];
    py = y[i];
  }
  sum += 0.5 * (w.hi_nm - px) * (interpolate(x, y, w.hi_nm) + py);
  return sum;
}

void check_window(const Spectrum& s, const WavelengthWindow& w, const char* what) {
  if (!(w.hi_nm > w.lo_nm)) throw DataError(std::string(what) + " window is empty");
  const double tol = 1e-9 * (s.wavelength_nm.back() - s.wavelength_nm.front());
  if (w.lo_nm < s.wavelength_nm.front() - tol || w.hi_nm > s.wavelength_nm.back() + tol) {
    throw DataError(std::string(what) + " window extends beyond the recorded spectrum");
  }
}

}  // namespace

double integrate(const Spectrum& s, const WavelengthWindow& window) {
  s.validate();
  return trapezoid(s.wavelength_nm, s.intensity, window);
}

double debye_waller(const Spectrum& s, const WavelengthWindow& zpl, const WavelengthWindow& total,
                    const DebyeWallerOptions& options) {
  s.validate();
  check_window(s, zpl, "ZPL");
  check_window(s, total, "total");
  if (!total.contains(zpl)) throw DataError("ZPL window must lie inside the total window");

  std::vector<double> y = s.intensity;
  if (options.subtract_baseline && !s.background_subtracted) {
    const double y0 = interpolate(s.wavelength_nm, s.intensity, total.lo_nm);
    const double y1 = interpolate(s.wavelength_nm, s.intensity, total.hi_nm);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double t = (s.wavelength_nm[i] - total.lo_nm) / (total.hi_nm - total.lo_nm);
      y[i] -= y0 + t * (y1 - y0);
    }
  }
  const double i_tot = trapezoid(s.wavelength_nm, y, total);
  if (!(i_tot > 0.0)) throw DataError("total integrated intensity is zero");
  const double dw = trapezoid(s.wavelength_nm, y, zpl) / i_tot;
  return std::clamp(dw, 0.0, 1.0);
}

double debye_waller(const Spectrum& s, const WavelengthWindow& zpl, const DebyeWallerOptions& options) {
  return debye_waller(s, zpl, full_window(s), options);
}

double huang_rhys(double dw) {
  if (!(dw > 0.0) || dw > 1.0) throw DataError("Debye-Waller factor must lie in (0, 1]");
  return -std::log(dw);
}

double sideband_offset(double zpl_nm, double sideband_nm) {
  if (!(zpl_nm > 0.0) || !(sideband_nm > 0.0)) throw DataError("wavelengths must be positive");
  return 1e3 * kEvNm * (1.0 / zpl_nm - 1.0 / sideband_nm);
}

std::vector<double> sideband_offsets(double zpl_nm, const std::vector<double>& sideband_nm) {
  std::vector<double> out;
  out.reserve(sideband_nm.size());
  for (double s : sideband_nm) out.push_back(sideband_offset(zpl_nm, s));
  return out;
}

double sideband_wavelength(double zpl_nm, double offset_mev) {
  if (!(zpl_nm > 0.0)) throw DataError("wavelengths must be positive");
  const double inv = 1.0 / zpl_nm - offset_mev * 1e-3 / kEvNm;
  if (!(inv > 0.0)) throw DataError("sideband offset exceeds the photon energy");
  return 1.0 / inv;
}

double visibility(double i_max, double i_min) {
  if (i_min < 0.0 || i_max < i_min) throw DataError("visibility needs i_max >= i_min >= 0");
  if (i_max + i_min == 0.0) throw DataError("visibility undefined for zero intensity");
  return (i_max - i_min) / (i_max + i_min);
}

ZplShift zpl_shift(const Spectrum& first, const Spectrum& second, const ZplShiftOptions& options) {
  ZplShift out{0.0, fit::fit_lines(first, options.n_peaks_first, options.shape, options.line),
               fit::fit_lines(second, options.n_peaks_second, options.shape, options.line)};
  out.shift_nm = out.first.peaks[out.first.dominant()].center_nm - out.second.peaks[out.second.dominant()].center_nm;
  return out;
}

}  // namespace photodyn::spectral
