#ifndef PHOTODYN_FITTING_LINE_FIT_HPP
#define PHOTODYN_FITTING_LINE_FIT_HPP

#include <vector>

#include "photodyn/fitting/fit_result.hpp"
#include "photodyn/fitting/lineshape.hpp"
#include "photodyn/spectral/spectrum.hpp"

namespace photodyn::fit {

struct LineFitOptions {
  CurveFitOptions curve{LmOptions{}, true};
  bool linear_baseline = true;
  // Optional starting centres; when empty peaks are seeded one at a time at
  // the maximum of the residual.
  std::vector<double> initial_centers_nm;
  // Weight samples by sqrt(counts) instead of uniformly.
  bool poisson_weights = false;
};

struct LineFit {
  FitResult result;             // center_i, fwhm_i, area_i[, eta_i], baseline_offset, baseline_slope
  std::vector<LinePeak> peaks;  // sorted by centre
  std::vector<LineGradient> errors;  // one-sigma errors in the same fields
  LineShape shape = LineShape::kLorentzian;
  double baseline_offset = 0.0;  // baseline = offset + slope (lambda - reference)
  double baseline_slope = 0.0;
  double baseline_reference_nm = 0.0;

  std::size_t dominant() const;  // index of the tallest peak
  double evaluate(double x_nm) const;
};

LineFit fit_lines(const spectral::Spectrum& spectrum, int n_peaks, LineShape shape = LineShape::kLorentzian,
                  const LineFitOptions& options = {});

}  // namespace photodyn::fit

#endif  // PHOTODYN_FITTING_LINE_FIT_HPP
