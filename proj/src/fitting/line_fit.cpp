#include "photodyn/fitting/line_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "photodyn/error.hpp"

namespace photodyn::fit {

std::size_t LineFit::dominant() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    if (peak_height(shape, peaks[i]) > peak_height(shape, peaks[best])) best = i;
  }
  return best;
}

double LineFit::evaluate(double x) const {
  double v = baseline_offset + baseline_slope * (x - baseline_reference_nm);
  for (const auto& p : peaks) v += line_value(shape, p, x);
  return v;
}

namespace {

struct Layout {
  int n_peaks;
  int per_peak;
  LineShape shape;
};

std::vector<ParameterSpec> make_specs(const std::vector<LinePeak>& peaks, LineShape shape, double offset,
                                      double slope, bool baseline) {
  std::vector<ParameterSpec> specs;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    const std::string k = std::to_string(i + 1);
    specs.push_back({"center_" + k, peaks[i].center_nm, Transform::kIdentity, false});
    specs.push_back({"fwhm_" + k, peaks[i].fwhm_nm, Transform::kLog, false});
    specs.push_back({"area_" + k, peaks[i].area, Transform::kLog, false});
    if (shape == LineShape::kPseudoVoigt) specs.push_back({"eta_" + k, peaks[i].eta, Transform::kUnitInterval, false});
  }
  specs.push_back({"baseline_offset", offset, Transform::kIdentity, !baseline});
  specs.push_back({"baseline_slope", slope, Transform::kIdentity, !baseline});
  return specs;
}

std::vector<LinePeak> unpack_peaks(std::span<const double> q, const Layout& l) {
  std::vector<LinePeak> peaks(static_cast<std::size_t>(l.n_peaks));
  for (int i = 0; i < l.n_peaks; ++i) {
    const std::size_t b = static_cast<std::size_t>(i * l.per_peak);
    peaks[static_cast<std::size_t>(i)] = {q[b], q[b + 1], q[b + 2], l.per_peak == 4 ? q[b + 3] : 0.5};
  }
  return peaks;
}

double profile_area_factor(LineShape shape) {
  // area / (height * fwhm)
  switch (shape) {
    case LineShape::kLorentzian:
      return 0.5 * 3.141592653589793;
    case LineShape::kGaussian:
      return 1.0644670194312262;
    case LineShape::kPseudoVoigt:
      return 0.5 * (0.5 * 3.141592653589793 + 1.0644670194312262);
  }
  return 1.0;
}

}  // namespace

LineFit fit_lines(const spectral::Spectrum& spectrum, int n_peaks, LineShape shape, const LineFitOptions& options) {
  spectrum.validate();
  if (n_peaks < 1) throw FitError("n_peaks must be at least 1");
  const auto& x = spectrum.wavelength_nm;
  const auto& y = spectrum.intensity;
  const std::size_t n = x.size();
  const int per_peak = shape == LineShape::kPseudoVoigt ? 4 : 3;
  if (static_cast<int>(n) <= n_peaks * per_peak + 2) throw FitError("spectrum has too few samples for the line model");

  const double reference = 0.5 * (x.front() + x.back());
  const double span = x.back() - x.front();
  const double step = span / static_cast<double>(n - 1);
  std::vector<double> sigma(n, 1.0);
  if (options.poisson_weights) {
    for (std::size_t i = 0; i < n; ++i) sigma[i] = std::sqrt(std::max(y[i], 1.0));
  }

  // Baseline start: line through the low ends of the spectrum.
  const std::size_t edge = std::max<std::size_t>(3, n / 20);
  auto edge_mean = [&](std::size_t from) {
    double s = 0.0;
    for (std::size_t i = from; i < from + edge; ++i) s += y[i];
    return s / static_cast<double>(edge);
  };
  const double left = edge_mean(0);
  const double right = edge_mean(n - edge);
  double offset = options.linear_baseline ? 0.5 * (left + right) : 0.0;
  double slope = options.linear_baseline && span > 0.0 ? (right - left) / span : 0.0;
  if (options.linear_baseline) {
    // Keep the start below the data so the peaks carry the signal.
    double min_y = *std::min_element(y.begin(), y.end());
    offset = std::min(offset, min_y + 0.5 * std::abs(slope) * span);
  }

  auto run = [&](const std::vector<LinePeak>& start, double off, double sl) {
    const Layout layout{static_cast<int>(start.size()), per_peak, shape};
    VectorModel model = [&, layout](std::span<const double> q, Eigen::VectorXd& values, Eigen::MatrixXd* jac) {
      const std::vector<LinePeak> peaks = unpack_peaks(q, layout);
      const std::size_t nb = static_cast<std::size_t>(layout.n_peaks * layout.per_peak);
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double dxr = x[i] - reference;
        double v = q[nb] + q[nb + 1] * dxr;
        for (std::size_t p = 0; p < peaks.size(); ++p) {
          LineGradient g;
          v += line_value(shape, peaks[p], x[i], jac != nullptr ? &g : nullptr);
          if (jac != nullptr) {
            const auto c = static_cast<Eigen::Index>(p * static_cast<std::size_t>(layout.per_peak));
            (*jac)(r, c) = g.d_center;
            (*jac)(r, c + 1) = g.d_fwhm;
            (*jac)(r, c + 2) = g.d_area;
            if (layout.per_peak == 4) (*jac)(r, c + 3) = g.d_eta;
          }
        }
        values[r] = v;
        if (jac != nullptr) {
          (*jac)(r, static_cast<Eigen::Index>(nb)) = 1.0;
          (*jac)(r, static_cast<Eigen::Index>(nb + 1)) = dxr;
        }
      }
      return true;
    };
    return fit_curve(model, y, sigma, make_specs(start, shape, off, sl, options.linear_baseline), options.curve);
  };

  std::vector<LinePeak> peaks;
  FitResult result;
  auto absorb = [&](const FitResult& r) {
    result = r;
    const Layout layout{static_cast<int>(peaks.size()), per_peak, shape};
    peaks = unpack_peaks(r.values, layout);
    const std::size_t nb = peaks.size() * static_cast<std::size_t>(per_peak);
    offset = r.values[nb];
    slope = r.values[nb + 1];
  };

  auto seed_at = [&](double center) {
    // Height and width from the current residual around `center`.
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i) {
      double m = offset + slope * (x[i] - reference);
      for (const auto& p : peaks) m += line_value(shape, p, x[i]);
      resid[i] = y[i] - m;
    }
    std::size_t at = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), center) - x.begin());
    at = std::min(at, n - 1);
    const double height = std::max(resid[at], 1e-12 * (1.0 + std::abs(*std::max_element(y.begin(), y.end()))));
    std::size_t l = at;
    std::size_t r = at;
    while (l > 0 && resid[l] > 0.5 * height) --l;
    while (r + 1 < n && resid[r] > 0.5 * height) ++r;
    const double fwhm = std::clamp(x[r] - x[l], 2.0 * step, 0.5 * span);
    return LinePeak{x[at], fwhm, height * fwhm * profile_area_factor(shape), 0.5};
  };

  if (!options.initial_centers_nm.empty()) {
    if (static_cast<int>(options.initial_centers_nm.size()) != n_peaks) {
      throw FitError("number of initial centres must equal n_peaks");
    }
    for (double c : options.initial_centers_nm) peaks.push_back(seed_at(c));
    absorb(run(peaks, offset, slope));
  } else {
    for (int k = 0; k < n_peaks; ++k) {
      std::size_t best = 0;
      double best_val = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        double m = offset + slope * (x[i] - reference);
        for (const auto& p : peaks) m += line_value(shape, p, x[i]);
        const double rv = y[i] - m;
        if (rv > best_val) {
          best_val = rv;
          best = i;
        }
      }
      peaks.push_back(seed_at(x[best]));
      absorb(run(peaks, offset, slope));
    }
  }

  LineFit out;
  out.shape = shape;
  out.baseline_reference_nm = reference;
  // Sort peaks by centre and permute the fit result to match.
  std::vector<std::size_t> by_center(peaks.size());
  std::iota(by_center.begin(), by_center.end(), 0);
  std::sort(by_center.begin(), by_center.end(),
            [&](std::size_t a, std::size_t b) { return peaks[a].center_nm < peaks[b].center_nm; });
  std::vector<std::size_t> order;
  for (std::size_t p : by_center) {
    for (int j = 0; j < per_peak; ++j) order.push_back(p * static_cast<std::size_t>(per_peak) + static_cast<std::size_t>(j));
  }
  const std::size_t nb = peaks.size() * static_cast<std::size_t>(per_peak);
  order.push_back(nb);
  order.push_back(nb + 1);
  out.result = permute_parameters(result, order);
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    const std::string k = std::to_string(i + 1);
    for (int j = 0; j < per_peak; ++j) {
      const std::size_t idx = i * static_cast<std::size_t>(per_peak) + static_cast<std::size_t>(j);
      static const char* field[] = {"center_", "fwhm_", "area_", "eta_"};
      out.result.names[idx] = field[j] + k;
    }
  }
  const Layout layout{static_cast<int>(peaks.size()), per_peak, shape};
  out.peaks = unpack_peaks(out.result.values, layout);
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    const auto b = static_cast<Eigen::Index>(i * static_cast<std::size_t>(per_peak));
    auto err = [&](Eigen::Index j) { return std::sqrt(std::max(0.0, out.result.covariance(b + j, b + j))); };
    out.errors.push_back({err(0), err(1), err(2), per_peak == 4 ? err(3) : 0.0});
  }
  out.baseline_offset = out.result.values[nb];
  out.baseline_slope = out.result.values[nb + 1];
  return out;
}

}  // namespace photodyn::fit
