#include "photodyn/fitting/curve_fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "photodyn/error.hpp"
#include "photodyn/model/g2.hpp"

namespace photodyn::fit {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::size_t distinct_count(std::span<const double> v) {
  return std::set<double>(v.begin(), v.end()).size();
}

}  // namespace

FitResult fit_saturation(std::span<const SaturationPoint> data, const CurveFitOptions& options) {
  if (data.size() < 3) throw FitError("saturation fit needs at least 3 points");
  std::vector<double> p, y, s;
  bool weighted = true;
  for (const auto& d : data) {
    if (!(d.power_uw >= 0.0) || !std::isfinite(d.rate_kcps)) throw FitError("invalid saturation data point");
    p.push_back(d.power_uw);
    y.push_back(d.rate_kcps);
    if (!(d.sigma_kcps > 0.0)) weighted = false;
  }
  if (distinct_count(p) < 2) throw FitError("degenerate saturation data: all powers identical");
  if (*std::max_element(y.begin(), y.end()) <= 0.0) throw FitError("degenerate saturation data: no signal");
  for (const auto& d : data) s.push_back(weighted ? d.sigma_kcps : 1.0);

  // Start from the double-reciprocal line 1/I = 1/I_inf + (P_sat/I_inf)/P.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && y[i] > 0.0) {
      const double xi = 1.0 / p[i];
      const double yi = 1.0 / y[i];
      sx += xi;
      sy += yi;
      sxx += xi * xi;
      sxy += xi * yi;
      ++m;
    }
  }
  double i_inf0 = 1.5 * *std::max_element(y.begin(), y.end());
  double p_sat0 = *std::max_element(p.begin(), p.end()) / 2.0;
  const double den = m * sxx - sx * sx;
  if (m >= 2 && den > 0.0) {
    const double slope = (m * sxy - sx * sy) / den;
    const double intercept = (sy - slope * sx) / m;
    if (intercept > 0.0 && slope > 0.0) {
      i_inf0 = 1.0 / intercept;
      p_sat0 = slope / intercept;
    }
  }

  VectorModel model = [&p](std::span<const double> q, Eigen::VectorXd& values, Eigen::MatrixXd* jac) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double denom = p[i] + q[1];
      const auto k = static_cast<Eigen::Index>(i);
      values[k] = q[0] * p[i] / denom;
      if (jac != nullptr) {
        (*jac)(k, 0) = p[i] / denom;
        (*jac)(k, 1) = -q[0] * p[i] / (denom * denom);
      }
    }
    return true;
  };
  CurveFitOptions opts = options;
  if (!weighted) opts.scale_covariance = true;
  return fit_curve(model, y, s,
                   {{"i_inf_kcps", i_inf0, Transform::kLog, false}, {"p_sat_uw", p_sat0, Transform::kLog, false}},
                   opts);
}

model::SaturationParams saturation_params_of(const FitResult& r) {
  return {r.value("i_inf_kcps"), r.value("p_sat_uw")};
}

PolarizationFit fit_polarization(std::span<const PolarizationPoint> scan, const CurveFitOptions& options) {
  if (scan.size() < 4) throw FitError("polarization fit needs at least 4 angles");
  double lo = scan.front().angle_deg;
  double hi = lo;
  std::vector<double> theta, y, s;
  for (const auto& pt : scan) {
    lo = std::min(lo, pt.angle_deg);
    hi = std::max(hi, pt.angle_deg);
    theta.push_back(pt.angle_deg * kDegToRad);
    y.push_back(pt.intensity);
    s.push_back(pt.sigma > 0.0 ? pt.sigma : std::sqrt(std::max(pt.intensity, 1.0)));
  }
  if (hi - lo < 180.0 - 1e-9) throw FitError("polarization scan must span at least 180 degrees");

  // The model is linear in (c0, c1, c2) for I = c0 + c1 cos 2t + c2 sin 2t,
  // which gives exact starting values.
  Eigen::MatrixXd design(static_cast<Eigen::Index>(y.size()), 3);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    design(k, 0) = 1.0 / s[i];
    design(k, 1) = std::cos(2.0 * theta[i]) / s[i];
    design(k, 2) = std::sin(2.0 * theta[i]) / s[i];
    rhs[k] = y[i] / s[i];
  }
  const Eigen::Vector3d c = design.colPivHouseholderQr().solve(rhs);
  const double half_contrast = std::hypot(c[1], c[2]);  // (I_max - I_min) / 2
  double theta0 = 0.5 * std::atan2(-c[2], -c[1]);
  double i_max0 = c[0] + half_contrast;
  double i_min0 = c[0] - half_contrast;

  VectorModel model = [&theta](std::span<const double> q, Eigen::VectorXd& values, Eigen::MatrixXd* jac) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double phase = theta[i] - q[2] * kDegToRad;
      const double sn = std::sin(phase);
      const auto k = static_cast<Eigen::Index>(i);
      values[k] = q[1] + (q[0] - q[1]) * sn * sn;
      if (jac != nullptr) {
        (*jac)(k, 0) = sn * sn;
        (*jac)(k, 1) = 1.0 - sn * sn;
        (*jac)(k, 2) = -(q[0] - q[1]) * std::sin(2.0 * phase) * kDegToRad;
      }
    }
    return true;
  };
  CurveFitOptions opts = options;
  PolarizationFit out;
  out.result = fit_curve(model, y, s,
                         {{"i_max", i_max0}, {"i_min", i_min0}, {"theta0_deg", theta0 / kDegToRad}}, opts);
  auto& r = out.result;
  if (r.values[0] < r.values[1]) {
    std::swap(r.values[0], r.values[1]);
    const Eigen::Index a = 0, b = 1;
    r.covariance.row(a).swap(r.covariance.row(b));
    r.covariance.col(a).swap(r.covariance.col(b));
    r.values[2] += 90.0;
  }
  r.values[2] = std::fmod(r.values[2], 180.0);
  if (r.values[2] < 0.0) r.values[2] += 180.0;

  const double i_max = r.values[0];
  const double i_min = r.values[1];
  const double sum = i_max + i_min;
  if (sum <= 0.0) throw FitError("polarization scan has no signal");
  out.visibility = (i_max - i_min) / sum;
  // The relative contrast noise decides whether the orientation is defined.
  if (half_contrast == 0.0 || !r.is_identifiable("theta0_deg") ||
      out.visibility < 1e-12 * std::max(1.0, std::abs(c[0]))) {
    r.identifiable[2] = false;
    r.covariance(2, 2) = std::numeric_limits<double>::infinity();
    if (out.visibility < 1e-9) out.visibility = 0.0;
  }
  // dV/dI_max = 2 I_min / sum^2, dV/dI_min = -2 I_max / sum^2
  const double gmax = 2.0 * i_min / (sum * sum);
  const double gmin = -2.0 * i_max / (sum * sum);
  const double var = gmax * gmax * r.covariance(0, 0) + gmin * gmin * r.covariance(1, 1) +
                     2.0 * gmax * gmin * r.covariance(0, 1);
  out.visibility_error = std::sqrt(std::max(0.0, var));
  return out;
}

model::EmitterModel extended_model(const model::ExtendedRates& rates, double c_uw, double sigma_mhz_per_uw) {
  model::EmitterModel m;
  m.sigma_mhz_per_uw = sigma_mhz_per_uw;
  m.k21 = rates.k21;
  m.k23 = rates.k23;
  m.deshelving = model::SaturatingDeshelving{rates.k31_0, rates.d, c_uw};
  return m;
}

FitResult fit_deshelving(std::span<const DeshelvingPoint> data, const model::ExtendedRates& rates,
                         const DeshelvingFitOptions& options) {
  if (data.empty()) throw FitError("deshelving fit needs data");
  std::vector<double> p, y, s;
  for (const auto& d : data) {
    if (!(d.power_uw >= 0.0) || !std::isfinite(d.a)) throw FitError("invalid a(P) data point");
    p.push_back(d.power_uw);
    y.push_back(d.a);
    s.push_back(d.sigma > 0.0 ? d.sigma : 1.0);
  }
  if (distinct_count(p) < 2) throw FitError("deshelving fit needs at least 2 distinct powers");
  const bool weighted = std::all_of(data.begin(), data.end(), [](const auto& d) { return d.sigma > 0.0; });

  auto predict = [&](double c, double sigma, std::vector<double>& out) {
    const model::EmitterModel m = extended_model(rates, c, sigma);
    out.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = model::g2_params_from_rates(m.rates_at(p[i])).a;
  };

  double c0 = options.init_c_uw.value_or(0.0);
  double sigma0 = options.init_sigma_mhz_per_uw.value_or(0.0);
  if (!(c0 > 0.0) || !(sigma0 > 0.0)) {
    // Coarse log grid for whichever starting value is missing.
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> pred;
    const double c_fixed = c0;
    const double s_fixed = sigma0;
    for (int i = 0; i <= 24; ++i) {
      const double c = c_fixed > 0.0 ? c_fixed : std::pow(10.0, -1.0 + 5.0 * i / 24.0);
      for (int j = 0; j <= 24; ++j) {
        const double sg = s_fixed > 0.0 ? s_fixed : std::pow(10.0, -2.0 + 4.0 * j / 24.0);
        predict(c, sg, pred);
        double chi = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) chi += std::pow((pred[k] - y[k]) / s[k], 2);
        if (chi < best) {
          best = chi;
          c0 = c;
          sigma0 = sg;
        }
        if (s_fixed > 0.0) break;
      }
      if (c_fixed > 0.0) break;
    }
  }

  VectorModel model = [&](std::span<const double> q, Eigen::VectorXd& values, Eigen::MatrixXd*) {
    std::vector<double> pred;
    predict(q[0], q[1], pred);
    for (std::size_t i = 0; i < pred.size(); ++i) values[static_cast<Eigen::Index>(i)] = pred[i];
    return false;
  };
  CurveFitOptions opts = options.curve;
  if (!weighted) opts.scale_covariance = true;
  return fit_curve(model, y, s,
                   {{"c_uw", c0, Transform::kLog, false}, {"sigma_mhz_per_uw", sigma0, Transform::kLog, false}},
                   opts);
}

}  // namespace photodyn::fit
