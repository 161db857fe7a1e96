#include "photodyn/fitting/g2_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "photodyn/error.hpp"
#include "photodyn/fitting/special.hpp"
#include "photodyn/model/g2.hpp"

namespace photodyn::fit {

namespace {

// exp(s^2/2 -/+ tau/decay) * erfc((s -/+ t)/sqrt2) with s = sigma/decay and
// t = tau/sigma, written so neither factor overflows.
double exp_erfc_term(double tau, double decay, double sigma) {
  const double s = sigma / decay;
  const double t = tau / sigma;
  const double u = (s - t) / std::numbers::sqrt2;
  if (u >= 0.0) return std::exp(-0.5 * t * t) * erfcx(u);
  return std::exp(0.5 * s * s - tau / decay) * std::erfc(u);
}

constexpr std::array<double, 4> kGaussNodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                            0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                              0.3478548451374538};

}  // namespace

double smoothed_exponential(double tau_ns, double decay_ns, double sigma_ns) {
  if (sigma_ns <= 0.0) return std::exp(-std::abs(tau_ns) / decay_ns);
  return 0.5 * (exp_erfc_term(tau_ns, decay_ns, sigma_ns) + exp_erfc_term(-tau_ns, decay_ns, sigma_ns));
}

double smoothed_exponential_ddecay(double tau_ns, double decay_ns, double sigma_ns) {
  const double d2 = decay_ns * decay_ns;
  if (sigma_ns <= 0.0) {
    const double t = std::abs(tau_ns);
    return t / d2 * std::exp(-t / decay_ns);
  }
  const double minus = exp_erfc_term(tau_ns, decay_ns, sigma_ns);
  const double plus = exp_erfc_term(-tau_ns, decay_ns, sigma_ns);
  const double t = tau_ns / sigma_ns;
  const double gauss = std::exp(-0.5 * t * t) * std::sqrt(2.0 / std::numbers::pi) * sigma_ns / d2;
  return 0.5 * ((minus - plus) * tau_ns / d2 - (minus + plus) * sigma_ns * sigma_ns / (d2 * decay_ns)) + gauss;
}

G2Value g2_convolved_with_gradient(const model::G2Params& p, const Irf& irf, double tau_ns) {
  const double sigma = irf.sigma_ns();
  const double e1 = smoothed_exponential(tau_ns, p.tau1_ns, sigma);
  const double e2 = smoothed_exponential(tau_ns, p.tau2_ns, sigma);
  G2Value v;
  v.value = 1.0 - (1.0 + p.a) * e1 + p.a * e2;
  v.d_a = e2 - e1;
  v.d_tau1 = -(1.0 + p.a) * smoothed_exponential_ddecay(tau_ns, p.tau1_ns, sigma);
  v.d_tau2 = p.a * smoothed_exponential_ddecay(tau_ns, p.tau2_ns, sigma);
  return v;
}

double g2_convolved(const model::G2Params& params, const Irf& irf, double tau_ns) {
  if (irf.sigma_ps <= 0.0) return model::g2_analytic(params, tau_ns);
  const double sigma = irf.sigma_ns();
  return 1.0 - (1.0 + params.a) * smoothed_exponential(tau_ns, params.tau1_ns, sigma) +
         params.a * smoothed_exponential(tau_ns, params.tau2_ns, sigma);
}

model::G2Params g2_params_of(const FitResult& r) {
  return {r.value("a"), r.value("tau1_ns"), r.value("tau2_ns")};
}

FitResult fit_g2(const corr::CorrelationHistogram& hist, const Irf& irf, const model::G2Params& init,
                 const G2FitOptions& options) {
  if (hist.size() < 10) throw FitError("g2 fit needs at least 10 bins");
  if (hist.g2.size() != hist.size() || hist.sigma_g2.size() != hist.size()) {
    throw FitError("histogram is not normalized");
  }
  if (!(init.tau1_ns > 0.0) || !(init.tau2_ns > 0.0)) throw FitError("initial time constants must be positive");
  if (!(irf.sigma_ps >= 0.0)) throw FitError("IRF width must be non-negative");

  const std::size_t n = hist.size();
  std::vector<double> lo(n), hi(n);
  for (std::size_t k = 0; k < n; ++k) {
    lo[k] = hist.bin_edges_ns[k];
    hi[k] = hist.bin_edges_ns[k + 1];
  }
  const bool average = options.bin_average;

  VectorModel model = [&](std::span<const double> q, Eigen::VectorXd& values, Eigen::MatrixXd* jac) {
    const model::G2Params p{q[0], q[1], q[2]};
    const double amplitude = q[3];
    const double background = q[4];
    for (std::size_t k = 0; k < n; ++k) {
      G2Value acc;
      if (average) {
        const double mid = 0.5 * (lo[k] + hi[k]);
        const double half = 0.5 * (hi[k] - lo[k]);
        for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
          const G2Value v = g2_convolved_with_gradient(p, irf, mid + half * kGaussNodes[g]);
          const double w = 0.5 * kGaussWeights[g];
          acc.value += w * v.value;
          acc.d_a += w * v.d_a;
          acc.d_tau1 += w * v.d_tau1;
          acc.d_tau2 += w * v.d_tau2;
        }
      } else {
        acc = g2_convolved_with_gradient(p, irf, 0.5 * (lo[k] + hi[k]));
      }
      const auto i = static_cast<Eigen::Index>(k);
      values[i] = amplitude * acc.value + background;
      if (jac != nullptr) {
        (*jac)(i, 0) = amplitude * acc.d_a;
        (*jac)(i, 1) = amplitude * acc.d_tau1;
        (*jac)(i, 2) = amplitude * acc.d_tau2;
        (*jac)(i, 3) = acc.value;
        (*jac)(i, 4) = 1.0;
      }
    }
    return true;
  };

  std::vector<ParameterSpec> specs{
      {"a", init.a, Transform::kIdentity, false},
      {"tau1_ns", init.tau1_ns, Transform::kLog, false},
      {"tau2_ns", init.tau2_ns, Transform::kLog, false},
      {"amplitude", options.amplitude, Transform::kIdentity, !options.fit_amplitude},
      {"background", options.background, Transform::kIdentity, !options.fit_background},
  };
  FitResult r = fit_curve(model, hist.g2, hist.sigma_g2, std::move(specs), options.curve);
  if (!r.all_identifiable()) {
    throw FitError("singular Jacobian: g2 parameters are not constrained by the data");
  }

  if (r.values[1] > r.values[2]) {
    // Same curve with the exponentials relabelled.
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(5, 5);
    p(0, 0) = -1.0;
    p(1, 1) = 0.0;
    p(1, 2) = 1.0;
    p(2, 2) = 0.0;
    p(2, 1) = 1.0;
    r.covariance = p * r.covariance * p.transpose();
    r.values[0] = -(1.0 + r.values[0]);
    std::swap(r.values[1], r.values[2]);
  }
  return r;
}

JackknifeG2Fit fit_g2_jackknife(const corr::BlockCounts& blocks, const Irf& irf, const model::G2Params& init,
                                const G2FitOptions& options, corr::Normalization mode) {
  const std::size_t k = blocks.size();
  if (k < 2) throw FitError("jackknife needs at least two blocks");
  JackknifeG2Fit out;
  out.poisson = fit_g2(blocks.histogram(k, mode), irf, init, options);
  const model::G2Params start = g2_params_of(out.poisson);
  const std::size_t np = out.poisson.values.size();
  std::vector<std::vector<double>> reps;
  for (std::size_t skip = 0; skip < k; ++skip) {
    FitResult r = fit_g2(blocks.histogram(skip, mode), irf, start, options);
    out.replicates.push_back(g2_params_of(r));
    reps.push_back(r.values);
  }
  std::vector<double> mean(np, 0.0);
  for (const auto& r : reps) {
    for (std::size_t i = 0; i < np; ++i) mean[i] += r[i] / static_cast<double>(k);
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(np), static_cast<Eigen::Index>(np));
  for (const auto& r : reps) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(np));
    for (std::size_t i = 0; i < np; ++i) d[static_cast<Eigen::Index>(i)] = r[i] - mean[i];
    cov += d * d.transpose();
  }
  cov *= static_cast<double>(k - 1) / static_cast<double>(k);
  out.result = out.poisson;
  out.result.covariance = cov;
  out.result.message = "jackknife covariance over " + std::to_string(k) + " time blocks";
  return out;
}

model::G2Params estimate_g2_init(const corr::CorrelationHistogram& hist) {
  if (hist.size() < 3) throw FitError("histogram too small for an initial estimate");
  // Fold onto positive delays and smooth lightly.
  std::vector<std::pair<double, double>> folded;
  for (std::size_t k = 0; k < hist.size(); ++k) {
    const double c = hist.center(k);
    if (c >= 0.0) folded.emplace_back(c, hist.g2[k]);
  }
  for (std::size_t k = 0; k < hist.size(); ++k) {
    const double c = hist.center(k);
    if (c < 0.0) {
      auto it = std::lower_bound(folded.begin(), folded.end(), -c,
                                 [](const auto& e, double v) { return e.first < v; });
      if (it != folded.end() && std::abs(it->first + c) < 1e-9 * std::max(1.0, -c)) {
        it->second = 0.5 * (it->second + hist.g2[k]);
      }
    }
  }
  if (folded.size() < 3) throw FitError("histogram too small for an initial estimate");
  std::vector<double> smooth(folded.size());
  for (std::size_t i = 0; i < folded.size(); ++i) {
    const std::size_t a = i >= 2 ? i - 2 : 0;
    const std::size_t b = std::min(folded.size() - 1, i + 2);
    double s = 0.0;
    for (std::size_t j = a; j <= b; ++j) s += folded[j].second;
    smooth[i] = s / static_cast<double>(b - a + 1);
  }
  const std::size_t peak = static_cast<std::size_t>(std::max_element(smooth.begin(), smooth.end()) - smooth.begin());
  const double g_peak = smooth[peak];
  const double g_zero = smooth.front();
  const double t_range = folded.back().first;
  const double first_bin = std::max(folded.front().first, 1e-3);

  model::G2Params p;
  p.a = std::max(0.05, g_peak - 1.0);
  const double half_level = 0.5 * (g_zero + std::min(g_peak, 1.0 + p.a));
  double t_half = first_bin;
  for (std::size_t i = 0; i <= peak; ++i) {
    if (smooth[i] >= half_level) {
      t_half = std::max(folded[i].first, first_bin);
      break;
    }
  }
  p.tau1_ns = std::max(t_half / std::numbers::ln2, first_bin);
  const double target = 1.0 + (g_peak - 1.0) / std::numbers::e;
  double t_decay = t_range / 4.0;
  for (std::size_t i = peak; i < smooth.size(); ++i) {
    if (smooth[i] <= target) {
      t_decay = folded[i].first;
      break;
    }
  }
  p.tau2_ns = std::max(t_decay, 3.0 * p.tau1_ns);
  return p;
}

}  // namespace photodyn::fit
