#include "photodyn/model/g2.hpp"

#include <cmath>

#include "photodyn/error.hpp"

namespace photodyn::model {

double g2_analytic(const G2Params& params, double tau_ns) {
  const double t = std::abs(tau_ns);
  // Grouped so that g2(0) is exactly zero.
  const double e1 = std::exp(-t / params.tau1_ns);
  return (1.0 - e1) + params.a * (std::exp(-t / params.tau2_ns) - e1);
}

G2Params g2_params_from_rates(const RateSet& rates) {
  rates.validate();
  const double k12 = rates.k12.per_ns();
  const double k21 = rates.k21.per_ns();
  const double k23 = rates.k23.per_ns();
  const double k31 = rates.k31.per_ns();
  if (k31 <= 0.0) throw ModelError("degenerate shelving: k31 must be positive");

  const double A = k12 + k21 + k23 + k31;
  const double B = k12 * k23 + k12 * k31 + k21 * k31 + k23 * k31;
  const double disc = A * A - 4.0 * B;
  if (!(disc > 0.0)) throw ModelError("non-real eigenvalues: A^2 - 4B must be positive");

  // Larger eigenvalue from the stable sum, smaller one via the product B,
  // which avoids cancellation when B << A^2.
  const double root = std::sqrt(disc);
  const double lambda_fast = 0.5 * (A + root);
  const double lambda_slow = B / lambda_fast;

  G2Params p;
  p.tau1_ns = 1.0 / lambda_fast;
  p.tau2_ns = 1.0 / lambda_slow;
  // a = (1 - tau2 k31) / (k31 (tau2 - tau1)). The characteristic polynomial
  // gives (lambda_slow - k31)(lambda_fast - k31) = k12 k23, so the numerator
  // can be written without cancellation; a is then exactly 0 for k12 = 0 or
  // k23 = 0.
  const double gap = lambda_fast - k31;
  if (gap != 0.0) {
    p.a = k12 * k23 * lambda_fast / (k31 * gap * root);
  } else {
    p.a = (1.0 - p.tau2_ns * k31) / (k31 * (p.tau2_ns - p.tau1_ns));
  }
  return p;
}

std::vector<G2Params> predict_power_dependence(const EmitterModel& model,
                                               std::span<const double> powers_uw) {
  model.validate();
  std::vector<G2Params> out;
  out.reserve(powers_uw.size());
  for (double p : powers_uw) out.push_back(g2_params_from_rates(model.rates_at(p)));
  return out;
}

std::vector<double> log_power_grid(double lo_uw, double hi_uw, int points_per_decade) {
  if (!(lo_uw > 0.0) || !(hi_uw >= lo_uw) || points_per_decade < 1) {
    throw ModelError("log grid needs 0 < lo <= hi and at least one point per decade");
  }
  const double decades = std::log10(hi_uw / lo_uw);
  const int n = static_cast<int>(std::lround(decades * points_per_decade));
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (int i = 0; i <= n; ++i) {
    grid.push_back(i == n ? hi_uw : lo_uw * std::pow(10.0, static_cast<double>(i) / points_per_decade));
  }
  return grid;
}

}  // namespace photodyn::model
