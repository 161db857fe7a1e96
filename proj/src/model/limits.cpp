#include "photodyn/model/limits.hpp"

#include <cmath>

#include "photodyn/error.hpp"

namespace photodyn::model {

namespace {

void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0)) throw ModelError(std::string(name) + " must be positive");
}

}  // namespace

SimpleRates rates_from_limits_simple(const SimpleLimits& limits) {
  if (!(std::isfinite(limits.a_inf) && limits.a_inf >= 0.0)) throw ModelError("a_inf must be non-negative");
  require_positive(limits.tau2_inf_ns, "tau2_inf");
  require_positive(limits.tau1_zero_ns, "tau1_0");

  const double k31 = 1.0 / ((1.0 + limits.a_inf) * limits.tau2_inf_ns);
  const double k23 = k31 * limits.a_inf;
  const double k21 = 1.0 / limits.tau1_zero_ns - k23;
  if (!(k21 > 0.0)) throw ModelError("inconsistent limits: extracted k21 is not positive");
  if (!(k21 + k23 > k31)) throw ModelError("inconsistent limits: k21 + k23 must exceed k31");
  return {Rate::per_ns(k21), Rate::per_ns(k23), Rate::per_ns(k31)};
}

ExtendedRates rates_from_limits_extended(const ExtendedLimits& limits) {
  if (!(std::isfinite(limits.a_inf) && limits.a_inf >= 0.0)) throw ModelError("a_inf must be non-negative");
  require_positive(limits.tau1_zero_ns, "tau1_0");
  require_positive(limits.tau2_zero_ns, "tau2_0");
  require_positive(limits.tau2_inf_ns, "tau2_inf");

  const double k31_0 = 1.0 / limits.tau2_zero_ns;
  const double inv_tau2_inf = 1.0 / limits.tau2_inf_ns;
  const double d = (inv_tau2_inf - (1.0 + limits.a_inf) * k31_0) / (limits.a_inf + 1.0);
  const double k23 = inv_tau2_inf - k31_0 - d;
  const double k21 = 1.0 / limits.tau1_zero_ns - k23;

  // Exact zeros can come out as tiny negatives when the limits were built
  // from a model with d = 0 or k23 = 0.
  const double scale = inv_tau2_inf;
  auto clean = [scale](double v) { return std::abs(v) <= 1e-12 * scale ? 0.0 : v; };
  const double d_c = clean(d);
  const double k23_c = clean(k23);
  if (d_c < 0.0 || k23_c < 0.0 || !(k21 > 0.0)) {
    throw ModelError("inconsistent limits: extracted rates must be non-negative");
  }
  if (!(k21 + k23_c > k31_0)) throw ModelError("inconsistent limits: k21 + k23 must exceed k31_0");
  return {Rate::per_ns(k21), Rate::per_ns(k23_c), Rate::per_ns(k31_0), Rate::per_ns(d_c)};
}

ExtendedLimits analytic_limits(const EmitterModel& model) {
  model.validate();
  const Rate k31_inf = asymptotic_k31(model.deshelving);
  const Rate k31_zero = effective_k31(model.deshelving, 0.0);
  ExtendedLimits l;
  l.a_inf = model.k23 / k31_inf;
  l.tau2_inf_ns = (model.k23 + k31_inf).lifetime_ns();
  l.tau1_zero_ns = (model.k21 + model.k23).lifetime_ns();
  l.tau2_zero_ns = k31_zero.lifetime_ns();
  return l;
}

SimpleLimits to_simple(const ExtendedLimits& limits) {
  return {limits.a_inf, limits.tau2_inf_ns, limits.tau1_zero_ns};
}

}  // namespace photodyn::model
