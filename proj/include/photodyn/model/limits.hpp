#ifndef PHOTODYN_MODEL_LIMITS_HPP
#define PHOTODYN_MODEL_LIMITS_HPP

#include "photodyn/model/types.hpp"

namespace photodyn::model {

// Limiting values of the fitted g2 parameters. Superscript 0 refers to
// vanishing excitation power, inf to saturating power.
struct SimpleLimits {
  double a_inf = 0.0;
  double tau2_inf_ns = 0.0;
  double tau1_zero_ns = 0.0;
};

struct ExtendedLimits {
  double a_inf = 0.0;
  double tau1_zero_ns = 0.0;
  double tau2_zero_ns = 0.0;
  double tau2_inf_ns = 0.0;
};

struct SimpleRates {
  Rate k21;
  Rate k23;
  Rate k31;
};

struct ExtendedRates {
  Rate k21;
  Rate k23;
  Rate k31_0;
  Rate d;
};

// Constant de-shelving model. Requires k21 + k23 > k31 on the result;
// throws ModelError("inconsistent limits") otherwise.
SimpleRates rates_from_limits_simple(const SimpleLimits& limits);

// Saturating de-shelving model (k31_0 taken from tau2 at zero power).
// Throws ModelError("inconsistent limits") if any rate comes out negative.
ExtendedRates rates_from_limits_extended(const ExtendedLimits& limits);

// Analytic limits implied by a model: a_inf = k23 / k31(inf),
// tau2_inf = 1 / (k23 + k31(inf)), tau1_0 = 1 / (k21 + k23), tau2_0 = 1 / k31(0).
ExtendedLimits analytic_limits(const EmitterModel& model);

SimpleLimits to_simple(const ExtendedLimits& limits);

}  // namespace photodyn::model

#endif  // PHOTODYN_MODEL_LIMITS_HPP
