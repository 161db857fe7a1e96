#ifndef PHOTODYN_MODEL_EMISSION_HPP
#define PHOTODYN_MODEL_EMISSION_HPP

#include "photodyn/model/types.hpp"

namespace photodyn::model {

// Stationary occupation of the three levels.
Populations steady_state(const RateSet& rates);

// n2 for k12 -> infinity: 1 / (1 + k23 / k31(inf)).
double asymptotic_excited_population(const EmitterModel& model);

// eta_coll * eta_qe * k21 * n2_inf, in kcps. For k23 = 0 this is the ceiling
// of an off-resonantly pumped two-level system.
double max_count_rate(const EmitterModel& model, const BeamConfig& beam);

// eta_coll * eta_qe * k21 * n2(P), in kcps.
double count_rate(const EmitterModel& model, const BeamConfig& beam, double power_uw);

// I = I_inf P / (P + P_sat)
double saturation_curve(const SaturationParams& sat, double power_uw);

// Intensity in the focus (kW/cm^2) for objective transmission T and 1/e^2
// radius w: T P / (pi w^2).
double intensity_from_power(const BeamConfig& beam, double power_uw);

// For constant de-shelving the count rate follows the saturation law exactly
// with P_sat = k31 (k21 + k23) / ((k31 + k23) sigma). These two helpers
// convert between P_sat and sigma.
double saturation_power(const EmitterModel& model);
double sigma_from_saturation_power(Rate k21, Rate k23, Rate k31, double p_sat_uw);

}  // namespace photodyn::model

#endif  // PHOTODYN_MODEL_EMISSION_HPP
