#ifndef PHOTODYN_MODEL_G2_HPP
#define PHOTODYN_MODEL_G2_HPP

#include <span>
#include <vector>

#include "photodyn/model/types.hpp"

namespace photodyn::model {

double g2_analytic(const G2Params& params, double tau_ns);

// Closed-form (a, tau1, tau2) of the three-level model. tau1 <= tau2 always.
// Throws ModelError when the rate matrix has non-real eigenvalues or when
// k31 vanishes.
G2Params g2_params_from_rates(const RateSet& rates);

// One G2Params per power, using k12 = sigma P and the model's de-shelving law.
std::vector<G2Params> predict_power_dependence(const EmitterModel& model,
                                               std::span<const double> powers_uw);

// Logarithmic power grid [lo, hi] with the given number of points per decade,
// both ends included.
std::vector<double> log_power_grid(double lo_uw, double hi_uw, int points_per_decade);

}  // namespace photodyn::model

#endif  // PHOTODYN_MODEL_G2_HPP
