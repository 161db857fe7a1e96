#include "photodyn/model/emission.hpp"

#include <cmath>
#include <numbers>

#include "photodyn/error.hpp"

namespace photodyn::model {

Populations steady_state(const RateSet& rates) {
  rates.validate();
  const double k12 = rates.k12.per_ns();
  const double k21 = rates.k21.per_ns();
  const double k23 = rates.k23.per_ns();
  const double k31 = rates.k31.per_ns();
  // Unnormalised stationary weights; their sum equals B of the g2 eigenproblem.
  const double w1 = k31 * (k21 + k23);
  const double w2 = k12 * k31;
  const double w3 = k12 * k23;
  const double total = w1 + w2 + w3;
  if (total == 0.0) {
    // No excitation and no de-shelving: the ground state is absorbing.
    return {1.0, 0.0, 0.0};
  }
  return {w1 / total, w2 / total, w3 / total};
}

double asymptotic_excited_population(const EmitterModel& model) {
  model.validate();
  return 1.0 / (1.0 + model.k23 / asymptotic_k31(model.deshelving));
}

double max_count_rate(const EmitterModel& model, const BeamConfig& beam) {
  beam.validate();
  const double n2_inf = asymptotic_excited_population(model);
  // per ns -> kcps
  return beam.eta_coll * beam.eta_qe * model.k21.per_ns() * n2_inf * 1e6;
}

double count_rate(const EmitterModel& model, const BeamConfig& beam, double power_uw) {
  beam.validate();
  model.validate();
  const Populations n = steady_state(model.rates_at(power_uw));
  return beam.eta_coll * beam.eta_qe * model.k21.per_ns() * n.n2 * 1e6;
}

double saturation_curve(const SaturationParams& sat, double power_uw) {
  if (std::isinf(power_uw)) return sat.i_inf_kcps;
  return sat.i_inf_kcps * power_uw / (power_uw + sat.p_sat_uw);
}

double intensity_from_power(const BeamConfig& beam, double power_uw) {
  beam.validate();
  // uW / um^2 = 1e-9 kW / 1e-8 cm^2 = 0.1 kW/cm^2
  const double area_um2 = std::numbers::pi * beam.waist_um * beam.waist_um;
  return 0.1 * beam.transmission * power_uw / area_um2;
}

double saturation_power(const EmitterModel& model) {
  model.validate();
  if (const auto* c = std::get_if<ConstantDeshelving>(&model.deshelving)) {
    const double k31 = c->k31.mhz();
    const double k21 = model.k21.mhz();
    const double k23 = model.k23.mhz();
    return k31 * (k21 + k23) / ((k31 + k23) * model.sigma_mhz_per_uw);
  }
  // Saturating de-shelving: the curve is not exactly of saturation form, so
  // locate the half-maximum numerically (count rate is monotone in P).
  const BeamConfig unit;
  const double half = 0.5 * max_count_rate(model, unit);
  double lo = 1e-9;
  double hi = 1.0;
  while (count_rate(model, unit, hi) < half) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    (count_rate(model, unit, mid) < half ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double sigma_from_saturation_power(Rate k21, Rate k23, Rate k31, double p_sat_uw) {
  if (!(p_sat_uw > 0.0)) throw ModelError("P_sat must be positive");
  if (!(k31.per_ns() > 0.0)) throw ModelError("k31 must be positive");
  return k31.mhz() * (k21.mhz() + k23.mhz()) / ((k31.mhz() + k23.mhz()) * p_sat_uw);
}

}  // namespace photodyn::model
