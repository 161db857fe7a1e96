#include "photodyn/model/types.hpp"

#include <cmath>
#include <string>

#include "photodyn/error.hpp"

namespace photodyn::model {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ModelError(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void RateSet::validate() const {
  for (auto [name, r] : {std::pair{"k12", k12}, {"k21", k21}, {"k23", k23}, {"k31", k31}}) {
    require(finite(r.per_ns()) && r.per_ns() >= 0.0, std::string(name) + " must be a non-negative rate");
  }
  require(k21.per_ns() > 0.0, "k21 must be positive");
}

void validate(const DeshelvingLaw& law) {
  if (const auto* c = std::get_if<ConstantDeshelving>(&law)) {
    require(finite(c->k31.per_ns()) && c->k31.per_ns() > 0.0, "k31 must be positive");
    return;
  }
  const auto& s = std::get<SaturatingDeshelving>(law);
  require(finite(s.k31_0.per_ns()) && s.k31_0.per_ns() > 0.0, "k31_0 must be positive");
  require(finite(s.d.per_ns()) && s.d.per_ns() >= 0.0, "d must be non-negative");
  require(finite(s.c_uw) && s.c_uw > 0.0, "c must be positive");
}

Rate effective_k31(const DeshelvingLaw& law, double power_uw) {
  if (const auto* c = std::get_if<ConstantDeshelving>(&law)) return c->k31;
  const auto& s = std::get<SaturatingDeshelving>(law);
  if (std::isinf(power_uw)) return s.k31_0 + s.d;
  return s.d * (power_uw / (power_uw + s.c_uw)) + s.k31_0;
}

Rate asymptotic_k31(const DeshelvingLaw& law) {
  if (const auto* c = std::get_if<ConstantDeshelving>(&law)) return c->k31;
  const auto& s = std::get<SaturatingDeshelving>(law);
  return s.k31_0 + s.d;
}

void EmitterModel::validate() const {
  require(finite(sigma_mhz_per_uw) && sigma_mhz_per_uw > 0.0, "sigma must be positive");
  require(finite(k21.per_ns()) && k21.per_ns() > 0.0, "k21 must be positive");
  require(finite(k23.per_ns()) && k23.per_ns() >= 0.0, "k23 must be non-negative");
  model::validate(deshelving);
}

RateSet EmitterModel::rates_at(double power_uw) const {
  if (!(power_uw >= 0.0)) throw ModelError("excitation power must be non-negative");
  return RateSet{excitation_rate(power_uw), k21, k23, effective_k31(deshelving, power_uw)};
}

void G2Params::validate() const {
  require(finite(a) && a >= 0.0, "a must be non-negative");
  require(finite(tau1_ns) && tau1_ns > 0.0, "tau1 must be positive");
  require(finite(tau2_ns) && tau2_ns > 0.0, "tau2 must be positive");
  require(tau1_ns <= tau2_ns, "tau1 must not exceed tau2");
}

void SaturationParams::validate() const {
  require(finite(i_inf_kcps) && i_inf_kcps > 0.0, "I_inf must be positive");
  require(finite(p_sat_uw) && p_sat_uw > 0.0, "P_sat must be positive");
}

void BeamConfig::validate() const {
  require(finite(waist_um) && waist_um > 0.0, "waist must be positive");
  require(finite(transmission) && transmission > 0.0 && transmission <= 1.0,
          "transmission must lie in (0, 1]");
  require(eta_coll >= 0.0 && eta_coll <= 1.0, "eta_coll must lie in [0, 1]");
  require(eta_qe >= 0.0 && eta_qe <= 1.0, "eta_qe must lie in [0, 1]");
}

}  // namespace photodyn::model
