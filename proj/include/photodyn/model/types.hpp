#ifndef PHOTODYN_MODEL_TYPES_HPP
#define PHOTODYN_MODEL_TYPES_HPP

#include <variant>

#include "photodyn/model/units.hpp"

namespace photodyn::model {

// Rate coefficients of the three-level emitter: ground (1), radiative
// excited state (2) and shelving state (3).
struct RateSet {
  Rate k12;  // excitation 1 -> 2
  Rate k21;  // radiative decay 2 -> 1
  Rate k23;  // shelving 2 -> 3
  Rate k31;  // de-shelving 3 -> 1

  // Throws ModelError for negative rates or a non-positive k21.
  void validate() const;
};

struct ConstantDeshelving {
  Rate k31;
};

// k31(P) = d * P / (P + c) + k31_0
struct SaturatingDeshelving {
  Rate k31_0;
  Rate d;
  double c_uw = 0.0;
};

using DeshelvingLaw = std::variant<ConstantDeshelving, SaturatingDeshelving>;

void validate(const DeshelvingLaw& law);

// Rate of de-shelving at cw excitation power P. Constant laws ignore P.
Rate effective_k31(const DeshelvingLaw& law, double power_uw);

// De-shelving rate in the limit of infinite excitation power.
Rate asymptotic_k31(const DeshelvingLaw& law);

struct EmitterModel {
  double sigma_mhz_per_uw = 0.0;  // k12 = sigma * P
  Rate k21;
  Rate k23;
  DeshelvingLaw deshelving = ConstantDeshelving{};

  void validate() const;
  Rate excitation_rate(double power_uw) const { return Rate::mhz(sigma_mhz_per_uw * power_uw); }
  RateSet rates_at(double power_uw) const;
};

// Phenomenological parameters of the bunching/antibunching curve
// g2(t) = 1 - (1 + a) exp(-|t|/tau1) + a exp(-|t|/tau2).
struct G2Params {
  double a = 0.0;
  double tau1_ns = 0.0;
  double tau2_ns = 0.0;

  void validate() const;
};

struct SaturationParams {
  double i_inf_kcps = 0.0;
  double p_sat_uw = 0.0;

  void validate() const;
};

struct BeamConfig {
  double waist_um = 0.51;     // 1/e^2 radius of the focus
  double transmission = 0.70;  // objective power transmission
  double eta_coll = 1.0;
  double eta_qe = 1.0;

  void validate() const;
};

struct Populations {
  double n1 = 1.0;
  double n2 = 0.0;
  double n3 = 0.0;
};

}  // namespace photodyn::model

#endif  // PHOTODYN_MODEL_TYPES_HPP
