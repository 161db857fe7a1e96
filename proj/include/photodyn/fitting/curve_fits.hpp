#ifndef PHOTODYN_FITTING_CURVE_FITS_HPP
#define PHOTODYN_FITTING_CURVE_FITS_HPP

#include <optional>
#include <span>

#include "photodyn/fitting/fit_result.hpp"
#include "photodyn/model/limits.hpp"
#include "photodyn/model/types.hpp"

namespace photodyn::fit {

struct SaturationPoint {
  double power_uw = 0.0;
  double rate_kcps = 0.0;
  double sigma_kcps = 0.0;  // <= 0 selects unit weights with scaled covariance
};

// I = I_inf P / (P + P_sat). Parameters i_inf_kcps, p_sat_uw.
FitResult fit_saturation(std::span<const SaturationPoint> data, const CurveFitOptions& options = {});
model::SaturationParams saturation_params_of(const FitResult& r);

struct PolarizationPoint {
  double angle_deg = 0.0;
  double intensity = 0.0;
  double sigma = 0.0;  // <= 0 selects sqrt(max(I, 1))
};

struct PolarizationFit {
  FitResult result;  // i_max, i_min, theta0_deg
  double visibility = 0.0;
  double visibility_error = 0.0;
};

// I(theta) = I_min + (I_max - I_min) sin^2(theta - theta0). theta0 is
// reported in [0, 180). Constant data give visibility 0 with theta0 flagged
// unidentifiable.
PolarizationFit fit_polarization(std::span<const PolarizationPoint> scan, const CurveFitOptions& options = {});

struct DeshelvingPoint {
  double power_uw = 0.0;
  double a = 0.0;
  double sigma = 0.0;
};

struct DeshelvingFitOptions {
  CurveFitOptions curve;
  std::optional<double> init_c_uw;
  std::optional<double> init_sigma_mhz_per_uw;
};

// Fits c and the excitation efficiency sigma to bunching amplitudes a(P) with
// the extracted rates (k21, k23, k31_0, d) held fixed. Parameters c_uw,
// sigma_mhz_per_uw. With d = 0 the amplitude does not depend on c, which is
// then flagged unidentifiable.
FitResult fit_deshelving(std::span<const DeshelvingPoint> data, const model::ExtendedRates& rates,
                         const DeshelvingFitOptions& options = {});

model::EmitterModel extended_model(const model::ExtendedRates& rates, double c_uw, double sigma_mhz_per_uw);

}  // namespace photodyn::fit

#endif  // PHOTODYN_FITTING_CURVE_FITS_HPP
