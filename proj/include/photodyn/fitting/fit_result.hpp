#ifndef PHOTODYN_FITTING_FIT_RESULT_HPP
#define PHOTODYN_FITTING_FIT_RESULT_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "photodyn/fitting/levenberg_marquardt.hpp"

namespace photodyn::fit {

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> values;
  Eigen::MatrixXd covariance;  // natural units; zero rows/columns for fixed parameters
  std::vector<bool> fixed;
  std::vector<bool> identifiable;
  double chi2 = 0.0;
  double reduced_chi2 = 0.0;
  int dof = 0;
  int iterations = 0;
  bool converged = false;
  std::string message;

  std::size_t index(const std::string& name) const;  // throws std::out_of_range
  double value(const std::string& name) const;
  double error(const std::string& name) const;
  bool is_identifiable(const std::string& name) const;
  bool all_identifiable() const;
};

// Internal coordinate used by the optimiser for each parameter. Log keeps a
// parameter positive; unit-interval maps through a logistic function.
enum class Transform { kIdentity, kLog, kUnitInterval };

struct ParameterSpec {
  std::string name;
  double initial = 0.0;
  Transform transform = Transform::kIdentity;
  bool fixed = false;
};

// Evaluates the model at every data point for natural parameter values.
// Returns true if `jacobian` (points x parameters, natural units) was filled;
// returning false selects central finite differences.
using VectorModel =
    std::function<bool(std::span<const double> params, Eigen::VectorXd& values, Eigen::MatrixXd* jacobian)>;

struct CurveFitOptions {
  LmOptions lm;
  // Multiply the covariance by the reduced chi^2 (use when sigmas are only
  // relative weights).
  bool scale_covariance = false;
};

// Weighted least squares of y against the model with per-point sigma.
FitResult fit_curve(const VectorModel& model, std::span<const double> y, std::span<const double> sigma,
                    std::vector<ParameterSpec> params, const CurveFitOptions& options = {});

// Reorders parameters (values, covariance, flags) to the given index order.
FitResult permute_parameters(const FitResult& r, std::span<const std::size_t> order);

}  // namespace photodyn::fit

#endif  // PHOTODYN_FITTING_FIT_RESULT_HPP
