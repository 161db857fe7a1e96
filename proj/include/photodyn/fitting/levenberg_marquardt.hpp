#ifndef PHOTODYN_FITTING_LEVENBERG_MARQUARDT_HPP
#define PHOTODYN_FITTING_LEVENBERG_MARQUARDT_HPP

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace photodyn::fit {

// Fills the residual vector at x. When `jacobian` is non-null it must also be
// filled with d(residual)/dx.
using ResidualFunction =
    std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& residuals, Eigen::MatrixXd* jacobian)>;

struct LmOptions {
  int max_iterations = 500;
  double step_tolerance = 1e-8;   // relative parameter step
  double cost_tolerance = 1e-10;  // relative cost decrease of an accepted step
  double gradient_tolerance = 1e-16;
  double initial_damping = 1e-3;
};

struct LmSummary {
  Eigen::VectorXd x;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  double cost = 0.0;  // 0.5 * |r|^2
  int iterations = 0;
  bool converged = false;
  std::string message;
};

// Damped Gauss-Newton with Marquardt diagonal scaling and the gain-ratio
// damping update of Nielsen. Minimises 0.5 |r(x)|^2.
LmSummary levenberg_marquardt(const ResidualFunction& residual_fn, Eigen::Index num_residuals,
                              Eigen::VectorXd x0, const LmOptions& options = {});

}  // namespace photodyn::fit

#endif  // PHOTODYN_FITTING_LEVENBERG_MARQUARDT_HPP
