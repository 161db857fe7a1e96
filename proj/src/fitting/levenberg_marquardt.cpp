#include "photodyn/fitting/levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>

namespace photodyn::fit {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

// Small damped steps also happen far from the optimum when the damping is
// large. Accept them as convergence only if the undamped Gauss-Newton step
// promises no worthwhile decrease either.
bool gauss_newton_done(const Eigen::MatrixXd& jtj, const Eigen::VectorXd& grad, const Eigen::VectorXd& x,
                       double cost, const LmOptions& options) {
  Eigen::MatrixXd system = jtj;
  const double floor = 1e-14 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
  system.diagonal().array() += floor;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  const Eigen::VectorXd step = ldlt.solve(-grad);
  if (ldlt.info() != Eigen::Success || !all_finite(step)) return true;
  const double predicted = -0.5 * grad.dot(step);
  return predicted <= options.cost_tolerance * std::max(cost, 1e-300) ||
         step.norm() <= options.step_tolerance * (x.norm() + options.step_tolerance);
}

}  // namespace

LmSummary levenberg_marquardt(const ResidualFunction& residual_fn, Eigen::Index num_residuals,
                              Eigen::VectorXd x0, const LmOptions& options) {
  LmSummary s;
  const Eigen::Index n = x0.size();
  s.x = std::move(x0);
  s.residuals.resize(num_residuals);
  s.jacobian.resize(num_residuals, n);
  residual_fn(s.x, s.residuals, &s.jacobian);
  if (!all_finite(s.residuals) || !s.jacobian.allFinite()) {
    s.message = "non-finite residuals at the initial point";
    return s;
  }
  s.cost = 0.5 * s.residuals.squaredNorm();

  if (n == 0) {
    s.converged = true;
    s.message = "no free parameters";
    return s;
  }

  Eigen::MatrixXd jtj = s.jacobian.transpose() * s.jacobian;
  Eigen::VectorXd grad = s.jacobian.transpose() * s.residuals;
  double damping = options.initial_damping * std::max(jtj.diagonal().maxCoeff(), 1e-300);
  double growth = 2.0;

  Eigen::VectorXd trial_r(num_residuals);
  Eigen::MatrixXd trial_j(num_residuals, n);

  for (s.iterations = 0; s.iterations < options.max_iterations;) {
    if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      s.converged = true;
      s.message = "gradient below tolerance";
      return s;
    }
    if (s.cost <= 1e-300) {
      s.converged = true;
      s.message = "zero residual";
      return s;
    }

    Eigen::VectorXd scale = jtj.diagonal();
    const double floor = 1e-12 * std::max(scale.maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < n; ++i) scale[i] = std::max(scale[i], floor);

    Eigen::MatrixXd system = jtj;
    system.diagonal() += damping * scale;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    Eigen::VectorXd step = ldlt.solve(-grad);

    bool accepted = false;
    if (ldlt.info() == Eigen::Success && all_finite(step)) {
      const Eigen::VectorXd trial_x = s.x + step;
      residual_fn(trial_x, trial_r, nullptr);
      if (all_finite(trial_r)) {
        const double trial_cost = 0.5 * trial_r.squaredNorm();
        const double predicted = 0.5 * step.dot(damping * scale.cwiseProduct(step) - grad);
        const double actual = s.cost - trial_cost;
        if (actual > 0.0 && predicted > 0.0) {
          accepted = true;
          ++s.iterations;
          const double rho = actual / predicted;
          damping *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
          growth = 2.0;

          const bool small_step = step.norm() <= options.step_tolerance * (s.x.norm() + options.step_tolerance);
          const bool small_gain = actual <= options.cost_tolerance * s.cost;
          s.x = trial_x;
          residual_fn(s.x, s.residuals, &s.jacobian);
          s.cost = 0.5 * s.residuals.squaredNorm();
          jtj = s.jacobian.transpose() * s.jacobian;
          grad = s.jacobian.transpose() * s.residuals;
          if ((small_step || small_gain) && gauss_newton_done(jtj, grad, s.x, s.cost, options)) {
            s.converged = true;
            s.message = small_step ? "relative step below tolerance" : "relative cost decrease below tolerance";
            return s;
          }
        }
      }
    }
    if (!accepted) {
      damping *= growth;
      growth *= 2.0;
      if (!std::isfinite(damping) || damping > 1e30 * std::max(jtj.diagonal().maxCoeff(), 1e-300)) {
        // No descent direction left at machine precision: we sit at the
        // minimum unless the gradient is still large.
        s.converged = grad.norm() <= 1e-8 * std::max(1.0, std::sqrt(2.0 * s.cost));
        s.message = s.converged ? "no further decrease possible" : "damping diverged";
        return s;
      }
    }
  }
  s.message = "maximum iterations reached";
  return s;
}

}  // namespace photodyn::fit
