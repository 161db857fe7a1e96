#include "photodyn/fitting/fit_result.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "photodyn/error.hpp"

namespace photodyn::fit {

std::size_t FitResult::index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("no fit parameter named " + name);
  return static_cast<std::size_t>(it - names.begin());
}

double FitResult::value(const std::string& name) const { return values[index(name)]; }

double FitResult::error(const std::string& name) const {
  const auto i = static_cast<Eigen::Index>(index(name));
  return std::sqrt(std::max(0.0, covariance(i, i)));
}

bool FitResult::is_identifiable(const std::string& name) const { return identifiable[index(name)]; }

bool FitResult::all_identifiable() const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!fixed[i] && !identifiable[i]) return false;
  }
  return true;
}

namespace {

double to_internal(Transform t, double v) {
  switch (t) {
    case Transform::kLog:
      if (!(v > 0.0)) throw FitError("initial value of a positive parameter must be > 0");
      return std::log(v);
    case Transform::kUnitInterval: {
      const double c = std::clamp(v, 1e-9, 1.0 - 1e-9);
      return std::log(c / (1.0 - c));
    }
    case Transform::kIdentity:
      break;
  }
  return v;
}

double to_natural(Transform t, double u) {
  switch (t) {
    case Transform::kLog:
      return std::exp(u);
    case Transform::kUnitInterval:
      return 1.0 / (1.0 + std::exp(-u));
    case Transform::kIdentity:
      break;
  }
  return u;
}

// d(natural)/d(internal)
double natural_slope(Transform t, double u) {
  switch (t) {
    case Transform::kLog:
      return std::exp(u);
    case Transform::kUnitInterval: {
      const double s = 1.0 / (1.0 + std::exp(-u));
      return s * (1.0 - s);
    }
    case Transform::kIdentity:
      break;
  }
  return 1.0;
}

}  // namespace

FitResult fit_curve(const VectorModel& model, std::span<const double> y, std::span<const double> sigma,
                    std::vector<ParameterSpec> params, const CurveFitOptions& options) {
  if (y.size() != sigma.size()) throw FitError("data and sigma lengths differ");
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) throw FitError("every sigma must be positive and finite");
  }
  const auto n_points = static_cast<Eigen::Index>(y.size());
  const std::size_t n_params = params.size();

  std::vector<std::size_t> free_index;
  for (std::size_t i = 0; i < n_params; ++i) {
    if (!params[i].fixed) free_index.push_back(i);
  }
  const auto n_free = static_cast<Eigen::Index>(free_index.size());
  if (n_points < n_free) throw FitError("fewer data points than free parameters");

  std::vector<double> natural(n_params);
  for (std::size_t i = 0; i < n_params; ++i) natural[i] = params[i].initial;
  Eigen::VectorXd x0(n_free);
  for (Eigen::Index k = 0; k < n_free; ++k) {
    const auto& p = params[free_index[k]];
    x0[k] = to_internal(p.transform, p.initial);
  }

  auto unpack = [&](const Eigen::VectorXd& x, std::vector<double>& nat) {
    for (Eigen::Index k = 0; k < n_free; ++k) {
      nat[free_index[k]] = to_natural(params[free_index[k]].transform, x[k]);
    }
  };

  Eigen::VectorXd values(n_points);
  Eigen::MatrixXd model_jac(n_points, static_cast<Eigen::Index>(n_params));
  Eigen::VectorXd inv_sigma(n_points);
  for (Eigen::Index i = 0; i < n_points; ++i) inv_sigma[i] = 1.0 / sigma[i];

  ResidualFunction residuals = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    std::vector<double> nat = natural;
    unpack(x, nat);
    const bool analytic = model(nat, values, jac != nullptr ? &model_jac : nullptr);
    for (Eigen::Index i = 0; i < n_points; ++i) r[i] = (values[i] - y[i]) * inv_sigma[i];
    if (jac == nullptr) return;
    if (analytic) {
      for (Eigen::Index k = 0; k < n_free; ++k) {
        const double slope = natural_slope(params[free_index[k]].transform, x[k]);
        jac->col(k) = model_jac.col(static_cast<Eigen::Index>(free_index[k])).cwiseProduct(inv_sigma) * slope;
      }
      return;
    }
    Eigen::VectorXd plus(n_points);
    Eigen::VectorXd minus(n_points);
    for (Eigen::Index k = 0; k < n_free; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
      Eigen::VectorXd xp = x;
      Eigen::VectorXd xm = x;
      xp[k] += h;
      xm[k] -= h;
      std::vector<double> np = natural;
      std::vector<double> nm = natural;
      unpack(xp, np);
      unpack(xm, nm);
      model(np, plus, nullptr);
      model(nm, minus, nullptr);
      jac->col(k) = (plus - minus).cwiseProduct(inv_sigma) / (2.0 * h);
    }
  };

  const LmSummary lm = levenberg_marquardt(residuals, n_points, x0, options.lm);

  FitResult out;
  out.names.reserve(n_params);
  for (const auto& p : params) out.names.push_back(p.name);
  unpack(lm.x, natural);
  out.values = natural;
  out.fixed.resize(n_params);
  for (std::size_t i = 0; i < n_params; ++i) out.fixed[i] = params[i].fixed;
  out.identifiable.assign(n_params, true);
  out.iterations = lm.iterations;
  out.converged = lm.converged;
  out.message = lm.message;
  out.chi2 = 2.0 * lm.cost;
  out.dof = static_cast<int>(n_points - n_free);
  out.reduced_chi2 = out.dof > 0 ? out.chi2 / out.dof : 0.0;
  out.covariance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_params), static_cast<Eigen::Index>(n_params));
  if (!std::isfinite(out.chi2)) {
    out.converged = false;
    return out;
  }

  // Curvature in internal coordinates; find parameters the data do not
  // constrain before inverting.
  const Eigen::MatrixXd h = lm.jacobian.transpose() * lm.jacobian;
  std::vector<bool> usable(n_free, true);
  const double max_diag = n_free > 0 ? h.diagonal().maxCoeff() : 0.0;
  for (Eigen::Index k = 0; k < n_free; ++k) {
    if (!(h(k, k) > 1e-20 * max_diag) || h(k, k) == 0.0) usable[k] = false;
  }
  auto collect = [&] {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < n_free; ++k) {
      if (usable[k]) idx.push_back(k);
    }
    return idx;
  };
  std::vector<Eigen::Index> keep = collect();
  if (!keep.empty()) {
    const auto m = static_cast<Eigen::Index>(keep.size());
    Eigen::MatrixXd hn(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        hn(i, j) = h(keep[i], keep[j]) / std::sqrt(h(keep[i], keep[i]) * h(keep[j], keep[j]));
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hn);
    for (Eigen::Index e = 0; e < m; ++e) {
      if (eig.eigenvalues()[e] > 1e-12 * eig.eigenvalues().maxCoeff()) continue;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (std::abs(eig.eigenvectors()(i, e)) > 0.1) usable[keep[i]] = false;
      }
    }
    keep = collect();
  }
  for (Eigen::Index k = 0; k < n_free; ++k) out.identifiable[free_index[k]] = usable[k];

  const auto m = static_cast<Eigen::Index>(keep.size());
  if (m > 0) {
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = h(keep[i], keep[j]);
    }
    // Invert through the scaled matrix for conditioning.
    Eigen::VectorXd d = sub.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = d.asDiagonal() * sub * d.asDiagonal();
    const Eigen::MatrixXd inv_scaled = scaled.llt().solve(Eigen::MatrixXd::Identity(m, m));
    const Eigen::MatrixXd cov_internal = d.asDiagonal() * inv_scaled * d.asDiagonal();
    const double factor = options.scale_covariance ? std::max(out.reduced_chi2, 0.0) : 1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index pi = keep[i];
      const std::size_t ni = free_index[pi];
      const double si = natural_slope(params[ni].transform, lm.x[pi]);
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::Index pj = keep[j];
        const std::size_t nj = free_index[pj];
        const double sj = natural_slope(params[nj].transform, lm.x[pj]);
        out.covariance(static_cast<Eigen::Index>(ni), static_cast<Eigen::Index>(nj)) =
            factor * si * sj * cov_internal(i, j);
      }
    }
  }
  for (Eigen::Index k = 0; k < n_free; ++k) {
    if (!usable[k]) {
      const auto i = static_cast<Eigen::Index>(free_index[k]);
      out.covariance(i, i) = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

FitResult permute_parameters(const FitResult& r, std::span<const std::size_t> order) {
  FitResult out = r;
  const auto n = static_cast<Eigen::Index>(order.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t src = order[i];
    out.names[i] = r.names[src];
    out.values[i] = r.values[src];
    out.fixed[i] = r.fixed[src];
    out.identifiable[i] = r.identifiable[src];
    for (Eigen::Index j = 0; j < n; ++j) {
      out.covariance(i, j) = r.covariance(static_cast<Eigen::Index>(src), static_cast<Eigen::Index>(order[j]));
    }
  }
  return out;
}

}  // namespace photodyn::fit
