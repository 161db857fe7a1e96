#ifndef PHOTODYN_FITTING_G2_FIT_HPP
#define PHOTODYN_FITTING_G2_FIT_HPP

#include "photodyn/correlation/histogram.hpp"
#include "photodyn/fitting/fit_result.hpp"
#include "photodyn/model/types.hpp"

namespace photodyn::fit {

// Gaussian timing response of the coincidence measurement (standard
// deviation of t_b - t_a).
struct Irf {
  double sigma_ps = 0.0;
  double sigma_ns() const { return sigma_ps * 1e-3; }
};

// exp(-|t| / decay) convolved with a unit-area Gaussian of width sigma,
// evaluated without overflow. sigma = 0 returns the bare exponential.
double smoothed_exponential(double tau_ns, double decay_ns, double sigma_ns);
// Derivative of smoothed_exponential with respect to decay_ns.
double smoothed_exponential_ddecay(double tau_ns, double decay_ns, double sigma_ns);

struct G2Value {
  double value = 0.0;
  double d_a = 0.0;
  double d_tau1 = 0.0;
  double d_tau2 = 0.0;
};

double g2_convolved(const model::G2Params& params, const Irf& irf, double tau_ns);
G2Value g2_convolved_with_gradient(const model::G2Params& params, const Irf& irf, double tau_ns);

struct G2FitOptions {
  CurveFitOptions curve;
  // Compare against the model averaged over each bin rather than sampled at
  // the bin centre.
  bool bin_average = true;
  // y = amplitude * g2 + background; both held at the ideal values unless freed.
  bool fit_amplitude = false;
  bool fit_background = false;
  double amplitude = 1.0;
  double background = 0.0;
};

// Parameters: a, tau1_ns, tau2_ns, amplitude, background. tau1 <= tau2 is
// restored after the fit by relabelling (a -> -(1 + a)). Throws FitError when
// the curvature matrix is singular (some parameter unconstrained).
FitResult fit_g2(const corr::CorrelationHistogram& hist, const Irf& irf, const model::G2Params& init,
                 const G2FitOptions& options = {});

model::G2Params g2_params_of(const FitResult& r);

// Poisson bin errors ignore that one photon takes part in many pairs, which
// for a bunched source correlates neighbouring bins and understates the
// parameter errors. This variant fits the full histogram and replaces the
// covariance by the delete-one jackknife estimate over time blocks (blocks
// must be much longer than tau2).
struct JackknifeG2Fit {
  FitResult result;       // full-data values, jackknife covariance
  FitResult poisson;      // the plain fit, for comparison
  std::vector<model::G2Params> replicates;
};

JackknifeG2Fit fit_g2_jackknife(const corr::BlockCounts& blocks, const Irf& irf, const model::G2Params& init,
                                const G2FitOptions& options = {},
                                corr::Normalization mode = corr::Normalization::kChannelRates);

// Rough starting values read off the histogram: dip recovery for tau1,
// bunching height for a and its 1/e decay for tau2.
model::G2Params estimate_g2_init(const corr::CorrelationHistogram& hist);

}  // namespace photodyn::fit

#endif  // PHOTODYN_FITTING_G2_FIT_HPP
