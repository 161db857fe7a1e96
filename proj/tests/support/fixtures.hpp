#ifndef PHOTODYN_TESTS_FIXTURES_HPP
#define PHOTODYN_TESTS_FIXTURES_HPP

#include <cstdint>
#include <vector>

#include "photodyn/correlation/histogram.hpp"
#include "photodyn/fitting/curve_fits.hpp"
#include "photodyn/fitting/g2_fit.hpp"
#include "photodyn/model/limits.hpp"
#include "photodyn/model/types.hpp"
#include "photodyn/spectral/metrics.hpp"

namespace fixtures {

using photodyn::spectral::Spectrum;

// Room-temperature spectrum of emitter `id`: Lorentzian ZPL with the tabulated
// centre and width plus a Gaussian phonon band 25 nm to the red. The band area
// is set from the closed-form integrals so that the default ZPL window holds
// exactly the tabulated DW of the emission inside rt_total_window().
Spectrum rt_spectrum(int id, double step_nm = 0.01);
photodyn::spectral::WavelengthWindow rt_total_window();

// Emitter (5) at 30 K: the four fine-structure Lorentzians, 739.19 nm tallest,
// with Poisson noise on a flat background.
Spectrum cold_spectrum(std::uint64_t seed, double peak_counts = 4000.0, double background = 40.0);

// Noise-free sum of Lorentzians on a line, for exact-recovery checks.
Spectrum lorentzian_spectrum(const std::vector<photodyn::fit::LinePeak>& peaks, double lo_nm, double hi_nm,
                             double step_nm, double offset = 0.0, double slope = 0.0);

std::vector<photodyn::fit::SaturationPoint> saturation_scan(double i_inf_kcps, double p_sat_uw,
                                                            const std::vector<double>& powers_uw,
                                                            double rel_noise, std::uint64_t seed);

std::vector<photodyn::fit::PolarizationPoint> polarization_scan(double visibility, double theta0_deg,
                                                                double mean_counts, int points,
                                                                std::uint64_t seed);

// a(P) sampled from the model, with Gaussian noise of the given sigma (0 for
// exact values).
std::vector<photodyn::fit::DeshelvingPoint> bunching_series(const photodyn::model::EmitterModel& model,
                                                            const std::vector<double>& powers_uw, double sigma,
                                                            std::uint64_t seed);

// Histogram with Poisson counts around the bin-averaged convolved model.
// `pairs_per_ns` is the expected coincidence count per ns of bin width where
// g2 = 1.
photodyn::corr::CorrelationHistogram synthetic_histogram(const photodyn::model::G2Params& p,
                                                         const photodyn::fit::Irf& irf,
                                                         const photodyn::corr::BinLayout& layout,
                                                         double pairs_per_ns, std::uint64_t seed);

// Poisson process on [0, T] (rate in events per ns).
std::vector<double> poisson_times(double rate_per_ns, double duration_ns, std::uint64_t seed);

// Brute-force reference pair counter.
std::vector<std::uint64_t> brute_force_pairs(const std::vector<double>& a, const std::vector<double>& b,
                                             const photodyn::corr::BinLayout& layout);

// Central-difference derivative.
template <class F>
double numeric_derivative(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace fixtures

#endif  // PHOTODYN_TESTS_FIXTURES_HPP
