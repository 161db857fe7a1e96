#include "catch_amalgamated.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "photodyn/error.hpp"
#include "photodyn/model/emission.hpp"
#include "photodyn/model/g2.hpp"
#include "photodyn/model/presets.hpp"
#include "photodyn/sim/detector.hpp"
#include "photodyn/sim/emitter_sim.hpp"
#include "photodyn/sim/random.hpp"

using namespace photodyn;
using namespace photodyn::model;
using namespace photodyn::sim;
using Catch::Approx;

namespace {

EmitterModel two_level(double k12_mhz, double k21_mhz) {
  EmitterModel m;
  m.sigma_mhz_per_uw = k12_mhz;  // P = 1 uW gives k12
  m.k21 = Rate::mhz(k21_mhz);
  m.k23 = Rate::mhz(0.0);
  m.deshelving = ConstantDeshelving{Rate::mhz(1.0)};
  return m;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

}  // namespace

TEST_CASE("two-level waiting times follow the renewal density", "[sim]") {
  const double k12 = 0.1, k21 = 0.4;  // per ns
  const auto times = simulate_emission(two_level(100.0, 400.0), 1.0, 2e6, 11);
  REQUIRE(times.size() > 50000);
  // Waiting time is the sum of Exp(k12) and Exp(k21).
  auto cdf = [&](double t) { return 1.0 - (k21 * std::exp(-k12 * t) - k12 * std::exp(-k21 * t)) / (k21 - k12); };
  const int n_bins = 40;
  const double t_max = 60.0;
  std::vector<double> observed(n_bins + 1, 0.0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double w = times[i] - times[i - 1];
    const int k = std::min(n_bins, static_cast<int>(w / t_max * n_bins));
    observed[k] += 1.0;
  }
  const double n = static_cast<double>(times.size() - 1);
  double chi2 = 0.0;
  for (int k = 0; k <= n_bins; ++k) {
    const double lo = k * t_max / n_bins;
    const double p = k == n_bins ? 1.0 - cdf(lo) : cdf(lo + t_max / n_bins) - cdf(lo);
    chi2 += (observed[k] - n * p) * (observed[k] - n * p) / (n * p);
  }
  const boost::math::chi_squared dist(n_bins);
  CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.01);
}

TEST_CASE("mean emission rate at saturation", "[sim]") {
  const EmitterModel m = emitter3_extended();
  const double p = 40.9;
  const double duration = 1e9;
  const auto times = simulate_emission(m, p, duration, 5);
  const double lambda = m.k21.per_ns() * steady_state(m.rates_at(p)).n2;
  // Counts of a bunched source are super-Poissonian; the Fano factor follows
  // from the integral of g2 - 1.
  const G2Params g = g2_params_from_rates(m.rates_at(p));
  const double fano = 1.0 + 2.0 * lambda * (g.a * g.tau2_ns - (1.0 + g.a) * g.tau1_ns);
  const double expected = lambda * duration;
  CHECK(std::abs(static_cast<double>(times.size()) - expected) < 3.0 * std::sqrt(expected * fano));
}

TEST_CASE("zero duration produces nothing", "[sim]") {
  CHECK(simulate_emission(emitter3_extended(), 40.9, 0.0, 1).empty());
  const auto s = simulate_hbt(emitter3_extended(), 40.9, 0.0, {}, 1);
  CHECK(s.a.empty());
  CHECK(s.b.empty());
  CHECK_THROWS_AS(simulate_emission(emitter3_extended(), 40.9, -1.0, 1), ModelError);
}

TEST_CASE("time-averaged occupancy matches the steady state", "[sim]") {
  const EmitterModel m = emitter3_extended();
  const double p = 20.0;
  const Populations n = steady_state(m.rates_at(p));
  std::array<std::vector<double>, 3> fractions;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    OccupancyTally tally;
    simulate_emission(m, p, 2e7, seed, &tally);
    for (int level = 1; level <= 3; ++level) fractions[level - 1].push_back(tally.fraction(level));
  }
  const std::array<double, 3> expected{n.n1, n.n2, n.n3};
  for (int k = 0; k < 3; ++k) {
    const double se = stddev(fractions[k]) / std::sqrt(20.0);
    CHECK(std::abs(mean(fractions[k]) - expected[k]) < 3.0 * se);
  }
}

TEST_CASE("simulation is reproducible", "[sim]") {
  DetectorConfig cfg;
  cfg.eta_det = 0.3;
  cfg.jitter_sigma_ps = 200.0;
  cfg.dead_time_ns = 5.0;
  cfg.background_rate_cps = 1e4;
  const auto s1 = simulate_hbt(emitter3_extended(), 30.0, 1e6, cfg, 42);
  const auto s2 = simulate_hbt(emitter3_extended(), 30.0, 1e6, cfg, 42);
  const auto s3 = simulate_hbt(emitter3_extended(), 30.0, 1e6, cfg, 43);
  CHECK(s1.a.timestamps_ns == s2.a.timestamps_ns);
  CHECK(s1.b.timestamps_ns == s2.b.timestamps_ns);
  CHECK(s1.a.timestamps_ns != s3.a.timestamps_ns);
  CHECK_FALSE(s1.a.empty());
  CHECK_FALSE(s1.b.empty());
  CHECK(s1.a.seed == 42);
}

TEST_CASE("sub-streams are independent of each other", "[sim]") {
  // Changing the detector must not change the emission draws.
  DetectorConfig full;
  full.split_ratio = 1.0;
  const auto emissions = simulate_emission(emitter3_extended(), 30.0, 1e5, 9);
  const auto through = simulate_hbt(emitter3_extended(), 30.0, 1e5, full, 9);
  CHECK(through.a.timestamps_ns == emissions);
  DetectorConfig lossy;
  lossy.eta_det = 0.2;
  lossy.jitter_sigma_ps = 300.0;
  const auto two_step = detect(emissions, 1e5, lossy, 9);
  const auto streamed = simulate_hbt(emitter3_extended(), 30.0, 1e5, lossy, 9);
  CHECK(streamed.a.timestamps_ns == two_step.a.timestamps_ns);
  CHECK(streamed.b.timestamps_ns == two_step.b.timestamps_ns);
  CHECK(make_engine(1, Substream::kJitterA)() != make_engine(1, Substream::kJitterB)());
  CHECK(splitmix64(0) != splitmix64(1));
}

TEST_CASE("ideal detector with full split copies the input", "[sim][detect]") {
  const std::vector<double> em{0.5, 1.0, 2.0, 7.25};
  DetectorConfig cfg;
  cfg.split_ratio = 1.0;
  const auto s = detect(em, 10.0, cfg, 3);
  CHECK(s.a.timestamps_ns == em);
  CHECK(s.b.empty());
  cfg.split_ratio = 0.0;
  const auto t = detect(em, 10.0, cfg, 3);
  CHECK(t.a.empty());
  CHECK(t.b.timestamps_ns == em);
}

TEST_CASE("detection efficiency thins binomially", "[sim][detect]") {
  std::vector<double> em(1000000);
  for (std::size_t i = 0; i < em.size(); ++i) em[i] = static_cast<double>(i);
  DetectorConfig cfg;
  cfg.eta_det = 0.055;
  const auto s = detect(em, 1e6, cfg, 8);
  const double n = static_cast<double>(em.size());
  const double kept = static_cast<double>(s.a.size() + s.b.size());
  CHECK(std::abs(kept - 0.055 * n) < 3.0 * std::sqrt(n * 0.055 * 0.945));
  // The split of the kept photons is binomial too.
  CHECK(std::abs(static_cast<double>(s.a.size()) - 0.5 * kept) < 3.0 * std::sqrt(kept * 0.25));
}

TEST_CASE("split ratio", "[sim][detect]") {
  std::vector<double> em(200000);
  for (std::size_t i = 0; i < em.size(); ++i) em[i] = static_cast<double>(i);
  DetectorConfig cfg;
  cfg.split_ratio = 0.3;
  const auto s = detect(em, 2e5, cfg, 4);
  const double n = static_cast<double>(em.size());
  CHECK(std::abs(static_cast<double>(s.a.size()) - 0.3 * n) < 3.0 * std::sqrt(n * 0.21));
  CHECK(s.a.size() + s.b.size() == em.size());
}

TEST_CASE("pair jitter adds in quadrature", "[sim][detect]") {
  // Photon pairs emitted at the same instant, far apart from the next pair.
  std::vector<double> em;
  for (int i = 0; i < 100000; ++i) {
    em.push_back(100.0 + 1000.0 * i);
    em.push_back(100.0 + 1000.0 * i);
  }
  DetectorConfig cfg;
  cfg.jitter_sigma_ps = 354.0;
  const auto s = detect(em, 1e8, cfg, 21);
  std::vector<double> diffs;
  std::size_t j = 0;
  for (double ta : s.a.timestamps_ns) {
    while (j < s.b.size() && s.b.timestamps_ns[j] < ta - 50.0) ++j;
    if (j < s.b.size() && std::abs(s.b.timestamps_ns[j] - ta) < 50.0) diffs.push_back(s.b.timestamps_ns[j] - ta);
  }
  REQUIRE(diffs.size() > 40000);
  const double sd = stddev(diffs) * 1e3;
  const double expected = 354.0 * std::sqrt(2.0);
  // Standard error of a sample standard deviation is sigma / sqrt(2 (n - 1)).
  CHECK(std::abs(sd - expected) < 3.0 * expected / std::sqrt(2.0 * (diffs.size() - 1)));
  CHECK(std::abs(mean(diffs)) * 1e3 < 3.0 * expected / std::sqrt(static_cast<double>(diffs.size())));
}

TEST_CASE("dead time and ordering", "[sim][detect]") {
  DetectorConfig cfg;
  cfg.dead_time_ns = 20.0;
  cfg.jitter_sigma_ps = 500.0;
  const auto s = simulate_hbt(emitter3_extended(), 100.0, 1e6, cfg, 17);
  for (const PhotonStream* st : {&s.a, &s.b}) {
    REQUIRE(st->size() > 100);
    for (std::size_t i = 1; i < st->size(); ++i) CHECK(st->timestamps_ns[i] - st->timestamps_ns[i - 1] >= 20.0);
    CHECK(st->timestamps_ns.front() >= 0.0);
    CHECK(st->timestamps_ns.back() <= 1e6);
  }

  std::vector<double> ts{5.0, 1.0, 1.0, 3.0, -2.0, 12.0, 3.5};
  finalize_channel(ts, 10.0, 1.0);
  CHECK(ts == std::vector<double>{1.0, 3.0, 5.0});
}

TEST_CASE("background adds a uniform rate", "[sim][detect]") {
  DetectorConfig cfg;
  cfg.background_rate_cps = 1e6;  // 1e-3 per ns
  const std::vector<double> none;
  const auto s = detect(none, 1e8, cfg, 2);
  const double expected = 1e5;
  CHECK(std::abs(static_cast<double>(s.a.size()) - expected) < 3.0 * std::sqrt(expected));
  CHECK(std::abs(static_cast<double>(s.b.size()) - expected) < 3.0 * std::sqrt(expected));
  CHECK(s.a.rate_cps() == Approx(static_cast<double>(s.a.size()) * 10.0));
}

TEST_CASE("detector validation", "[sim][detect]") {
  const std::vector<double> em{1.0};
  DetectorConfig cfg;
  cfg.eta_det = 0.0;
  CHECK_THROWS_AS(detect(em, 2.0, cfg, 1), ModelError);
  cfg = {};
  cfg.split_ratio = 1.5;
  CHECK_THROWS_AS(detect(em, 2.0, cfg, 1), ModelError);
  cfg = {};
  cfg.jitter_sigma_ps = -1.0;
  CHECK_THROWS_AS(detect(em, 2.0, cfg, 1), ModelError);
  cfg = {};
  const std::vector<double> unsorted{2.0, 1.0};
  CHECK_THROWS_AS(detect(unsorted, 3.0, cfg, 1), DataError);
}
