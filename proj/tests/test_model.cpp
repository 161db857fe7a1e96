#include "catch_amalgamated.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <random>

#include "photodyn/error.hpp"
#include "photodyn/model/emission.hpp"
#include "photodyn/model/g2.hpp"
#include "photodyn/model/limits.hpp"
#include "photodyn/model/presets.hpp"

using namespace photodyn;
using namespace photodyn::model;
using Catch::Approx;

namespace {

// Rate matrix in ns^-1 acting on (n1, n2, n3).
Eigen::Matrix3d rate_matrix(const RateSet& r) {
  const double k12 = r.k12.per_ns(), k21 = r.k21.per_ns(), k23 = r.k23.per_ns(), k31 = r.k31.per_ns();
  Eigen::Matrix3d m;
  m << -k12, k21, k31,
       k12, -(k21 + k23), 0.0,
       0.0, k23, -k31;
  return m;
}

// g2(tau) = n2(tau | n(0) = e1) / n2(inf), by matrix exponential.
double g2_oracle(const RateSet& r, double tau_ns) {
  const Eigen::Matrix3d m = rate_matrix(r);
  const Eigen::Vector3d n = (m * std::abs(tau_ns)).exp() * Eigen::Vector3d(1.0, 0.0, 0.0);
  const Eigen::Vector3d inf = (m * 1e7).exp() * Eigen::Vector3d(1.0, 0.0, 0.0);
  return n[1] / inf[1];
}

RateSet rates(double k12, double k21, double k23, double k31) {
  return {Rate::mhz(k12), Rate::mhz(k21), Rate::mhz(k23), Rate::mhz(k31)};
}

RateSet random_rates(std::mt19937_64& rng) {
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
  };
  return rates(log_uniform(0.1, 2000.0), log_uniform(50.0, 1500.0), log_uniform(0.05, 30.0), log_uniform(0.01, 10.0));
}

// Polynomial through (x_i, y_i) evaluated at x = 0.
double extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != i) w *= (0.0 - x[j]) / (x[i] - x[j]);
    }
    sum += w * y[i];
  }
  return sum;
}

}  // namespace

TEST_CASE("g2_analytic basic values", "[model][g2]") {
  CHECK(g2_analytic({0.0, 2.0, 100.0}, 0.0) == 0.0);
  CHECK(g2_analytic({3.0, 1.0, 50.0}, 0.0) == Approx(0.0).margin(1e-15));
  const G2Params p{1.7, 1.3, 240.0};
  for (double t : {0.1, 1.0, 10.0, 300.0}) CHECK(g2_analytic(p, t) == g2_analytic(p, -t));
  CHECK(std::abs(g2_analytic(p, 50.0 * p.tau2_ns) - 1.0) < 1e-9);
}

TEST_CASE("emitter 1 bunching exceeds ten", "[model][g2]") {
  const auto m = emitter1_simple();
  const auto hp = g2_params_from_rates(m.rates_at(1e4));
  CHECK(hp.a > 9.5);
  const G2Params p{10.0, hp.tau1_ns, hp.tau2_ns};
  double peak = 0.0;
  for (double t = p.tau1_ns; t < 5.0 * p.tau2_ns; t *= 1.05) peak = std::max(peak, g2_analytic(p, t));
  CHECK(peak > 10.0);
  CHECK(g2_analytic(p, 5.0 * p.tau2_ns) > 1.0);
}

TEST_CASE("g2_params_from_rates matches matrix exponential", "[model][g2][oracle]") {
  const RateSet r = rates(0.1, 564.0, 1.4, 0.14);
  const auto p = g2_params_from_rates(r);
  CHECK(p.tau1_ns == Approx(1000.0 / (0.1 + 564.0 + 1.4)).epsilon(1e-4));
  CHECK(p.a < 1e-2);
  for (double t : {0.0, 0.3, 1.0, 3.0, 30.0, 1000.0, 1e4}) {
    CHECK(g2_analytic(p, t) == Approx(g2_oracle(r, t)).margin(1e-10));
  }
  const RateSet e3 = rates(200.0, 469.0, 6.7, 5.0);
  const auto q = g2_params_from_rates(e3);
  for (double t : {0.0, 0.5, 2.0, 20.0, 200.0, 800.0}) {
    CHECK(g2_analytic(q, t) == Approx(g2_oracle(e3, t)).margin(1e-10));
  }
}

TEST_CASE("bunching amplitude equals the textbook expression", "[model][g2]") {
  // Less cancellation-prone rates, where the literal formula is accurate.
  for (const RateSet& r : {rates(300.0, 469.0, 6.7, 5.0), rates(50.0, 120.0, 20.0, 8.0), rates(1000.0, 564.0, 1.4, 0.14)}) {
    const auto p = g2_params_from_rates(r);
    const double k31 = r.k31.per_ns();
    const double literal = (1.0 - p.tau2_ns * k31) / (k31 * (p.tau2_ns - p.tau1_ns));
    CHECK(p.a == Approx(literal).epsilon(1e-9));
  }
}

TEST_CASE("two-level limit", "[model][g2]") {
  const auto p = g2_params_from_rates(rates(30.0, 400.0, 0.0, 2.0));
  CHECK(p.a == 0.0);
  CHECK(p.tau1_ns == Approx(1000.0 / 430.0).epsilon(1e-12));
}

TEST_CASE("g2_params_from_rates errors", "[model][g2]") {
  CHECK_THROWS_AS(g2_params_from_rates(rates(10.0, 400.0, 5.0, 0.0)), ModelError);
  // Comparable rates around the 1 -> 2 -> 3 -> 1 cycle give complex eigenvalues.
  CHECK_THROWS_AS(g2_params_from_rates(rates(100.0, 1.0, 100.0, 100.0)), ModelError);
  CHECK_THROWS_AS(g2_params_from_rates(rates(-1.0, 400.0, 5.0, 1.0)), ModelError);
}

TEST_CASE("random rate sets: ordering, eigenvalues and populations", "[model][property]") {
  std::mt19937_64 rng(20240611);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const RateSet r = random_rates(rng);
    const Populations n = steady_state(r);
    CHECK(std::abs(n.n1 + n.n2 + n.n3 - 1.0) < 1e-12);
    CHECK((n.n1 >= 0.0 && n.n1 <= 1.0 && n.n2 >= 0.0 && n.n2 <= 1.0 && n.n3 >= 0.0 && n.n3 <= 1.0));
    G2Params p;
    try {
      p = g2_params_from_rates(r);
    } catch (const ModelError&) {
      continue;
    }
    ++checked;
    CHECK(p.tau1_ns <= p.tau2_ns);
    CHECK(p.a >= 0.0);
    CHECK(g2_analytic(p, 0.0) == Approx(0.0).margin(1e-12));
    if (i % 50 == 0) {
      Eigen::EigenSolver<Eigen::Matrix3d> es(rate_matrix(r));
      std::vector<double> mags;
      for (int k = 0; k < 3; ++k) mags.push_back(std::abs(es.eigenvalues()[k].real()));
      std::sort(mags.begin(), mags.end());
      CHECK(1.0 / p.tau1_ns == Approx(mags[2]).epsilon(1e-10));
      CHECK(1.0 / p.tau2_ns == Approx(mags[1]).epsilon(1e-9));
      int zero = 0;
      for (int k = 1; k < 3; ++k) {
        if (std::abs(es.eigenvalues()[k].real()) < std::abs(es.eigenvalues()[zero].real())) zero = k;
      }
      const Eigen::Vector3d null = es.eigenvectors().col(zero).real();
      CHECK(n.n2 == Approx(null[1] / null.sum()).epsilon(1e-9));
    }
  }
  CHECK(checked > 9000);
}

TEST_CASE("effective_k31", "[model]") {
  const DeshelvingLaw sat = SaturatingDeshelving{Rate::mhz(0.5), Rate::mhz(4.55), 98.1};
  CHECK(effective_k31(sat, 0.0).mhz() == Approx(0.5));
  CHECK(effective_k31(sat, 1e12).mhz() == Approx(5.05).epsilon(1e-9));
  CHECK(asymptotic_k31(sat).mhz() == Approx(5.05));
  CHECK(effective_k31(ConstantDeshelving{Rate::mhz(0.14)}, 123.0).mhz() == Approx(0.14));
  CHECK_THROWS_AS(validate(DeshelvingLaw{SaturatingDeshelving{Rate::mhz(0.5), Rate::mhz(1.0), 0.0}}), ModelError);
}

TEST_CASE("simple rate extraction", "[model][limits]") {
  // Limits derived by inverting the extraction formulas for the quoted rates.
  auto limits_for = [](double k21, double k23, double k31) {
    return SimpleLimits{k23 / k31, 1e3 / (k23 + k31), 1e3 / (k21 + k23)};
  };
  const auto e1 = rates_from_limits_simple(limits_for(564.0, 1.4, 0.14));
  CHECK(e1.k21.mhz() == Approx(564.0).epsilon(1e-12));
  CHECK(e1.k23.mhz() == Approx(1.4).epsilon(1e-12));
  CHECK(e1.k31.mhz() == Approx(0.14).epsilon(1e-12));
  const auto e3 = rates_from_limits_simple(limits_for(469.0, 6.7, 5.0));
  CHECK(e3.k21.mhz() == Approx(469.0).epsilon(1e-12));
  CHECK(e3.k23.mhz() == Approx(6.7).epsilon(1e-12));
  CHECK(e3.k31.mhz() == Approx(5.0).epsilon(1e-12));

  const auto two = rates_from_limits_simple({0.0, 500.0, 2.0});
  CHECK(two.k23.mhz() == 0.0);
  CHECK(two.k31.mhz() == Approx(2.0));
  CHECK(two.k21.mhz() == Approx(500.0));

  CHECK_THROWS_AS(rates_from_limits_simple({10.0, 1.0, 10.0}), ModelError);
}

TEST_CASE("extended rate extraction", "[model][limits]") {
  const auto lim = analytic_limits(emitter3_extended());
  const auto r = rates_from_limits_extended(lim);
  CHECK(r.k21.mhz() == Approx(469.48).epsilon(1e-12));
  CHECK(r.k23.mhz() == Approx(6.72).epsilon(1e-12));
  CHECK(r.k31_0.mhz() == Approx(0.50).epsilon(1e-12));
  CHECK(r.d.mhz() == Approx(4.55).epsilon(1e-12));

  // d = 0 reduces to the constant model with k31 = 1 / tau2(0).
  EmitterModel flat = emitter3_extended();
  flat.deshelving = SaturatingDeshelving{Rate::mhz(2.0), Rate::mhz(0.0), 50.0};
  const auto rf = rates_from_limits_extended(analytic_limits(flat));
  CHECK(rf.d.mhz() == Approx(0.0).margin(1e-12));
  const auto rs = rates_from_limits_simple(to_simple(analytic_limits(flat)));
  CHECK(rf.k23.mhz() == Approx(rs.k23.mhz()).epsilon(1e-12));
  CHECK(rf.k31_0.mhz() == Approx(rs.k31.mhz()).epsilon(1e-12));

  CHECK_THROWS_AS(rates_from_limits_extended({1.0, 2.0, 100.0, 500.0}), ModelError);
}

TEST_CASE("extended round trip through predicted g2 parameters", "[model][limits]") {
  const EmitterModel m = emitter3_extended();
  const double p_zero = 1e-9;
  const double p_inf = 1e13;
  const G2Params g0 = g2_params_from_rates(m.rates_at(p_zero));
  const G2Params ginf = g2_params_from_rates(m.rates_at(p_inf));
  const auto r = rates_from_limits_extended({ginf.a, g0.tau1_ns, g0.tau2_ns, ginf.tau2_ns});
  CHECK(r.k21.mhz() == Approx(469.48).epsilon(1e-6));
  CHECK(r.k23.mhz() == Approx(6.72).epsilon(1e-6));
  CHECK(r.k31_0.mhz() == Approx(0.50).epsilon(1e-6));
  CHECK(r.d.mhz() == Approx(4.55).epsilon(1e-6));
}

TEST_CASE("forward-inverse consistency over a k12 sweep", "[model][limits][property]") {
  std::mt19937_64 rng(77);
  int tested = 0;
  for (int trial = 0; trial < 200 && tested < 50; ++trial) {
    const RateSet base = random_rates(rng);
    if (!(base.k21.mhz() + base.k23.mhz() > base.k31.mhz())) continue;
    std::vector<double> grid;
    for (int i = 0; i <= 8 * 7; ++i) grid.push_back(1e-3 * std::pow(10.0, i / 7.0));  // 1e-3 .. 1e5 MHz
    std::vector<G2Params> ps;
    try {
      for (double k12 : grid) ps.push_back(g2_params_from_rates({Rate::mhz(k12), base.k21, base.k23, base.k31}));
    } catch (const ModelError&) {
      continue;
    }
    ++tested;
    // High end: polynomial in 1/k12 through the top four points; low end: in k12.
    std::vector<double> xh, ah, th, xl, tl;
    for (std::size_t i = ps.size() - 4; i < ps.size(); ++i) {
      xh.push_back(1.0 / grid[i]);
      ah.push_back(ps[i].a);
      th.push_back(ps[i].tau2_ns);
    }
    for (std::size_t i = 0; i < 4; ++i) {
      xl.push_back(grid[i]);
      tl.push_back(ps[i].tau1_ns);
    }
    const auto r = rates_from_limits_simple({extrapolate_to_zero(xh, ah), extrapolate_to_zero(xh, th), extrapolate_to_zero(xl, tl)});
    CHECK(r.k21.mhz() == Approx(base.k21.mhz()).epsilon(1e-4));
    CHECK(r.k23.mhz() == Approx(base.k23.mhz()).epsilon(1e-4));
    CHECK(r.k31.mhz() == Approx(base.k31.mhz()).epsilon(1e-4));
  }
  CHECK(tested >= 20);
}

TEST_CASE("analytic limits against numeric limits", "[model][limits]") {
  const EmitterModel m = emitter1_simple();
  const auto lim = analytic_limits(m);
  const auto hi = g2_params_from_rates(m.rates_at(1e9));
  CHECK(lim.a_inf == Approx(hi.a).epsilon(1e-5));
  CHECK(lim.a_inf == Approx(10.0).epsilon(1e-9));
  CHECK(lim.tau2_inf_ns == Approx(hi.tau2_ns).epsilon(1e-5));
}

TEST_CASE("steady state", "[model][emission]") {
  const auto n0 = steady_state(rates(0.0, 469.0, 6.7, 5.0));
  CHECK(n0.n1 == 1.0);
  CHECK(n0.n2 == 0.0);
  CHECK(n0.n3 == 0.0);
  CHECK(asymptotic_excited_population(emitter3_extended()) == Approx(0.429).margin(5e-4));
  CHECK(asymptotic_excited_population(emitter1_simple()) == Approx(1.0 / 11.0).epsilon(1e-12));
  const auto big = steady_state(emitter3_extended().rates_at(1e9));
  CHECK(big.n2 == Approx(asymptotic_excited_population(emitter3_extended())).epsilon(1e-5));
}

TEST_CASE("maximum count rate", "[model][emission]") {
  BeamConfig beam;
  EmitterModel two_level = emitter3_simple();
  two_level.k21 = Rate::mhz(469.0);
  two_level.k23 = Rate::mhz(0.0);
  CHECK(max_count_rate(two_level, beam) == Approx(469e3));
  CHECK(max_count_rate(emitter3_extended(), beam) == Approx(0.4290 * 469.48e3).epsilon(1e-3));
  EmitterModel e1_two = emitter1_simple();
  e1_two.k23 = Rate::mhz(0.0);
  CHECK(max_count_rate(e1_two, beam) / max_count_rate(emitter1_simple(), beam) == Approx(11.0));
}

TEST_CASE("saturation curve", "[model][emission]") {
  CHECK(saturation_curve({263.0, 14.3}, 14.3) == 131.5);
  CHECK(saturation_curve({4828.0, 306.7}, INFINITY) == 4828.0);
  CHECK(saturation_curve({4828.0, 306.7}, 0.0) == 0.0);
  double prev = -1.0;
  for (double p = 0.0; p < 1e4; p = p * 1.3 + 0.1) {
    const double v = saturation_curve({395.0, 40.9}, p);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("count rate follows the saturation law for constant de-shelving", "[model][emission]") {
  const EmitterModel m = emitter3_simple();
  BeamConfig beam;
  CHECK(saturation_power(m) == Approx(40.9).epsilon(1e-12));
  const double i_inf = max_count_rate(m, beam);
  for (double p : {1.0, 10.0, 40.9, 300.0}) {
    CHECK(count_rate(m, beam, p) == Approx(saturation_curve({i_inf, 40.9}, p)).epsilon(1e-12));
  }
  CHECK(count_rate(m, beam, 40.9) == Approx(0.5 * i_inf).epsilon(1e-12));
}

TEST_CASE("intensity from power", "[model][emission]") {
  BeamConfig beam;  // w = 0.51 um, T = 0.70
  CHECK(intensity_from_power(beam, 14.3) == Approx(1.2).epsilon(0.03));
  CHECK(intensity_from_power(beam, 306.7) == Approx(26.1).epsilon(0.03));
  CHECK(intensity_from_power(beam, 0.0) == 0.0);
  for (const auto& rec : emitter_table()) {
    CHECK(intensity_from_power(beam, rec.p_sat_uw) == Approx(rec.i_sat_kw_cm2).epsilon(0.03));
  }
}

TEST_CASE("predicted power dependence", "[model][g2]") {
  const EmitterModel m = emitter3_extended();
  const std::vector<double> p0{0.0};
  CHECK(predict_power_dependence(m, p0)[0].tau2_ns == Approx(2000.0).epsilon(1e-12));
  const std::vector<double> pinf{1e12};
  CHECK(predict_power_dependence(m, pinf)[0].a == Approx(analytic_limits(m).a_inf).epsilon(1e-6));

  const EmitterModel s = emitter3_simple();
  const auto grid = log_power_grid(0.0409, 40900.0, 7);
  CHECK(grid.size() == 43);
  const auto ps = predict_power_dependence(s, grid);
  for (std::size_t i = 1; i < ps.size(); ++i) CHECK(ps[i].a >= ps[i - 1].a);
}

TEST_CASE("presets are consistent with the tables", "[model][presets]") {
  for (const auto& rec : emitter_table()) CHECK(std::abs(std::exp(-rec.huang_rhys) - rec.debye_waller) <= 0.01);
  CHECK(preset_model("emitter3-extended").has_value());
  CHECK_FALSE(preset_model("nope").has_value());
  CHECK(preset_names().size() == 3);
  CHECK_THROWS_AS(emitter_record(9), ModelError);
}
