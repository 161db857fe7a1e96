#include "fixtures.hpp"

#include <cmath>
#include <numbers>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>

#include "photodyn/model/g2.hpp"
#include "photodyn/model/presets.hpp"

namespace fixtures {

using namespace photodyn;

namespace {

using Engine = boost::random::mt19937_64;

double lorentz_cdf(double x, double c, double fwhm) { return 0.5 + std::atan(2.0 * (x - c) / fwhm) / std::numbers::pi; }
double gauss_cdf(double x, double c, double s) { return 0.5 * std::erfc(-(x - c) / (s * std::numbers::sqrt2)); }

double poisson(Engine& e, double mean) {
  if (mean <= 0.0) return 0.0;
  return static_cast<double>(boost::random::poisson_distribution<long long, double>(mean)(e));
}

}  // namespace

spectral::WavelengthWindow rt_total_window() { return {720.0, 800.0}; }

Spectrum rt_spectrum(int id, double step) {
  const auto& rec = model::emitter_record(id);
  const double c = rec.zpl_peak_nm;
  const double w = rec.zpl_width_nm;
  const spectral::WavelengthWindow zw = spectral::default_zpl_window({c, w, 1.0, 0.5});
  const spectral::WavelengthWindow tw = rt_total_window();
  const double band_c = c + 25.0;
  const double band_s = 8.0;
  auto frac_l = [&](const spectral::WavelengthWindow& win) { return lorentz_cdf(win.hi_nm, c, w) - lorentz_cdf(win.lo_nm, c, w); };
  auto frac_g = [&](const spectral::WavelengthWindow& win) {
    return gauss_cdf(win.hi_nm, band_c, band_s) - gauss_cdf(win.lo_nm, band_c, band_s);
  };
  // DW = (L_z + S G_z) / (L_t + S G_t)
  const double dw = rec.debye_waller;
  const double band_area = (frac_l(zw) - dw * frac_l(tw)) / (dw * frac_g(tw) - frac_g(zw));

  Spectrum s;
  s.background_subtracted = true;
  s.temperature_k = 290.0;
  const auto n = static_cast<std::size_t>(std::llround((tw.hi_nm - tw.lo_nm) / step));
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = tw.lo_nm + static_cast<double>(i) * step;
    const double lor = (w / (2.0 * std::numbers::pi)) / ((x - c) * (x - c) + 0.25 * w * w);
    const double gau = std::exp(-0.5 * (x - band_c) * (x - band_c) / (band_s * band_s)) /
                       (band_s * std::sqrt(2.0 * std::numbers::pi));
    s.wavelength_nm.push_back(x);
    s.intensity.push_back(1e4 * (lor + band_area * gau));
  }
  return s;
}

Spectrum cold_spectrum(std::uint64_t seed, double peak_counts, double background) {
  const auto& lines = model::emitter5_fine_structure();
  const double rel[4] = {0.55, 1.0, 0.7, 0.45};  // 738.91, 739.19, 740.11, 740.42
  Engine e(seed);
  Spectrum s;
  s.temperature_k = 30.0;
  for (double x = 737.5; x <= 742.0 + 1e-9; x += 0.02) {
    double v = background;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const double hw = 0.5 * lines[k].fwhm_nm;
      v += peak_counts * rel[k] * hw * hw / ((x - lines[k].center_nm) * (x - lines[k].center_nm) + hw * hw);
    }
    s.wavelength_nm.push_back(x);
    s.intensity.push_back(poisson(e, v));
  }
  return s;
}

Spectrum lorentzian_spectrum(const std::vector<fit::LinePeak>& peaks, double lo, double hi, double step,
                             double offset, double slope) {
  Spectrum s;
  const double mid = 0.5 * (lo + hi);
  const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = lo + static_cast<double>(i) * step;
    double v = offset + slope * (x - mid);
    for (const auto& p : peaks) v += fit::line_value(fit::LineShape::kLorentzian, p, x);
    s.wavelength_nm.push_back(x);
    s.intensity.push_back(v);
  }
  return s;
}

std::vector<fit::SaturationPoint> saturation_scan(double i_inf, double p_sat, const std::vector<double>& powers,
                                                  double rel_noise, std::uint64_t seed) {
  Engine e(seed);
  boost::random::normal_distribution<double> n01(0.0, 1.0);
  std::vector<fit::SaturationPoint> out;
  for (double p : powers) {
    const double i = i_inf * p / (p + p_sat);
    const double s = rel_noise * i;
    out.push_back({p, i + s * n01(e), s});
  }
  return out;
}

std::vector<fit::PolarizationPoint> polarization_scan(double v, double theta0, double mean, int points,
                                                      std::uint64_t seed) {
  Engine e(seed);
  const double i_max = mean * (1.0 + v);
  const double i_min = mean * (1.0 - v);
  std::vector<fit::PolarizationPoint> out;
  for (int k = 0; k < points; ++k) {
    const double th = 360.0 * k / points;
    const double s = std::sin((th - theta0) * std::numbers::pi / 180.0);
    const double expect = i_min + (i_max - i_min) * s * s;
    out.push_back({th, poisson(e, expect), 0.0});
  }
  return out;
}

std::vector<fit::DeshelvingPoint> bunching_series(const model::EmitterModel& m, const std::vector<double>& powers,
                                                  double sigma, std::uint64_t seed) {
  Engine e(seed);
  boost::random::normal_distribution<double> n01(0.0, 1.0);
  const auto params = model::predict_power_dependence(m, powers);
  std::vector<fit::DeshelvingPoint> out;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    out.push_back({powers[i], params[i].a + (sigma > 0.0 ? sigma * n01(e) : 0.0), sigma});
  }
  return out;
}

corr::CorrelationHistogram synthetic_histogram(const model::G2Params& p, const fit::Irf& irf,
                                               const corr::BinLayout& layout, double pairs_per_ns,
                                               std::uint64_t seed) {
  Engine e(seed);
  corr::RawHistogram raw;
  raw.bin_edges_ns = layout.edges();
  raw.counts.resize(layout.size());
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const double lo = raw.bin_edges_ns[k];
    const double hi = raw.bin_edges_ns[k + 1];
    double avg = 0.0;
    constexpr int kSub = 16;
    for (int j = 0; j < kSub; ++j) avg += fit::g2_convolved(p, irf, lo + (j + 0.5) * (hi - lo) / kSub) / kSub;
    raw.counts[k] = static_cast<std::uint64_t>(poisson(e, pairs_per_ns * (hi - lo) * avg));
  }
  // ra * rb * T = pairs_per_ns with ra = rb = 0.05 per ns
  const double r = 0.05;
  return corr::normalize(raw, r * 1e9, r * 1e9, pairs_per_ns / (r * r));
}

std::vector<double> poisson_times(double rate, double duration, std::uint64_t seed) {
  Engine e(seed);
  boost::random::exponential_distribution<double> gap(rate);
  std::vector<double> t;
  for (double x = gap(e); x <= duration; x += gap(e)) t.push_back(x);
  return t;
}

std::vector<std::uint64_t> brute_force_pairs(const std::vector<double>& a, const std::vector<double>& b,
                                             const corr::BinLayout& layout) {
  std::vector<std::uint64_t> counts(layout.size(), 0);
  const auto edges = layout.edges();
  for (double ta : a) {
    for (double tb : b) {
      const double dt = tb - ta;
      if (dt < edges.front() || dt > edges.back()) continue;
      // Linear scan keeps this independent of BinLayout::index.
      std::size_t k = 0;
      while (k + 1 < edges.size() - 1 && dt >= edges[k + 1]) ++k;
      ++counts[k];
    }
  }
  return counts;
}

}  // namespace fixtures
