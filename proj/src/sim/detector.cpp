#include "photodyn/sim/detector.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "photodyn/error.hpp"
#include "photodyn/model/units.hpp"
#include "photodyn/sim/emitter_sim.hpp"
#include "photodyn/sim/random.hpp"

namespace photodyn::sim {

char channel_name(Channel c) { return c == Channel::A ? 'A' : 'B'; }

void DetectorConfig::validate() const {
  if (!(eta_det > 0.0 && eta_det <= 1.0)) throw ModelError("eta_det must lie in (0, 1]");
  if (!(split_ratio >= 0.0 && split_ratio <= 1.0)) throw ModelError("split_ratio must lie in [0, 1]");
  if (!(jitter_sigma_ps >= 0.0) || !std::isfinite(jitter_sigma_ps)) throw ModelError("jitter_sigma must be non-negative");
  if (!(dead_time_ns >= 0.0) || !std::isfinite(dead_time_ns)) throw ModelError("dead_time must be non-negative");
  if (!(background_rate_cps >= 0.0) || !std::isfinite(background_rate_cps)) {
    throw ModelError("background_rate must be non-negative");
  }
}

double PhotonStream::rate_cps() const {
  return duration_ns > 0.0 ? static_cast<double>(timestamps_ns.size()) / duration_ns * kNsPerSecond : 0.0;
}

void finalize_channel(std::vector<double>& ts, double duration_ns, double dead_time_ns) {
  std::sort(ts.begin(), ts.end());
  std::vector<double> out;
  out.reserve(ts.size());
  for (double t : ts) {
    if (t < 0.0 || t > duration_ns) continue;
    if (!out.empty() && (t == out.back() || t - out.back() < dead_time_ns)) continue;
    out.push_back(t);
  }
  ts = std::move(out);
}

namespace {

void add_background(std::vector<double>& ts, double rate_cps, double duration_ns, Engine engine) {
  if (rate_cps <= 0.0) return;
  const double rate_per_ns = rate_cps / kNsPerSecond;
  boost::random::exponential_distribution<double> gap(rate_per_ns);
  for (double t = gap(engine); t <= duration_ns; t += gap(engine)) ts.push_back(t);
}

void apply_jitter(std::vector<double>& ts, double sigma_ps, Engine engine) {
  if (sigma_ps <= 0.0) return;
  boost::random::normal_distribution<double> noise(0.0, sigma_ps / kPsPerNs);
  for (double& t : ts) t += noise(engine);
}

// Efficiency thinning and beamsplitter routing, one emission at a time.
class Router {
 public:
  Router(const DetectorConfig& config, std::uint64_t seed, StreamPair& out)
      : config_(config), engine_(make_engine(seed, Substream::kRouting)), out_(out) {}
  void operator()(double t) {
    if (config_.eta_det < 1.0 && uniform_(engine_) >= config_.eta_det) return;
    const bool to_a =
        config_.split_ratio >= 1.0 || (config_.split_ratio > 0.0 && uniform_(engine_) < config_.split_ratio);
    (to_a ? out_.a.timestamps_ns : out_.b.timestamps_ns).push_back(t);
  }

 private:
  const DetectorConfig& config_;
  Engine engine_;
  boost::random::uniform_01<double> uniform_;
  StreamPair& out_;
};

StreamPair empty_pair(double duration_ns, std::uint64_t seed) {
  StreamPair out;
  out.a.channel = Channel::A;
  out.b.channel = Channel::B;
  out.a.duration_ns = out.b.duration_ns = duration_ns;
  out.a.seed = out.b.seed = seed;
  return out;
}

void finish(StreamPair& out, const DetectorConfig& config, double duration_ns, std::uint64_t seed) {
  apply_jitter(out.a.timestamps_ns, config.jitter_sigma_ps, make_engine(seed, Substream::kJitterA));
  apply_jitter(out.b.timestamps_ns, config.jitter_sigma_ps, make_engine(seed, Substream::kJitterB));
  add_background(out.a.timestamps_ns, config.background_rate_cps, duration_ns,
                 make_engine(seed, Substream::kBackgroundA));
  add_background(out.b.timestamps_ns, config.background_rate_cps, duration_ns,
                 make_engine(seed, Substream::kBackgroundB));
  finalize_channel(out.a.timestamps_ns, duration_ns, config.dead_time_ns);
  finalize_channel(out.b.timestamps_ns, duration_ns, config.dead_time_ns);
}

}  // namespace

StreamPair detect(std::span<const double> emissions_ns, double duration_ns, const DetectorConfig& config,
                  std::uint64_t seed) {
  config.validate();
  if (!(duration_ns >= 0.0)) throw ModelError("duration must be non-negative");
  if (!std::is_sorted(emissions_ns.begin(), emissions_ns.end())) throw DataError("emissions must be sorted");

  StreamPair out = empty_pair(duration_ns, seed);
  const double expected = static_cast<double>(emissions_ns.size()) * config.eta_det;
  out.a.timestamps_ns.reserve(static_cast<std::size_t>(expected * config.split_ratio * 1.01 + 16));
  out.b.timestamps_ns.reserve(static_cast<std::size_t>(expected * (1.0 - config.split_ratio) * 1.01 + 16));
  Router route(config, seed, out);
  for (double t : emissions_ns) route(t);
  finish(out, config, duration_ns, seed);
  return out;
}

// Streams emissions straight into the router, so memory scales with the
// detected photons only. Identical to detect(simulate_emission(...)).
StreamPair simulate_hbt(const model::EmitterModel& model, double power_uw, double duration_ns,
                        const DetectorConfig& config, std::uint64_t seed) {
  config.validate();
  StreamPair out = empty_pair(duration_ns, seed);
  Router route(config, seed, out);
  for_each_emission(model, power_uw, duration_ns, seed, [&route](double t) { route(t); });
  finish(out, config, duration_ns, seed);
  return out;
}

}  // namespace photodyn::sim
