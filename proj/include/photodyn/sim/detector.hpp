#ifndef PHOTODYN_SIM_DETECTOR_HPP
#define PHOTODYN_SIM_DETECTOR_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "photodyn/model/types.hpp"

namespace photodyn::sim {

enum class Channel : std::uint8_t { A = 0, B = 1 };

char channel_name(Channel c);

// Two-detector HBT arm: a beamsplitter behind an overall detection
// efficiency, Gaussian timing jitter per detector and a non-paralysable dead
// time. Background counts (uniform Poisson, per channel) are off by default.
struct DetectorConfig {
  double eta_det = 1.0;
  double split_ratio = 0.5;    // probability of routing to channel A
  double jitter_sigma_ps = 0.0;
  double dead_time_ns = 0.0;
  double background_rate_cps = 0.0;

  void validate() const;
};

struct PhotonStream {
  Channel channel = Channel::A;
  std::vector<double> timestamps_ns;  // strictly increasing, within [0, duration]
  double duration_ns = 0.0;
  std::uint64_t seed = 0;

  std::size_t size() const { return timestamps_ns.size(); }
  bool empty() const { return timestamps_ns.empty(); }
  // Mean count rate over the acquisition, counts per second.
  double rate_cps() const;
};

struct StreamPair {
  PhotonStream a;
  PhotonStream b;
};

StreamPair detect(std::span<const double> emissions_ns, double duration_ns, const DetectorConfig& config,
                  std::uint64_t seed);

StreamPair simulate_hbt(const model::EmitterModel& model, double power_uw, double duration_ns,
                        const DetectorConfig& config, std::uint64_t seed);

// Sorts, clips to [0, duration], removes coincident duplicates and applies
// the dead time. Exposed for the file readers.
void finalize_channel(std::vector<double>& timestamps_ns, double duration_ns, double dead_time_ns);

}  // namespace photodyn::sim

#endif  // PHOTODYN_SIM_DETECTOR_HPP
