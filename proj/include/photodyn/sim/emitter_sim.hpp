#ifndef PHOTODYN_SIM_EMITTER_SIM_HPP
#define PHOTODYN_SIM_EMITTER_SIM_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "photodyn/model/types.hpp"

namespace photodyn::sim {

// Time spent in each level along a simulated trajectory.
struct OccupancyTally {
  std::array<double, 3> time_ns{};
  std::uint64_t jumps = 0;

  double fraction(int level) const;  // level in {1, 2, 3}
};

// Continuous-time Markov trajectory of the three-level emitter at cw power P.
// Each level is left after an exponential dwell drawn from its total exit
// rate; from level 2 the branch (2->1 radiative vs 2->3 shelving) is chosen
// in proportion to the rates. The initial level is drawn from the stationary
// distribution so the process is stationary from t = 0. `on_emission` is
// called for every 2->1 transition with its time in ns.
void for_each_emission(const model::EmitterModel& model, double power_uw, double duration_ns,
                       std::uint64_t seed, const std::function<void(double)>& on_emission,
                       OccupancyTally* tally = nullptr);

std::vector<double> simulate_emission(const model::EmitterModel& model, double power_uw,
                                      double duration_ns, std::uint64_t seed,
                                      OccupancyTally* tally = nullptr);

}  // namespace photodyn::sim

#endif  // PHOTODYN_SIM_EMITTER_SIM_HPP
