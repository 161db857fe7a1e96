#include "photodyn/sim/emitter_sim.hpp"

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "photodyn/error.hpp"
#include "photodyn/model/emission.hpp"
#include "photodyn/sim/random.hpp"

namespace photodyn::sim {

double OccupancyTally::fraction(int level) const {
  const double total = time_ns[0] + time_ns[1] + time_ns[2];
  return total > 0.0 ? time_ns.at(level - 1) / total : 0.0;
}

void for_each_emission(const model::EmitterModel& model, double power_uw, double duration_ns,
                       std::uint64_t seed, const std::function<void(double)>& on_emission,
                       OccupancyTally* tally) {
  model.validate();
  if (!(duration_ns >= 0.0)) throw ModelError("duration must be non-negative");
  if (duration_ns == 0.0) return;

  const model::RateSet rates = model.rates_at(power_uw);
  const double k12 = rates.k12.per_ns();
  const double k21 = rates.k21.per_ns();
  const double k23 = rates.k23.per_ns();
  const double k31 = rates.k31.per_ns();
  const double exit2 = k21 + k23;
  const double p_radiative = k21 / exit2;

  Engine engine = make_engine(seed, Substream::kEmission);
  boost::random::uniform_01<double> uniform;
  boost::random::exponential_distribution<double> unit_exp(1.0);

  const model::Populations start = model::steady_state(rates);
  const double u0 = uniform(engine);
  int level = u0 < start.n1 ? 1 : (u0 < start.n1 + start.n2 ? 2 : 3);

  double t = 0.0;
  std::uint64_t jumps = 0;
  std::array<double, 3> occupancy{};
  while (true) {
    const double exit_rate = level == 1 ? k12 : (level == 2 ? exit2 : k31);
    const double dwell = exit_rate > 0.0 ? unit_exp(engine) / exit_rate : duration_ns;
    if (t + dwell >= duration_ns) {
      occupancy[level - 1] += duration_ns - t;
      break;
    }
    occupancy[level - 1] += dwell;
    t += dwell;
    ++jumps;
    switch (level) {
      case 1:
        level = 2;
        break;
      case 2:
        if (k23 == 0.0 || uniform(engine) < p_radiative) {
          on_emission(t);
          level = 1;
        } else {
          level = 3;
        }
        break;
      default:
        level = 1;
        break;
    }
  }
  if (tally != nullptr) {
    for (int i = 0; i < 3; ++i) tally->time_ns[i] += occupancy[i];
    tally->jumps += jumps;
  }
}

std::vector<double> simulate_emission(const model::EmitterModel& model, double power_uw,
                                      double duration_ns, std::uint64_t seed, OccupancyTally* tally) {
  std::vector<double> times;
  if (duration_ns > 0.0) {
    // Reserve for the expected number of photons to avoid repeated growth.
    const model::Populations n = model::steady_state(model.rates_at(power_uw));
    const double expected = model.k21.per_ns() * n.n2 * duration_ns;
    if (expected < 5e8) times.reserve(static_cast<std::size_t>(expected * 1.01 + 16));
  }
  for_each_emission(model, power_uw, duration_ns, seed, [&times](double t) { times.push_back(t); }, tally);
  return times;
}

}  // namespace photodyn::sim
