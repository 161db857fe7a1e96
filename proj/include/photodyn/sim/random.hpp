#ifndef PHOTODYN_SIM_RANDOM_HPP
#define PHOTODYN_SIM_RANDOM_HPP

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

namespace photodyn::sim {

// Independent sub-streams derived from one user seed. Each consumer of
// randomness gets its own engine so that changing how many draws one stage
// makes never perturbs another.
enum class Substream : std::uint64_t {
  kEmission = 1,
  kRouting = 2,
  kJitterA = 3,
  kJitterB = 4,
  kBackgroundA = 5,
  kBackgroundB = 6,
};

using Engine = boost::random::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

Engine make_engine(std::uint64_t seed, Substream stream);
Engine make_engine(std::uint64_t seed, std::uint64_t stream);

}  // namespace photodyn::sim

#endif  // PHOTODYN_SIM_RANDOM_HPP
