#include "photodyn/sim/random.hpp"

namespace photodyn::sim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0xd1b54a32d192ed03ULL)));
}

Engine make_engine(std::uint64_t seed, Substream stream) {
  return make_engine(seed, static_cast<std::uint64_t>(stream));
}

}  // namespace photodyn::sim
