#pragma once

#include <cstdint>
#include <random>

namespace istn {

/// Named random streams. Every stochastic stage draws from its own stream so
/// that changing one stage never perturbs another.
enum class Stream : std::uint64_t {
  Placement = 1,
  TerrestrialFading = 2,
  SatelliteFading = 3,
  CachePlacement = 4,
  Requests = 5,
  RandomSat = 6,
  RandomSubchannel = 7,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine for (seed, stream, slot). Pure function of its arguments.
inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t slot = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ static_cast<std::uint64_t>(stream));
  s = splitmix64(s ^ (slot * 0x2545f4914f6cdd1dULL));
  return std::mt19937_64(s);
}

} // namespace istn
