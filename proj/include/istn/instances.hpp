#pragma once

#include <cstdint>
#include <random>

#include "istn/channel.hpp"
#include "istn/scenario.hpp"
#include "istn/tensor.hpp"

namespace istn {

/// Dimensions of a synthetic slot, small enough for brute-force checks.
struct InstanceShape {
  int tbs = 2;
  int gus = 4;
  int sc_terr = 2;
  int sats = 3;
  int sc_sat = 2;
  int geo_gs = 1;
  double visible_prob = 1.0; // per (satellite, TBS) pair
  double local_prob = 0.5;   // chance a GU's request is cached at each TBS
};

/// Scenario whose sizes match `shape`; everything else keeps its default.
Scenario instance_scenario(const InstanceShape& shape);

struct Instance {
  Scenario scenario;
  ChannelState channels;
  Matrix<char> cached;
};

/// Random gains on the scale of the default deployment: terrestrial
/// path gains 1e-11..1e-8 with Rayleigh fading, Ka-band gains around 1e-11,
/// GEO-GS leakage spread over several decades so some draws sit near the cap.
Instance random_instance(const InstanceShape& shape, std::uint64_t seed);

/// Fills visible_sats and candidate_sats from `visible`; use after editing a
/// channel state by hand.
void index_visibility(ChannelState& ch);

} // namespace istn
