#pragma once

#include <vector>

#include "istn/caching.hpp"
#include "istn/channel.hpp"
#include "istn/link_budget.hpp"
#include "istn/scenario.hpp"

namespace istn {

/// Everything one slot's optimisation reads. Holds references; the owner
/// keeps scenario, channels and cache alive.
struct SlotProblem {
  const Scenario& sc;
  const ChannelState& ch;
  const Matrix<char>& cached;       // [M][J]
  std::vector<double> i_th;         // per GEO-GS
  std::vector<int> association;     // GU -> TBS
  LinkParams lp;

  SlotProblem(const Scenario& s, const ChannelState& c, const Matrix<char>& g);

  bool is_backhaul(int gu) const { return !cached(association[gu], gu); }
  CheckInputs check_inputs() const { return {sc, cached, ch, i_th}; }
};

} // namespace istn
