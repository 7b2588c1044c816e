#pragma once

#include <vector>

#include "istn/link_budget.hpp"
#include "istn/problem.hpp"

namespace istn {

using TerrMatching = AssignmentX;

enum class PowerMode { Waterfill, Equal };

struct UaraOptions {
  PowerMode power = PowerMode::Waterfill;
  int wf_iterations = 1;
};

struct UaraCounters {
  int init_rounds = 0;
  int proposal_rounds = 0;
  int refinement_moves = 0;
  int wf_accepted = 0; // water-filling passes kept over the previous powers

  int iterations() const { return init_rounds + proposal_rounds; }
};

struct UaraResult {
  TerrMatching x;
  UaraCounters counters;
};

/// Each GU joins the TBS with the largest fading-free gain; ties go to the
/// lower index.
std::vector<int> associate_gus(const ChannelState& ch);

/// (h_own)^rho / h_cross
double theta_preference(double h_own, double h_cross, double rho);

/// Sum rate minus lambda_m U_back for every backhaul GU served.
double terr_utility(const std::vector<TerrLink>& links, const SlotProblem& p, const std::vector<double>& lambda);

/// Equal split per TBS, then (Waterfill) per-TBS water-filling with the
/// other TBSs' powers held fixed. A pass is kept only if it does not lower
/// the sum rate.
int allocate_power(const SlotProblem& p, std::vector<TerrLink>& links, PowerMode mode, int wf_iterations);

UaraResult uara_round(const SlotProblem& p, const std::vector<double>& lambda, const UaraOptions& opt);

/// Pairs (gu, tbs, sc) whose adoption (evicting the unit's holder, vacating
/// the GU's old unit) strictly raises the matching utility, scored with each
/// TBS's budget split equally over its occupied units. Reported power is 0.
std::vector<TerrLink> terr_blocking_pairs(const SlotProblem& p, const std::vector<double>& lambda,
                                          const TerrMatching& x);


void sort_links(std::vector<TerrLink>& links);

} // namespace istn
