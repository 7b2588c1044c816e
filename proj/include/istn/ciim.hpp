#pragma once

#include <vector>

#include "istn/baselines.hpp"
#include "istn/link_budget.hpp"
#include "istn/problem.hpp"

namespace istn {

struct DualIteration {
  int iter = 0;
  double theta = 0.0;
  std::vector<double> lambda;
  double lagrangian = 0.0;   // Lagrangian at this iteration's pre-repair point
  double bound = 0.0;        // certified upper bound on the dual function at lambda
  double primal = 0.0;       // post-repair sum rate
  bool feasible = false;     // post-repair point passes the algorithm's constraints
  std::vector<double> slack; // C_m - backhaul load, pre-repair
};

struct DualState {
  std::vector<double> lambda;
  double theta = 0.0;
  int iter = 0;
  std::vector<DualIteration> history;
};

struct SlotSolution {
  AssignmentX x;
  AssignmentB b;
  HandoverLog log;
  DualState dual;
  ConstraintReport report;
  double sum_rate = 0.0;
  double dual_value = 0.0; // smallest certified bound over the iterations
  bool converged = false;
  bool feasible = false;
  int max_imish_proposal_rounds = 0;
  int max_imish_init_rounds = 0;
  int max_uara_iterations = 0;
  int evicted = 0;
};

/// Lagrangian value: sum rate + sum_m lambda_m (C_m - backhaul load).
double dual_value(const AssignmentX& x, const AssignmentB& b, const std::vector<double>& lambda,
                  const SlotProblem& p);

/// Upper bound on max over (X, B, P) of the Lagrangian at lambda, from
/// interference-free relaxations of both subproblems.
double dual_bound(const SlotProblem& p, const std::vector<double>& lambda);

/// Drops backhaul GUs, lowest rate first, until every TBS's backhaul load
/// fits its capacity; powers are re-allocated afterwards. Returns the
/// number of GUs dropped.
int repair_backhaul(const SlotProblem& p, AssignmentX& x, const std::vector<double>& capacity, PowerMode mode,
                    int wf_iterations);

/// The dual loop for one slot. `lambda` is the starting multiplier and is
/// replaced by the final one.
SlotSolution ciim_slot(const SlotProblem& p, const Pipeline& pipe, std::vector<double>& lambda);

} // namespace istn
