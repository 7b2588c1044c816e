#pragma once

#include <vector>

#include "istn/link_budget.hpp"
#include "istn/problem.hpp"

namespace istn {

using SatMatching = AssignmentB;

struct HandoverEvent {
  int t;
  int tbs;
  int from_sat;
  int to_sat;
  double utility_db;
  bool operator==(const HandoverEvent&) const = default;
};

struct HandoverLog {
  std::vector<HandoverEvent> events;
  int count() const { return static_cast<int>(events.size()); }
};

/// Which satellite links a matcher may form.
struct SatRules {
  bool enforce_c9 = true;      // moves must keep every GEO-GS under its cap
  bool gate = true;            // newly added links need handover utility >= H
  const Matrix<int>* fixed_sc = nullptr; // [N][M] the only usable SC per pair, or null
};

struct ImishCounters {
  int init_rounds = 0;
  int proposal_rounds = 0;
  int refinement_moves = 0;
  int removals = 0;        // links dropped by the GEO-GS protection step
  int gate_rejections = 0; // replacements refused only because of H
};

struct ImishResult {
  SatMatching matching;
  HandoverLog log;
  ImishCounters counters;
};

struct ImishOptions {
  bool handover = true;  // run the GEO-GS protection step and enforce C9
  const Matrix<int>* fixed_sc = nullptr;
  double weight_floor = 1e-6;
};

/// Preference of a matched unit with own gain `h_cur` for a candidate pair
/// with gain `h_cand`; `h_ref` is the gain the candidate is compared against
/// (the current satellite's gain to the candidate TBS).
double sic_preference(double h_cand, double h_cur, double h_ref);

/// Aggregate TBS received power of satellite n's links minus the interference
/// they inject at the GEO-GSs (W).
double handover_utility(int n, const std::vector<SatLink>& links, const ChannelState& ch);

/// The same trade-off as the configured gate value: received-to-injected
/// ratio in dB, or the difference in dBm in Difference mode.
double handover_utility_db(int n, const std::vector<SatLink>& links, const ChannelState& ch, HandoverMode mode);

/// Per-TBS weights lambda_m + floor.
std::vector<double> sat_weights(const std::vector<double>& lambda, double floor);

/// sum_m w_m C_m
double sat_utility(const std::vector<SatLink>& links, const SlotProblem& p, const std::vector<double>& w);

/// Removes the most interfering links until every GEO-GS is under its cap,
/// then refills each vacated TBS slot with the best admissible satellite
/// whose handover utility clears H. Each refill is a handover event.
void protect_geo_gs(const SlotProblem& p, const std::vector<double>& w, const SatRules& rules, int t,
                    SatMatching& m, HandoverLog& log, ImishCounters& counters);

/// Local search over add / replace / take-over / drop moves until no
/// admissible move raises sum_m w_m C_m.
void refine_sat(const SlotProblem& p, const std::vector<double>& w, const SatRules& rules, SatMatching& m,
                ImishCounters& counters);

ImishResult imish_round(const SlotProblem& p, const std::vector<double>& lambda, const ImishOptions& opt);

/// Pairs (tbs, sat, sc) outside the matching whose admission (evicting the
/// unit's holder and, optionally, one of the TBS's links) strictly raises
/// the weighted capacity. Empty for a stable matching.
std::vector<SatLink> sat_blocking_pairs(const SlotProblem& p, const std::vector<double>& w, const SatRules& rules,
                                        const SatMatching& m);

/// Canonical order: tbs, sat, sc.
void sort_links(std::vector<SatLink>& links);

} // namespace istn
