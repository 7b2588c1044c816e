#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "istn/imish.hpp"
#include "istn/problem.hpp"
#include "istn/uara.hpp"

namespace istn {

enum class AlgorithmId { CIIM, JIMUA, MDH, RRAIHM, GREEDY_SAT, RANDOM_SAT, UAAA, ES };

/// Case-insensitive; accepts "greedy" and "random" as short forms.
std::optional<AlgorithmId> parse_algorithm(const std::string& name);
std::string algorithm_name(AlgorithmId id);
std::vector<AlgorithmId> all_algorithms();

enum class SatAlgo { Imish, ImishNoHandover, Rraihm, Mdh, Greedy, Random };
enum class TerrAlgo { Uara, Uaaa, Es };

/// How one algorithm id splits into a satellite solver, a terrestrial
/// solver and whether the GEO-GS cap is part of its feasibility.
struct Pipeline {
  SatAlgo sat = SatAlgo::Imish;
  TerrAlgo terr = TerrAlgo::Uara;
  bool enforce_c9 = true;
  // C7 is left out of feasibility; the dual loop still runs so the search
  // path matches the constrained run.
  bool ideal_backhaul = false;
};
Pipeline pipeline_for(AlgorithmId id);

struct SatOutcome {
  SatMatching b;
  HandoverLog log;
  ImishCounters counters;
};
SatOutcome solve_satellite(const SlotProblem& p, SatAlgo algo, const std::vector<double>& lambda);

struct TerrOutcome {
  TerrMatching x;
  UaraCounters counters;
};
TerrOutcome solve_terrestrial(const SlotProblem& p, TerrAlgo algo, const std::vector<double>& lambda,
                              int wf_iterations);

/// Each TBS takes its N_r nearest visible satellites, each on its strongest
/// free SC, then the GEO-GS protection step runs.
SatOutcome mdh_round(const SlotProblem& p, const std::vector<double>& lambda);

/// IMISH restricted to one randomly drawn SC per satellite-TBS pair.
SatOutcome rraihm_round(const SlotProblem& p, const std::vector<double>& lambda);
/// The per-pair SC draw used by rraihm_round.
Matrix<int> random_sc_choice(const SlotProblem& p);

/// Highest interference-free rate first, subject to C5 and C6.
SatMatching greedy_sat(const SlotProblem& p);

/// Uniformly random free visible units, N_r per TBS.
SatMatching random_sat(const SlotProblem& p);

/// UARA's matching with equal power per active SC.
UaraResult uaaa_round(const SlotProblem& p, const std::vector<double>& lambda);

struct EsOptions {
  std::vector<double> lambda;                      // empty: zero
  std::optional<std::vector<double>> c7_capacity;  // per TBS; reject x whose load exceeds it
  bool waterfill = false;                          // refine each candidate's powers
  std::uint64_t budget = 10'000'000;
};

struct EsResult {
  TerrMatching x;
  double value = 0.0;
  std::uint64_t states = 0;
  std::uint64_t feasible = 0;
};

/// (J+1)^(M*C), saturating at UINT64_MAX.
std::uint64_t es_state_count(int n_tbs, int n_gu, int n_sc);

/// Enumerates every unit -> {none, GU} map, keeps the C1-C3 feasible ones,
/// gives each TBS's active SCs equal power and returns the best value of
/// sum rate - lambda U_back per backhaul GU. Throws when the state count
/// exceeds the budget.
EsResult es_search(const SlotProblem& p, const EsOptions& opt);

} // namespace istn
