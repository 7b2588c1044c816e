#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "istn/baselines.hpp"
#include "istn/ciim.hpp"
#include "istn/scenario.hpp"

namespace istn {

struct SlotMetrics {
  int t = 0;
  std::string algo;
  double sum_rate_bps = 0.0;
  std::vector<double> backhaul_capacity_bps; // per TBS
  double backhaul_total_bps = 0.0;
  std::vector<double> geo_gs_cinr_db;         // per GEO-GS
  double geo_gs_cinr_db_min = 0.0;
  std::vector<double> interference_w;         // per GEO-GS
  int handover_count = 0;
  int unserved_gu_count = 0;
  double dual_value = 0.0;
  bool converged = false;
  int dual_iterations = 0;
  std::string violations;   // failing constraints, ';'-separated
  bool enforced_ok = true;  // passes every constraint the algorithm enforces
  int imish_init_rounds = 0;
  int imish_proposal_rounds = 0;
  int uara_iterations = 0;
  int gate_rejections = 0;
};

struct RunOptions {
  AlgorithmId algo = AlgorithmId::CIIM;
  bool ideal_backhaul = false;
};

struct RunResult {
  std::vector<SlotMetrics> slots;
  std::vector<HandoverEvent> handovers;
  bool enforces_c9 = false;
  /// A C9-enforcing algorithm produced a slot failing one of its constraints.
  bool constraint_violation = false;
};

/// Runs every timeslot of the scenario with one algorithm.
RunResult run_simulation(const Scenario& sc, const RunOptions& opt);

/// Column header of the per-slot metrics file.
extern const char* const kMetricsHeader;

std::string format_number(double v);
std::string metrics_csv(const std::vector<SlotMetrics>& slots);
std::string handovers_csv(const std::vector<HandoverEvent>& events);

/// Writes metrics.csv and handovers.csv under `dir` (created if needed).
void write_run_outputs(const std::filesystem::path& dir, const RunResult& r);

/// Gain tensors of slots [first, first+count) as CSV files under `dir`.
void dump_channels(const Scenario& sc, const std::filesystem::path& dir, int first, int count);

} // namespace istn
