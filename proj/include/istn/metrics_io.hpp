#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "istn/baselines.hpp"
#include "istn/scenario.hpp"
#include "istn/simulation.hpp"

namespace istn {

enum class SweepVariable { GuCount, HandoverThreshold, CinrThreshold, Connections, ConstellationSize, BackhaulDemand };

/// Config spelling: D_GU, H, CINR_th, N_r, constellation_size, U_back.
std::optional<SweepVariable> parse_sweep_variable(const std::string& name);
std::string sweep_variable_name(SweepVariable v);

/// Sets the swept field. D_GU is GUs per square metre, rounded to a count
/// over the area;
/// constellation_size the total satellite count (planes stay fixed, so it
/// must divide evenly).
void apply_sweep_value(Scenario& sc, SweepVariable v, double value);

struct SweepSpec {
  SweepVariable variable = SweepVariable::HandoverThreshold;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::vector<AlgorithmId> algos;
  Scenario base;
  bool ideal_backhaul = false;
  int jobs = 1;

  /// Throws ConfigError on an empty list or non-positive job count.
  void validate() const;
};

/// Keys: variable, values, seeds, algos, optional jobs, ideal_backhaul,
/// timeslots; the base scenario comes from `scenario = "path"` (relative to
/// `base_dir`) or an inline [scenario] table.
SweepSpec sweep_spec_from_toml(const std::string& text, const std::filesystem::path& base_dir);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

/// One (value, seed, algo) run reduced over its timeslots.
struct RunRow {
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string algo;
  int slots = 0;
  double sum_rate_bps = 0.0;     // slot mean
  double sum_rate_stderr = 0.0;  // over slots
  double backhaul_capacity_bps = 0.0;
  double backhaul_stderr = 0.0;
  double geo_gs_cinr_db_min = 0.0;
  long handover_count = 0;       // total over slots
  double dual_value = 0.0;       // slot mean
  double converged_fraction = 0.0;
  int violation_slots = 0;       // slots failing an enforced constraint
  double unserved_gu = 0.0;      // slot mean
  std::string error;             // non-empty when the run threw

  bool ok() const { return error.empty(); }
};

/// Mean and standard error across seeds for one (value, algo).
struct SummaryRow {
  double value = 0.0;
  std::string algo;
  int runs = 0;
  int failed = 0;
  double sum_rate_mean = 0.0, sum_rate_stderr = 0.0;
  double backhaul_mean = 0.0, backhaul_stderr = 0.0;
  double handover_mean = 0.0, handover_stderr = 0.0;
  double cinr_min_mean = 0.0, cinr_min_stderr = 0.0;
};

struct SweepResult {
  SweepVariable variable = SweepVariable::HandoverThreshold;
  std::vector<RunRow> runs;       // value-major, then seed, then algo
  std::vector<SummaryRow> summary;
  bool constraint_violation = false; // some C9-enforcing run broke a constraint
};

RunRow reduce_run(double value, std::uint64_t seed, AlgorithmId algo, const RunResult& r);
std::vector<SummaryRow> summarize(const std::vector<RunRow>& runs);

/// Runs every cell on up to spec.jobs threads; output order is fixed by the
/// spec, not by completion. A cell that throws is recorded and skipped.
SweepResult run_sweep(const SweepSpec& spec);

inline constexpr const char* kSweepVersion = "# istn-sweep v1";

std::string runs_csv(const std::vector<RunRow>& runs);
std::vector<RunRow> parse_runs_csv(const std::string& text);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string sweep_json(const SweepResult& r);
/// Blank-line separated x/y/err blocks, one per algo, for the named metric
/// (sum_rate, backhaul, handover, cinr_min).
std::string plotdata(const SweepResult& r, const std::string& metric);

enum class EmitFormat { Csv, Json, Plotdata };

/// Writes the chosen format under `dir`. Empty results throw before any file
/// is created.
std::vector<std::filesystem::path> emit(const SweepResult& r, EmitFormat fmt, const std::filesystem::path& dir);

} // namespace istn
