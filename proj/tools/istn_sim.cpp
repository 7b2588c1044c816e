// istn-sim: command-line front end for single runs, sweeps and checks.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "istn/metrics_io.hpp"
#include "istn/simulation.hpp"
#include "validate.hpp"

namespace {

constexpr int kExitViolation = 2;

istn::Scenario load_or_default(const std::string& path) {
  return path.empty() ? istn::Scenario{} : istn::load_scenario(path);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrated satellite-terrestrial network simulator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "simulate every timeslot with one algorithm");
  std::string run_scenario, run_algo = "ciim", run_out = "out", run_dump;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_slots, run_wf;
  bool run_static = false, run_ideal = false;
  run->add_option("--scenario", run_scenario, "scenario TOML (defaults when omitted)");
  run->add_option("--algo", run_algo, "ciim, jimua, mdh, rraihm, greedy_sat, random_sat, uaaa, es")->capture_default_str();
  run->add_option("--seed", run_seed, "override the scenario seed");
  run->add_option("--out", run_out, "output directory")->capture_default_str();
  run->add_option("--timeslots", run_slots, "override the number of timeslots")->check(CLI::PositiveNumber);
  run->add_option("--wf-iterations", run_wf, "water-filling passes per allocation")->check(CLI::NonNegativeNumber);
  run->add_flag("--static-requests", run_static, "keep GU requests fixed across slots");
  run->add_flag("--ideal-backhaul", run_ideal, "drop the backhaul capacity constraint");
  run->add_option("--dump-channels", run_dump, "also write per-slot gain tensors to this directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  std::string sweep_spec, sweep_out = "sweep_out";
  std::optional<int> sweep_jobs;
  std::vector<std::string> sweep_formats{"csv", "json", "plotdata"};
  sweep->add_option("--spec", sweep_spec, "sweep TOML")->required();
  sweep->add_option("--out", sweep_out, "output directory")->capture_default_str();
  sweep->add_option("--jobs", sweep_jobs, "worker threads (overrides the spec)")->check(CLI::PositiveNumber);
  sweep->add_option("--format", sweep_formats, "any of csv, json, plotdata")
      ->check(CLI::IsMember({"csv", "json", "plotdata"}))
      ->capture_default_str();

  // validate
  auto* validate = app.add_subcommand("validate", "oracle and property checks on small instances");
  unsigned validate_n = 20;
  validate->add_option("--instances", validate_n, "instances per check")->check(CLI::PositiveNumber)->capture_default_str();

  // dump-channels
  auto* dump = app.add_subcommand("dump-channels", "write gain tensors as CSV");
  std::string dump_scenario, dump_out = "channels";
  std::optional<std::uint64_t> dump_seed;
  int dump_first = 0, dump_count = 1;
  dump->add_option("--scenario", dump_scenario, "scenario TOML (defaults when omitted)");
  dump->add_option("--seed", dump_seed, "override the scenario seed");
  dump->add_option("--out", dump_out, "output directory")->capture_default_str();
  dump->add_option("--first", dump_first, "first slot")->check(CLI::NonNegativeNumber)->capture_default_str();
  dump->add_option("--count", dump_count, "number of slots")->check(CLI::PositiveNumber)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto algo = istn::parse_algorithm(run_algo);
      if (!algo) {
        std::cerr << "error: unknown algorithm \"" << run_algo << "\"\n";
        return 1;
      }
      istn::Scenario sc = load_or_default(run_scenario);
      if (run_seed) sc.rng_seed = *run_seed;
      if (run_slots) sc.n_timeslots = *run_slots;
      if (run_wf) sc.wf_iterations = *run_wf;
      if (run_static) sc.caching.static_requests = true;

      istn::RunOptions opt;
      opt.algo = *algo;
      opt.ideal_backhaul = run_ideal;
      const istn::RunResult r = istn::run_simulation(sc, opt);
      istn::write_run_outputs(run_out, r);
      if (!run_dump.empty()) istn::dump_channels(sc, run_dump, 0, sc.n_timeslots);

      int bad_slots = 0;
      for (const auto& m : r.slots) bad_slots += m.enforced_ok ? 0 : 1;
      std::cout << istn::algorithm_name(*algo) << ": " << r.slots.size() << " slots, " << r.handovers.size()
                << " handovers, " << bad_slots << " slots with violations -> " << run_out << '\n';
      if (r.enforces_c9 && r.constraint_violation) {
        std::cerr << "constraint violation in a run that enforces GEO-GS protection\n";
        return kExitViolation;
      }
      return 0;
    }

    if (*sweep) {
      istn::SweepSpec spec = istn::load_sweep_spec(sweep_spec);
      if (sweep_jobs) spec.jobs = *sweep_jobs;
      const istn::SweepResult r = istn::run_sweep(spec);
      for (const auto& f : sweep_formats) {
        const auto fmt = f == "csv" ? istn::EmitFormat::Csv : f == "json" ? istn::EmitFormat::Json
                                                                         : istn::EmitFormat::Plotdata;
        istn::emit(r, fmt, sweep_out);
      }
      int failed = 0;
      for (const auto& row : r.runs) {
        if (!row.ok()) {
          ++failed;
          std::cerr << "run failed: value=" << row.value << " seed=" << row.seed << " algo=" << row.algo << ": "
                    << row.error << '\n';
        }
      }
      std::cout << r.runs.size() << " runs (" << failed << " failed) -> " << sweep_out << '\n';
      if (r.constraint_violation) {
        std::cerr << "constraint violation in a run that enforces GEO-GS protection\n";
        return kExitViolation;
      }
      return failed == 0 ? 0 : 1;
    }

    if (*validate) return istn::tools::run_validation(std::cout, validate_n) ? 0 : 1;

    if (*dump) {
      istn::Scenario sc = load_or_default(dump_scenario);
      if (dump_seed) sc.rng_seed = *dump_seed;
      istn::dump_channels(sc, dump_out, dump_first, dump_count);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
