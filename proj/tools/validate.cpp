#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "istn/baselines.hpp"
#include "istn/ciim.hpp"
#include "istn/imish.hpp"
#include "istn/instances.hpp"
#include "istn/uara.hpp"
#include "istn/waterfill.hpp"

namespace istn::tools {

namespace {

struct Tally {
  std::ostream& out;
  bool all_ok = true;

  void report(const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "ok   " : "FAIL ") << name << "  " << detail << '\n';
    all_ok = all_ok && ok;
  }
};

// Best objective over a lattice of splits of the budget between two entries.
double grid_best_two(const std::vector<double>& noise, double budget) {
  double best = -1.0;
  const int steps = 20000;
  for (int i = 0; i <= steps; ++i) {
    const double a = budget * i / steps;
    best = std::max(best, waterfill_objective(noise, {a, budget - a}));
  }
  return best;
}

} // namespace

bool run_validation(std::ostream& out, unsigned instances) {
  Tally t{out};
  std::mt19937_64 rng(20240501);

  {
    std::uniform_real_distribution<double> n(0.05, 5.0), b(0.1, 10.0);
    int bad = 0;
    for (unsigned i = 0; i < instances * 10; ++i) {
      const std::vector<double> noise{n(rng), n(rng)};
      const double budget = b(rng);
      const auto wf = waterfill(noise, budget);
      if (waterfill_objective(noise, wf.power) < grid_best_two(noise, budget) - 1e-6) ++bad;
    }
    t.report("waterfill-vs-grid", bad == 0, std::to_string(bad) + " worse than grid");
  }

  {
    InstanceShape shape;
    shape.tbs = 2;
    shape.gus = 4;
    shape.sc_terr = 2;
    int bad = 0;
    for (unsigned i = 0; i < instances; ++i) {
      const Instance inst = random_instance(shape, 100 + i);
      const SlotProblem p(inst.scenario, inst.channels, inst.cached);
      const std::vector<double> lambda(shape.tbs, 0.0);
      const auto u = uara_round(p, lambda, {});
      EsOptions opt;
      opt.lambda = lambda;
      const auto es = es_search(p, opt);
      if (sum_rate(u.x.links, inst.channels.h_terr, inst.cached, p.lp) < 0.99 * es.value) ++bad;
    }
    t.report("uara-vs-exhaustive", bad == 0, std::to_string(bad) + " below 99% of exhaustive search");
  }

  {
    InstanceShape shape;
    shape.tbs = 3;
    shape.sats = 4;
    shape.sc_sat = 2;
    shape.gus = 5;
    shape.visible_prob = 0.8;
    int sat_pairs = 0, terr_pairs = 0;
    for (unsigned i = 0; i < instances; ++i) {
      const Instance inst = random_instance(shape, 200 + i);
      const SlotProblem p(inst.scenario, inst.channels, inst.cached);
      const std::vector<double> lambda(shape.tbs, 0.5);
      const auto sat = imish_round(p, lambda, {});
      SatRules rules;
      sat_pairs += static_cast<int>(
          sat_blocking_pairs(p, sat_weights(lambda, 1e-6), rules, sat.matching).size());
      const auto terr = uara_round(p, lambda, {});
      terr_pairs += static_cast<int>(terr_blocking_pairs(p, lambda, terr.x).size());
    }
    t.report("matching-stability", sat_pairs == 0 && terr_pairs == 0,
             std::to_string(sat_pairs) + " satellite / " + std::to_string(terr_pairs) + " terrestrial blocking pairs");
  }

  {
    InstanceShape shape;
    shape.tbs = 2;
    shape.gus = 6;
    shape.sc_terr = 3;
    shape.sats = 4;
    shape.local_prob = 0.3;
    int bound_bad = 0, infeasible = 0;
    for (unsigned i = 0; i < instances; ++i) {
      const Instance inst = random_instance(shape, 300 + i);
      const SlotProblem p(inst.scenario, inst.channels, inst.cached);
      std::vector<double> lambda;
      const auto sol = ciim_slot(p, pipeline_for(AlgorithmId::CIIM), lambda);
      if (!sol.feasible) ++infeasible;
      if (sol.dual_value < sol.sum_rate * (1.0 - 1e-12)) ++bound_bad;
    }
    t.report("ciim-duality", bound_bad == 0 && infeasible == 0,
             std::to_string(bound_bad) + " bound breaches, " + std::to_string(infeasible) + " infeasible");
  }

  return t.all_ok;
}

} // namespace istn::tools
