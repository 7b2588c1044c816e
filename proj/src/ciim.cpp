#include "istn/ciim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace istn {

namespace {

constexpr double kThetaTol = 1e-6;

bool passes(const ConstraintReport& r, const Pipeline& pipe) {
  for (int i = 0; i < kConstraintCount; ++i) {
    const auto c = static_cast<Constraint>(i);
    if (c == Constraint::C9 && !pipe.enforce_c9) continue;
    if (c == Constraint::C7 && pipe.ideal_backhaul) continue;
    if (!r.pass[i]) return false;
  }
  return true;
}

PowerMode power_mode(TerrAlgo t) { return t == TerrAlgo::Uara ? PowerMode::Waterfill : PowerMode::Equal; }

} // namespace

double dual_value(const AssignmentX& x, const AssignmentB& b, const std::vector<double>& lambda,
                  const SlotProblem& p) {
  double v = sum_rate(x.links, p.ch.h_terr, p.cached, p.lp);
  const auto cap = backhaul_capacity(b.links, p.ch.h_sat, p.lp);
  const auto load = backhaul_load(x.links, p.cached, p.lp);
  for (std::size_t m = 0; m < lambda.size(); ++m) v += lambda[m] * (cap[m] - load[m]);
  return v;
}

double dual_bound(const SlotProblem& p, const std::vector<double>& lambda) {
  const int M = p.ch.n_tbs();
  const int J = p.ch.n_gu();
  const int C = p.ch.n_sc_terr();
  const int K = p.ch.n_sc_sat();
  const double p_leo = p.sc.powers.p_leo_per_sc_w;
  double bound = 0.0;

  // Satellite side: each TBS's N_r best interference-free links.
  for (int m = 0; m < M; ++m) {
    if (lambda[m] <= 0.0) continue;
    std::vector<double> rates;
    for (int n : p.ch.visible_sats[m]) {
      for (int k = 0; k < K; ++k) {
        rates.push_back(p.lp.b_ka_hz * std::log2(1.0 + p_leo * p.ch.h_sat(n, m, k) / p.lp.noise_ka_w));
      }
    }
    const std::size_t take = std::min<std::size_t>(rates.size(), static_cast<std::size_t>(p.sc.n_connect));
    std::partial_sort(rates.begin(), rates.begin() + static_cast<std::ptrdiff_t>(take), rates.end(),
                      std::greater<>());
    double cap = 0.0;
    for (std::size_t i = 0; i < take; ++i) cap += rates[i];
    bound += lambda[m] * cap;
  }

  // Terrestrial side: every GU alone with the full TBS budget, then the
  // weaker of the per-SC and per-GU relaxations of the assignment.
  std::vector<std::vector<int>> gus(M);
  for (int j = 0; j < J; ++j) gus[p.association[j]].push_back(j);
  for (int m = 0; m < M; ++m) {
    if (gus[m].empty()) continue;
    std::vector<double> best_per_sc(C, 0.0);
    std::vector<double> best_per_gu;
    for (int j : gus[m]) {
      const bool b = p.is_backhaul(j);
      const double penalty = b ? lambda[m] * p.lp.u_back_bps : 0.0;
      double best_gu = 0.0;
      for (int c = 0; c < C; ++c) {
        const double snr = p.lp.p_tbs_total_w * p.ch.h_terr(m, j, c) / p.lp.noise_c_w;
        const double w = std::max(0.0, gu_rate(snr, b, p.lp.u_back_bps, p.lp.b_c_hz) - penalty);
        best_per_sc[c] = std::max(best_per_sc[c], w);
        best_gu = std::max(best_gu, w);
      }
      best_per_gu.push_back(best_gu);
    }
    double by_sc = 0.0;
    for (double v : best_per_sc) by_sc += v;
    std::sort(best_per_gu.begin(), best_per_gu.end(), std::greater<>());
    double by_gu = 0.0;
    for (std::size_t i = 0; i < best_per_gu.size() && i < static_cast<std::size_t>(C); ++i) by_gu += best_per_gu[i];
    bound += std::min(by_sc, by_gu);
  }
  return bound;
}

int repair_backhaul(const SlotProblem& p, AssignmentX& x, const std::vector<double>& capacity, PowerMode mode,
                    int wf_iterations) {
  int evicted = 0;
  while (true) {
    const auto load = backhaul_load(x.links, p.cached, p.lp);
    int over = -1;
    for (std::size_t m = 0; m < load.size(); ++m) {
      if (load[m] > capacity[m] * (1.0 + 1e-9)) {
        over = static_cast<int>(m);
        break;
      }
    }
    if (over < 0) break;
    const auto rates = gu_rates(x.links, p.ch.h_terr, p.cached, p.lp);
    std::size_t victim = x.links.size();
    for (std::size_t i = 0; i < x.links.size(); ++i) {
      const auto& l = x.links[i];
      if (l.tbs != over || p.cached(l.tbs, l.gu)) continue;
      if (victim == x.links.size() || rates[i] < rates[victim]) victim = i;
    }
    x.links.erase(x.links.begin() + static_cast<std::ptrdiff_t>(victim));
    ++evicted;
  }
  if (evicted > 0) allocate_power(p, x.links, mode, wf_iterations);
  return evicted;
}

SlotSolution ciim_slot(const SlotProblem& p, const Pipeline& pipe, std::vector<double>& lambda) {
  const int M = p.ch.n_tbs();
  if (static_cast<int>(lambda.size()) != M) lambda.assign(M, p.sc.lambda0);
  const double scale = p.lp.u_back_bps > 0.0 ? p.lp.u_back_bps : 1.0;

  SlotSolution best;
  bool have_best = false;
  SlotSolution last;
  SlotSolution out;
  double min_bound = std::numeric_limits<double>::infinity();
  bool converged = false;
  int max_init = 0, max_prop = 0, max_uara = 0;
  DualState dual;

  for (int i = 0; i < p.sc.max_dual_iterations; ++i) {
    const double theta = p.sc.theta0 * std::pow(p.sc.theta_decay, i);
    SatOutcome sat = solve_satellite(p, pipe.sat, lambda);
    TerrOutcome terr = solve_terrestrial(p, pipe.terr, lambda, p.sc.wf_iterations);
    max_init = std::max(max_init, sat.counters.init_rounds);
    max_prop = std::max(max_prop, sat.counters.proposal_rounds);
    max_uara = std::max(max_uara, terr.counters.iterations());

    const auto cap = backhaul_capacity(sat.b.links, p.ch.h_sat, p.lp);
    const auto load = backhaul_load(terr.x.links, p.cached, p.lp);

    DualIteration rec;
    rec.iter = i;
    rec.theta = theta;
    rec.lambda = lambda;
    rec.lagrangian = dual_value(terr.x, sat.b, lambda, p);
    rec.bound = dual_bound(p, lambda);
    rec.slack.resize(M);
    for (int m = 0; m < M; ++m) rec.slack[m] = cap[m] - load[m];
    min_bound = std::min(min_bound, rec.bound);

    SlotSolution cand;
    cand.x = terr.x;
    cand.b = std::move(sat.b);
    cand.log = std::move(sat.log);
    cand.evicted = repair_backhaul(p, cand.x, cap, power_mode(pipe.terr), p.sc.wf_iterations);
    cand.sum_rate = sum_rate(cand.x.links, p.ch.h_terr, p.cached, p.lp);
    if (pipe.ideal_backhaul) {
      // Without C7 the unrepaired assignment is admissible too.
      const double raw = sum_rate(terr.x.links, p.ch.h_terr, p.cached, p.lp);
      if (raw >= cand.sum_rate) {
        cand.x = std::move(terr.x);
        cand.sum_rate = raw;
        cand.evicted = 0;
      }
    }
    cand.report = check_constraints(cand.x, cand.b, p.check_inputs());
    cand.feasible = passes(cand.report, pipe);
    rec.primal = cand.sum_rate;
    rec.feasible = cand.feasible;
    dual.history.push_back(rec);

    if (cand.feasible && (!have_best || cand.sum_rate > best.sum_rate)) {
      best = cand;
      have_best = true;
    }
    last = std::move(cand);

    std::vector<double> next(M);
    for (int m = 0; m < M; ++m) next[m] = std::max(0.0, lambda[m] - theta * rec.slack[m] / scale);
    const double theta_next = p.sc.theta0 * std::pow(p.sc.theta_decay, i + 1);
    dual.iter = i + 1;
    dual.theta = theta_next;
    const bool fixed_point = next == lambda;
    lambda = std::move(next);
    if (std::abs(theta_next - theta) <= kThetaTol || fixed_point) {
      converged = true;
      break;
    }
  }

  out = have_best ? std::move(best) : std::move(last);
  dual.lambda = lambda;
  out.dual = std::move(dual);
  out.dual_value = min_bound;
  out.converged = converged;
  out.max_imish_init_rounds = max_init;
  out.max_imish_proposal_rounds = max_prop;
  out.max_uara_iterations = max_uara;
  return out;
}

} // namespace istn
