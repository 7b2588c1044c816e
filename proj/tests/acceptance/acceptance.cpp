// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "istn/baselines.hpp"
#include "istn/caching.hpp"
#include "istn/ciim.hpp"
#include "istn/imish.hpp"
#include "istn/instances.hpp"
#include "istn/link_budget.hpp"
#include "istn/metrics_io.hpp"
#include "istn/simulation.hpp"
#include "istn/uara.hpp"
#include "istn/waterfill.hpp"

using namespace istn;
namespace fs = std::filesystem;

namespace {

int g_failed = 0;

// Counters collected from every simulated slot, checked by criterion 11.
struct Bounds {
  long slots = 0;
  long imish_over = 0;
  long uara_over = 0;
} g_bounds;

void report(int id, bool ok, const std::string& detail, double seconds) {
  std::printf("criterion %2d: %s  %s  (%.1f s)\n", id, ok ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failed;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

template <class F>
double best_of(int reps, F&& f) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < reps; ++i) {
    const Stopwatch w;
    f();
    best = std::min(best, w.seconds());
  }
  return best;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunResult simulate(const Scenario& sc, AlgorithmId algo, bool ideal = false) {
  RunOptions opt;
  opt.algo = algo;
  opt.ideal_backhaul = ideal;
  RunResult r = run_simulation(sc, opt);
  for (const auto& s : r.slots) {
    ++g_bounds.slots;
    if (s.imish_proposal_rounds > sc.n_tbs) ++g_bounds.imish_over;
    if (s.uara_iterations > sc.n_gu) ++g_bounds.uara_over;
  }
  return r;
}

double mean_of(const RunResult& r, double SlotMetrics::*field) {
  double s = 0.0;
  for (const auto& m : r.slots) s += m.*field;
  return r.slots.empty() ? 0.0 : s / static_cast<double>(r.slots.size());
}

// Small cell used by the trajectory criteria: full constellation, fewer GUs
// and terrestrial subchannels.
Scenario small_cell(std::uint64_t seed, int slots) {
  Scenario sc;
  sc.n_gu = 30;
  sc.n_sc_terrestrial = 16;
  sc.n_timeslots = slots;
  sc.rng_seed = seed;
  return sc;
}

// ---------------------------------------------------------------- 1

struct TerrOnly {
  Scenario sc;
  ChannelState ch;
  Matrix<char> cached;
};

TerrOnly terrestrial_instance(int gus, int scs, std::uint64_t seed) {
  TerrOnly t;
  t.sc.n_tbs = 2;
  t.sc.n_gu = gus;
  t.sc.n_sc_terrestrial = scs;
  t.sc.rng_seed = seed;
  t.sc.n_timeslots = 1;
  const auto nodes = place_nodes(t.sc);
  const auto tg = sample_terrestrial_gains(t.sc, nodes, 0);
  t.ch.h_terr = tg.h;
  t.ch.mean_terr = tg.mean;
  t.ch.h_sat = Tensor3<double>(0, 2, 1);
  t.ch.visible = Matrix<char>(0, 2);
  t.ch.h_geo_gs = Matrix<double>(0, 1);
  t.ch.h_geo_signal = {1e-13};
  t.ch.visible_sats.assign(2, {});
  t.cached = place_and_request(t.sc, 0).cached;
  return t;
}

void criterion_1() {
  const Stopwatch w;
  const std::pair<int, int> shapes[] = {{4, 2}, {5, 2}, {6, 2}, {6, 3}};
  int below = 0, total = 0;
  double worst = std::numeric_limits<double>::infinity();
  double t_uara = 0.0, t_es = 0.0;
  for (const auto& [gus, scs] : shapes) {
    for (int i = 0; i < 20; ++i) {
      const TerrOnly inst = terrestrial_instance(gus, scs, 1000 + static_cast<std::uint64_t>(i));
      const SlotProblem p(inst.sc, inst.ch, inst.cached);
      const std::vector<double> lambda(2, 0.0);
      const auto u = uara_round(p, lambda, {});
      EsOptions opt;
      opt.lambda = lambda;
      opt.waterfill = true;
      const auto es = es_search(p, opt);
      const double rate = sum_rate(u.x.links, inst.ch.h_terr, inst.cached, p.lp);
      ++total;
      if (rate < 0.99 * es.value) ++below;
      worst = std::min(worst, rate / es.value);
      if (gus == 6 && scs == 3) {
        t_uara += best_of(3, [&] { (void)uara_round(p, lambda, {}); });
        t_es += best_of(3, [&] { (void)es_search(p, opt); });
      }
    }
  }
  const double ratio = t_uara / t_es;
  const bool ok = below == 0 && ratio < 0.01;
  report(1, ok,
         fmt("quality: %d/%d below 0.99 x ES (worst %.4f); runtime at (6,3): UARA %.1f us, ES %.1f us, ratio %.2f%% "
             "(need < 1%%)",
             below, total, worst, t_uara / 20 * 1e6, t_es / 20 * 1e6, ratio * 100.0),
         w.seconds());
}

// ---------------------------------------------------------------- 2

Instance small_instance(std::uint64_t seed) {
  InstanceShape shape;
  shape.tbs = 2;
  shape.gus = 4;
  shape.sc_terr = 2;
  shape.sats = 3;
  shape.local_prob = 0.3;
  return random_instance(shape, seed);
}

void criterion_2() {
  const Stopwatch w;
  int iterations = 0, broken = 0;
  double tightest = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const Instance inst = small_instance(7000 + s);
    const SlotProblem p(inst.scenario, inst.channels, inst.cached);
    std::vector<double> lambda;
    const auto sol = ciim_slot(p, pipeline_for(AlgorithmId::CIIM), lambda);

    // Largest primal value known: every feasible iterate, and the optimal
    // terrestrial assignment under the final satellite matching.
    double primal = sol.feasible ? sol.sum_rate : 0.0;
    for (const auto& it : sol.dual.history) {
      if (it.feasible) primal = std::max(primal, it.primal);
    }
    if (sol.report.passes(Constraint::C9)) {
      EsOptions opt;
      opt.c7_capacity = backhaul_capacity(sol.b.links, inst.channels.h_sat, p.lp);
      opt.waterfill = true;
      primal = std::max(primal, es_search(p, opt).value);
    }
    for (const auto& it : sol.dual.history) {
      ++iterations;
      if (it.bound < primal || it.bound < it.lagrangian * (1.0 - 1e-12)) ++broken;
      if (primal > 0.0) tightest = std::min(tightest, it.bound / primal);
    }
  }
  report(2, broken == 0 && iterations > 0,
         fmt("%d dual iterations over 50 scenarios, %d below a primal value; smallest bound/primal %.4f", iterations,
             broken, tightest),
         w.seconds());
}

// ---------------------------------------------------------------- 3

// Water level by bisection on the spent budget.
double bisect_level(const std::vector<double>& noise, double budget) {
  double lo = 0.0, hi = *std::max_element(noise.begin(), noise.end()) + budget;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    double spent = 0.0;
    for (double n : noise) spent += std::max(0.0, mid - n);
    (spent > budget ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double rate_of(const std::vector<double>& noise, const std::vector<double>& power) {
  double s = 0.0;
  for (std::size_t i = 0; i < noise.size(); ++i) s += std::log2(1.0 + power[i] / noise[i]);
  return s;
}

// Best point of the budget simplex on a grid of `steps` parts.
double grid_best(const std::vector<double>& noise, double budget, int steps) {
  const int n = static_cast<int>(noise.size());
  std::vector<double> p(n, 0.0);
  double best = -1.0;
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      p[i] = budget * left / steps;
      best = std::max(best, rate_of(noise, p));
      return;
    }
    for (int a = 0; a <= left; ++a) {
      p[i] = budget * a / steps;
      rec(i + 1, left - a);
    }
  };
  rec(0, steps);
  return best;
}

int grid_steps(int n) {
  // Largest resolution keeping the simplex grid near 2e4 points.
  int steps = 1;
  for (int s = 2; s <= 2000; ++s) {
    double count = 1.0;
    for (int k = 1; k < n; ++k) count = count * (s + k) / k;
    if (count > 2e4) break;
    steps = s;
  }
  return steps;
}

void criterion_3() {
  const Stopwatch w;
  std::mt19937_64 rng(20241);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> log_noise(-2.0, 1.5);
  std::uniform_real_distribution<double> log_budget(-1.0, 1.5);
  int level_bad = 0, objective_bad = 0;
  double worst_level = 0.0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> noise(dim(rng));
    for (auto& v : noise) v = std::pow(10.0, log_noise(rng));
    const double budget = std::pow(10.0, log_budget(rng));
    const auto r = waterfill(noise, budget);
    const double want = bisect_level(noise, budget);
    const double err = std::abs(r.level - want) / std::max(1.0, want);
    worst_level = std::max(worst_level, err);
    if (err > 1e-6) ++level_bad;
    const double grid = grid_best(noise, budget, grid_steps(static_cast<int>(noise.size())));
    if (rate_of(noise, r.power) < grid - 1e-6) ++objective_bad;
  }
  report(3, level_bad == 0 && objective_bad == 0,
         fmt("1000 instances: %d level mismatches (worst %.2e), %d below the grid optimum", level_bad, worst_level,
             objective_bad),
         w.seconds());
}

// ---------------------------------------------------------------- 4

struct Base {
  Instance inst;
  AssignmentX x;
  AssignmentB b;
  std::vector<double> ith;
};

std::optional<Base> feasible_base(std::uint64_t seed) {
  InstanceShape shape;
  shape.tbs = 3;
  shape.gus = 7;
  shape.sc_terr = 3;
  shape.sats = 5;
  shape.sc_sat = 2;
  shape.visible_prob = 0.6;
  shape.local_prob = 0.6;
  Base out{random_instance(shape, seed), {}, {}, {}};
  const SlotProblem p(out.inst.scenario, out.inst.channels, out.inst.cached);
  std::vector<double> lambda;
  const auto sol = ciim_slot(p, pipeline_for(AlgorithmId::CIIM), lambda);
  out.x = sol.x;
  out.b = sol.b;
  out.ith = p.i_th;
  return out;
}

int tbs_links(const AssignmentB& b, int m) {
  return static_cast<int>(std::count_if(b.links.begin(), b.links.end(), [&](const SatLink& s) { return s.tbs == m; }));
}

bool unit_taken(const AssignmentB& b, int n, int k) {
  return std::any_of(b.links.begin(), b.links.end(), [&](const SatLink& s) { return s.sat == n && s.sc == k; });
}

bool sc_taken(const AssignmentX& x, int m, int c) {
  return std::any_of(x.links.begin(), x.links.end(), [&](const TerrLink& l) { return l.tbs == m && l.sc == c; });
}

bool served(const AssignmentX& x, int j) {
  return std::any_of(x.links.begin(), x.links.end(), [&](const TerrLink& l) { return l.gu == j; });
}

bool geo_within(const Base& b, const std::vector<SatLink>& links) {
  const auto g = geo_gs_interference(links, b.inst.channels.h_geo_gs, b.inst.channels.h_geo_signal,
                                     LinkParams::from(b.inst.scenario));
  for (std::size_t l = 0; l < g.interference_w.size(); ++l) {
    if (g.interference_w[l] > b.ith[l]) return false;
  }
  return true;
}

// Each mutator injects one violation of its constraint and nothing else,
// or returns false when this base offers no such mutation.
bool mutate(Base& s, Constraint target, std::mt19937_64& rng) {
  const auto& ch = s.inst.channels;
  const auto& sc = s.inst.scenario;
  const int M = ch.n_tbs(), J = ch.n_gu(), C = ch.n_sc_terr(), N = ch.n_sats(), K = ch.n_sc_sat();
  auto pick = [&](auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };

  switch (target) {
    case Constraint::C1: { // served by a TBS it is not associated with
      std::vector<std::array<int, 3>> opts;
      for (int j = 0; j < J; ++j) {
        if (served(s.x, j)) continue;
        for (int m = 0; m < M; ++m) {
          if (m == s.x.association[j] || !s.inst.cached(m, j)) continue;
          for (int c = 0; c < C; ++c) {
            if (!sc_taken(s.x, m, c)) opts.push_back({m, j, c});
          }
        }
      }
      if (opts.empty()) return false;
      const auto o = pick(opts);
      s.x.links.push_back({o[0], o[1], o[2], 0.0});
      return true;
    }
    case Constraint::C2: { // a served GU on a second SC
      std::vector<std::array<int, 3>> opts;
      for (const auto& l : s.x.links) {
        if (!s.inst.cached(l.tbs, l.gu)) continue;
        for (int c = 0; c < C; ++c) {
          if (!sc_taken(s.x, l.tbs, c)) opts.push_back({l.tbs, l.gu, c});
        }
      }
      if (opts.empty()) return false;
      const auto o = pick(opts);
      s.x.links.push_back({o[0], o[1], o[2], 0.0});
      return true;
    }
    case Constraint::C3: { // a second GU on an occupied SC
      std::vector<std::array<int, 3>> opts;
      for (const auto& l : s.x.links) {
        for (int j = 0; j < J; ++j) {
          if (!served(s.x, j) && s.x.association[j] == l.tbs && s.inst.cached(l.tbs, j)) opts.push_back({l.tbs, j, l.sc});
        }
      }
      if (opts.empty()) return false;
      const auto o = pick(opts);
      s.x.links.push_back({o[0], o[1], o[2], 0.0});
      return true;
    }
    case Constraint::C4: { // a link to a satellite the TBS cannot see
      std::vector<std::array<int, 3>> opts;
      for (int n = 0; n < N; ++n) {
        for (int m = 0; m < M; ++m) {
          if (ch.is_visible(n, m) || tbs_links(s.b, m) >= sc.n_connect) continue;
          for (int k = 0; k < K; ++k) {
            if (unit_taken(s.b, n, k)) continue;
            auto links = s.b.links;
            links.push_back({n, m, k, sc.powers.p_leo_per_sc_w});
            if (geo_within(s, links)) opts.push_back({n, m, k});
          }
        }
      }
      if (opts.empty()) return false;
      const auto o = pick(opts);
      s.b.links.push_back({o[0], o[1], o[2], sc.powers.p_leo_per_sc_w});
      return true;
    }
    case Constraint::C5: { // one connection more than allowed
      std::vector<int> tbs(M);
      for (int m = 0; m < M; ++m) tbs[m] = m;
      std::shuffle(tbs.begin(), tbs.end(), rng);
      for (int m : tbs) {
        auto links = s.b.links;
        std::vector<std::pair<int, int>> free;
        for (int n = 0; n < N; ++n) {
          if (!ch.is_visible(n, m)) continue;
          for (int k = 0; k < K; ++k) {
            if (!unit_taken(s.b, n, k)) free.push_back({n, k});
          }
        }
        std::shuffle(free.begin(), free.end(), rng);
        int need = sc.n_connect + 1 - tbs_links(s.b, m);
        for (const auto& [n, k] : free) {
          if (need == 0) break;
          links.push_back({n, m, k, sc.powers.p_leo_per_sc_w});
          --need;
        }
        if (need == 0 && geo_within(s, links)) {
          s.b.links = links;
          return true;
        }
      }
      return false;
    }
    case Constraint::C6: { // a unit already in use given to a second TBS
      std::vector<std::array<int, 3>> opts;
      for (const auto& u : s.b.links) {
        for (int m = 0; m < M; ++m) {
          if (m == u.tbs || !ch.is_visible(u.sat, m) || tbs_links(s.b, m) >= sc.n_connect) continue;
          auto links = s.b.links;
          links.push_back({u.sat, m, u.sc, sc.powers.p_leo_per_sc_w});
          if (geo_within(s, links)) opts.push_back({u.sat, m, u.sc});
        }
      }
      if (opts.empty()) return false;
      const auto o = pick(opts);
      s.b.links.push_back({o[0], o[1], o[2], sc.powers.p_leo_per_sc_w});
      return true;
    }
    case Constraint::C7: { // remove a TBS's satellite links while it carries backhaul load
      std::vector<int> tbs;
      for (int m = 0; m < M; ++m) tbs.push_back(m);
      std::shuffle(tbs.begin(), tbs.end(), rng);
      for (int m : tbs) {
        bool loaded = false;
        for (const auto& l : s.x.links) loaded |= (l.tbs == m && !s.inst.cached(m, l.gu));
        if (!loaded) {
          // Serve one unserved backhaul GU at zero power first.
          for (int j = 0; j < J && !loaded; ++j) {
            if (served(s.x, j) || s.x.association[j] != m || s.inst.cached(m, j)) continue;
            for (int c = 0; c < C; ++c) {
              if (sc_taken(s.x, m, c)) continue;
              s.x.links.push_back({m, j, c, 0.0});
              loaded = true;
              break;
            }
          }
        }
        if (!loaded) continue;
        std::erase_if(s.b.links, [&](const SatLink& l) { return l.tbs == m; });
        return true;
      }
      return false;
    }
    case Constraint::C8: { // push one TBS past its power budget
      std::vector<int> tbs;
      for (int m = 0; m < M; ++m) {
        if (std::any_of(s.x.links.begin(), s.x.links.end(), [&](const TerrLink& l) { return l.tbs == m; })) tbs.push_back(m);
      }
      if (tbs.empty()) return false;
      const int m = pick(tbs);
      double spent = 0.0;
      for (const auto& l : s.x.links) spent += l.tbs == m ? l.power_w : 0.0;
      const double excess = std::uniform_real_distribution<double>(0.01, 0.5)(rng) * sc.powers.p_tbs_total_w;
      for (auto& l : s.x.links) {
        if (l.tbs == m) {
          l.power_w += sc.powers.p_tbs_total_w - spent + excess;
          break;
        }
      }
      return true;
    }
    case Constraint::C9: { // move one link onto a satellite that breaks a GEO-GS cap
      std::vector<std::pair<std::size_t, std::array<int, 2>>> opts;
      for (std::size_t i = 0; i < s.b.links.size(); ++i) {
        const int m = s.b.links[i].tbs;
        for (int n = 0; n < N; ++n) {
          if (!ch.is_visible(n, m)) continue;
          for (int k = 0; k < K; ++k) {
            if (unit_taken(s.b, n, k)) continue;
            auto links = s.b.links;
            links[i].sat = n;
            links[i].sc = k;
            if (!geo_within(s, links)) opts.push_back({i, {n, k}});
          }
        }
      }
      if (opts.empty()) return false;
      const auto o = pick(opts);
      s.b.links[o.first].sat = o.second[0];
      s.b.links[o.first].sc = o.second[1];
      return true;
    }
  }
  return false;
}

void criterion_4() {
  const Stopwatch w;
  std::array<int, kConstraintCount> injected{}, exact{};
  int bad_base = 0, wrong = 0;
  std::uint64_t seed = 1;
  std::string first_wrong;
  for (int i = 0; i < 500; ++i) {
    const Constraint target = static_cast<Constraint>(i % kConstraintCount);
    std::mt19937_64 rng(90000 + static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt < 200; ++attempt, ++seed) {
      auto base = feasible_base(seed);
      const SlotProblem p(base->inst.scenario, base->inst.channels, base->inst.cached);
      if (!check_constraints(base->x, base->b, p.check_inputs()).feasible()) {
        ++bad_base;
        continue;
      }
      if (!mutate(*base, target, rng)) continue;
      const auto rep = check_constraints(base->x, base->b, p.check_inputs());
      ++injected[static_cast<int>(target)];
      bool only = !rep.passes(target);
      for (int c = 0; c < kConstraintCount; ++c) {
        if (c != static_cast<int>(target) && !rep.passes(static_cast<Constraint>(c))) only = false;
      }
      if (only) {
        ++exact[static_cast<int>(target)];
      } else {
        ++wrong;
        if (first_wrong.empty()) {
          first_wrong = std::string(" first mismatch: injected ") + constraint_name(target) + ", flagged {" +
                        rep.summary() + "}";
        }
      }
      ++seed;
      break;
    }
  }
  int least = 500;
  std::string per;
  for (int c = 0; c < kConstraintCount; ++c) {
    least = std::min(least, exact[c]);
    per += fmt(" %s=%d", constraint_name(static_cast<Constraint>(c)), exact[c]);
  }
  int total = 0;
  for (int v : injected) total += v;
  const bool ok = total == 500 && wrong == 0 && bad_base == 0 && least >= 50;
  report(4, ok,
         fmt("%d mutations, %d flagged exactly, %d infeasible bases;", total, total - wrong, bad_base) + per + first_wrong,
         w.seconds());
}

// ---------------------------------------------------------------- 5

void criterion_5() {
  const Stopwatch w;
  int slots = 0, breaches = 0;
  double min_cinr = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Scenario sc = small_cell(seed, 100);
    sc.cinr_threshold_db = 0.0;
    const auto r = simulate(sc, AlgorithmId::CIIM);
    for (const auto& s : r.slots) {
      ++slots;
      min_cinr = std::min(min_cinr, s.geo_gs_cinr_db_min);
      if (s.geo_gs_cinr_db_min < sc.cinr_threshold_db - 1e-9 || s.violations.find("C9") != std::string::npos) ++breaches;
    }
  }

  // Adversarial slot: the stronger satellite sits on the GEO-GS boresight.
  Scenario sc = instance_scenario({});
  sc.n_tbs = 2;
  sc.n_gu = 2;
  sc.n_sc_terrestrial = 1;
  sc.n_sc_leo = 1;
  sc.n_geo_gs = 1;
  sc.n_connect = 1;
  sc.interference_threshold_w = 1e-11;
  ChannelState ch;
  ch.h_terr = Tensor3<double>(2, 2, 1, 1e-10);
  ch.mean_terr = Matrix<double>(2, 2, 1e-10);
  ch.mean_terr(1, 1) = 2e-10;
  ch.h_sat = Tensor3<double>(2, 2, 1, 0.0);
  ch.visible = Matrix<char>(2, 2, 1);
  ch.slant_range_m = Matrix<double>(2, 2, 600e3);
  ch.h_sat(0, 0, 0) = ch.h_sat(0, 1, 0) = 4e-11;
  ch.h_sat(1, 0, 0) = ch.h_sat(1, 1, 0) = 1e-11;
  ch.h_geo_gs = Matrix<double>(2, 1, 0.0);
  ch.h_geo_gs(0, 0) = 1e-12;
  ch.h_geo_gs(1, 0) = 1e-16;
  ch.h_geo_signal = {1e-13};
  index_visibility(ch);
  Matrix<char> cached(2, 2, 1);
  cached(0, 0) = cached(1, 1) = 0;
  const SlotProblem p(sc, ch, cached);
  std::vector<double> l1, l2;
  const auto jimua = ciim_slot(p, pipeline_for(AlgorithmId::JIMUA), l1);
  const auto ciim = ciim_slot(p, pipeline_for(AlgorithmId::CIIM), l2);
  const bool jimua_breaks = !jimua.report.passes(Constraint::C9);
  const bool ciim_holds = ciim.report.passes(Constraint::C9);

  report(5, breaches == 0 && slots == 500 && jimua_breaks,
         fmt("handover on, CINR_th 0 dB: %d/%d slots over the cap (lowest GEO-GS CINR %.2f dB); constructed slot: "
             "JIMUA %s the cap, CIIM %s",
             breaches, slots, min_cinr, jimua_breaks ? "breaks" : "keeps", ciim_holds ? "keeps it" : "breaks it"),
         w.seconds());
}

// ---------------------------------------------------------------- 6

void criterion_6() {
  const Stopwatch w;
  const double hs[] = {1.0, 3.0, 5.0, 7.0};
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::vector<int> counts;
    for (double h : hs) {
      Scenario sc = small_cell(seed, 100);
      sc.cinr_threshold_db = 16.0; // tight enough for protection to act
      sc.handover_threshold_db = h;
      const auto r = simulate(sc, AlgorithmId::CIIM);
      counts.push_back(static_cast<int>(r.handovers.size()));
    }
    for (std::size_t i = 1; i < counts.size(); ++i) ok &= counts[i] <= counts[i - 1];
    detail += fmt(" seed %d: %d/%d/%d/%d;", static_cast<int>(seed), counts[0], counts[1], counts[2], counts[3]);
  }
  report(6, ok, "handovers over 100 slots at H = 1/3/5/7 dB," + detail, w.seconds());
}

// ---------------------------------------------------------------- 7

void criterion_7() {
  const Stopwatch w;
  bool order_ok = true;
  std::string order_detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario sc = small_cell(seed, 10);
    const auto ciim = simulate(sc, AlgorithmId::CIIM);
    const auto rraihm = simulate(sc, AlgorithmId::RRAIHM);
    const auto random = simulate(sc, AlgorithmId::RANDOM_SAT);
    const auto mdh = simulate(sc, AlgorithmId::MDH);
    const auto uaaa = simulate(sc, AlgorithmId::UAAA);
    const double b_ciim = mean_of(ciim, &SlotMetrics::backhaul_total_bps);
    const double b_rraihm = mean_of(rraihm, &SlotMetrics::backhaul_total_bps);
    const double b_random = mean_of(random, &SlotMetrics::backhaul_total_bps);
    const double b_mdh = mean_of(mdh, &SlotMetrics::backhaul_total_bps);
    const double r_ciim = mean_of(ciim, &SlotMetrics::sum_rate_bps);
    const double r_uaaa = mean_of(uaaa, &SlotMetrics::sum_rate_bps);
    const bool ok = b_ciim >= b_rraihm && b_rraihm >= b_random && b_ciim >= b_mdh && r_ciim >= r_uaaa;
    if (!ok) {
      order_ok = false;
      order_detail += fmt(" seed %d out of order (IMISH %.4g RRAIHM %.4g Random %.4g MDH %.4g; UARA %.6g UAAA %.6g);",
                          static_cast<int>(seed), b_ciim, b_rraihm, b_random, b_mdh, r_ciim, r_uaaa);
    }
  }

  const int js[] = {50, 100, 200, 400};
  std::vector<double> gaps;
  bool bound_ok = true;
  for (int j : js) {
    double gap = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Scenario sc;
      sc.n_gu = j;
      sc.n_timeslots = 1;
      sc.rng_seed = seed;
      const double real = mean_of(simulate(sc, AlgorithmId::CIIM), &SlotMetrics::sum_rate_bps);
      const double ideal = mean_of(simulate(sc, AlgorithmId::CIIM, true), &SlotMetrics::sum_rate_bps);
      if (real > ideal * (1.0 + 1e-12)) bound_ok = false;
      gap += ideal > 0.0 ? (ideal - real) / ideal : 0.0;
    }
    gaps.push_back(gap / 5.0);
  }
  bool trend_ok = true;
  for (std::size_t i = 1; i < gaps.size(); ++i) trend_ok &= gaps[i] <= gaps[i - 1] + 1e-12;

  report(7, order_ok && bound_ok && trend_ok,
         fmt("orderings %s over 5 seeds; CIIM <= ideal %s; mean gap at J=50/100/200/400: %.3e/%.3e/%.3e/%.3e",
             order_ok ? "hold" : "fail", bound_ok ? "holds" : "fails", gaps[0], gaps[1], gaps[2], gaps[3]) +
             order_detail,
         w.seconds());
}

// ---------------------------------------------------------------- 8

void criterion_8() {
  const Stopwatch w;
  double gain = 0.0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Scenario sc = small_cell(seed, 10);
    sc.n_connect = 3;
    const double three = mean_of(simulate(sc, AlgorithmId::CIIM), &SlotMetrics::backhaul_total_bps);
    sc.n_connect = 5;
    const double five = mean_of(simulate(sc, AlgorithmId::CIIM), &SlotMetrics::backhaul_total_bps);
    const double g = (five - three) / three;
    gain += g;
    detail += fmt(" %+.3f%%", g * 100.0);
  }
  gain /= 5.0;
  report(8, gain <= 0.02, fmt("mean backhaul gain N_r 3 -> 5: %+.3f%% (per seed:", gain * 100.0) + detail + ")",
         w.seconds());
}

// ---------------------------------------------------------------- 9

// Weighted backhaul capacity and admissibility evaluated from scratch.
struct SatScan {
  const SlotProblem& p;
  std::vector<double> w;

  double utility(const std::vector<SatLink>& links) const {
    const auto cap = backhaul_capacity(links, p.ch.h_sat, p.lp);
    double u = 0.0;
    for (std::size_t m = 0; m < cap.size(); ++m) u += w[m] * cap[m];
    return u;
  }

  bool admissible(const std::vector<SatLink>& links, const SatLink& added) const {
    const auto g = geo_gs_interference(links, p.ch.h_geo_gs, p.ch.h_geo_signal, p.lp);
    for (std::size_t l = 0; l < g.interference_w.size(); ++l) {
      if (g.interference_w[l] > p.i_th[l] * (1.0 + 1e-9)) return false;
    }
    int count = 0;
    for (const auto& s : links) count += s.tbs == added.tbs;
    if (count > p.sc.n_connect) return false;
    return handover_utility_db(added.sat, links, p.ch, p.sc.handover_mode) >= p.sc.handover_threshold_db;
  }

  // Pairs (m, (n, k)) outside the matching whose admission, evicting the
  // unit's holder and optionally one of m's links, raises the utility.
  int blocking(const std::vector<SatLink>& links) const {
    const double base = utility(links);
    const double tol = 1e-9 * std::max(1.0, std::abs(base));
    int found = 0;
    for (int m = 0; m < p.ch.n_tbs(); ++m) {
      for (int n = 0; n < p.ch.n_sats(); ++n) {
        if (!p.ch.is_visible(n, m)) continue;
        for (int k = 0; k < p.ch.n_sc_sat(); ++k) {
          bool mine = false;
          std::vector<SatLink> rest;
          for (const auto& s : links) {
            if (s.sat == n && s.sc == k) {
              mine = s.tbs == m;
              continue;
            }
            rest.push_back(s);
          }
          if (mine) continue;
          const SatLink add{n, m, k, p.sc.powers.p_leo_per_sc_w};
          std::vector<std::vector<SatLink>> variants;
          auto v = rest;
          v.push_back(add);
          variants.push_back(v);
          for (std::size_t i = 0; i < rest.size(); ++i) {
            if (rest[i].tbs != m) continue;
            auto u = rest;
            u.erase(u.begin() + static_cast<std::ptrdiff_t>(i));
            u.push_back(add);
            variants.push_back(u);
          }
          for (const auto& cand : variants) {
            if (admissible(cand, add) && utility(cand) > base + tol) {
              ++found;
              break;
            }
          }
        }
      }
    }
    return found;
  }
};

double equal_split_utility(const SlotProblem& p, const std::vector<double>& lambda, std::vector<TerrLink> links) {
  std::vector<int> active(p.ch.n_tbs(), 0);
  for (const auto& l : links) ++active[l.tbs];
  for (auto& l : links) l.power_w = p.lp.p_tbs_total_w / active[l.tbs];
  double u = 0.0;
  for (const auto& l : links) {
    double den = p.lp.noise_c_w;
    for (const auto& o : links) {
      if (o.sc == l.sc && o.tbs != l.tbs) den += o.power_w * p.ch.h_terr(o.tbs, l.gu, o.sc);
    }
    double r = p.lp.b_c_hz * std::log2(1.0 + l.power_w * p.ch.h_terr(l.tbs, l.gu, l.sc) / den);
    if (p.is_backhaul(l.gu)) r = std::min(r, p.lp.u_back_bps) - lambda[l.tbs] * p.lp.u_back_bps;
    u += r;
  }
  return u;
}

// Adoptions of a unit at the GU's own TBS (holder evicted) and drops that
// raise the equal-split utility.
int terr_blocking(const SlotProblem& p, const std::vector<double>& lambda, const std::vector<TerrLink>& links) {
  const double base = equal_split_utility(p, lambda, links);
  const double tol = 1e-9 * std::max(1.0, std::abs(base));
  int found = 0;
  for (int j = 0; j < p.ch.n_gu(); ++j) {
    const int m = p.association[j];
    for (int c = 0; c < p.ch.n_sc_terr(); ++c) {
      std::vector<TerrLink> next;
      bool already = false;
      for (const auto& l : links) {
        if (l.gu == j && l.sc == c) already = true;
        if (l.gu == j || (l.tbs == m && l.sc == c)) continue;
        next.push_back(l);
      }
      if (already) continue;
      next.push_back({m, j, c, 0.0});
      if (equal_split_utility(p, lambda, next) > base + tol) ++found;
    }
  }
  for (std::size_t i = 0; i < links.size(); ++i) {
    auto next = links;
    next.erase(next.begin() + static_cast<std::ptrdiff_t>(i));
    if (equal_split_utility(p, lambda, next) > base + tol) ++found;
  }
  return found;
}

void criterion_9() {
  const Stopwatch w;
  int sat_cases = 0, sat_pairs = 0, terr_cases = 0, terr_pairs = 0;
  std::uint64_t seed = 0;
  for (int M = 1; M <= 3; ++M) {
    for (int N = 1; N <= 4; ++N) {
      for (int K = 1; K <= 2; ++K) {
        for (int nr = 1; nr <= 2; ++nr) {
          for (int rep = 0; rep < 4; ++rep) {
            InstanceShape shape;
            shape.tbs = M;
            shape.sats = N;
            shape.sc_sat = K;
            shape.visible_prob = 0.8;
            Instance inst = random_instance(shape, 30000 + ++seed);
            inst.scenario.n_connect = nr;
            const SlotProblem p(inst.scenario, inst.channels, inst.cached);
            std::vector<double> lambda(M);
            for (int m = 0; m < M; ++m) lambda[m] = 0.5 * ((seed + m) % 3);
            const auto r = imish_round(p, lambda, {});
            const SatScan scan{p, sat_weights(lambda, ImishOptions{}.weight_floor)};
            ++sat_cases;
            sat_pairs += scan.blocking(r.matching.links);
          }
        }
      }
    }
  }
  for (int J = 1; J <= 5; ++J) {
    for (int M = 1; M <= 2; ++M) {
      for (int C = 1; C <= 2; ++C) {
        for (int rep = 0; rep < 6; ++rep) {
          InstanceShape shape;
          shape.tbs = M;
          shape.gus = J;
          shape.sc_terr = C;
          const Instance inst = random_instance(shape, 40000 + ++seed);
          const SlotProblem p(inst.scenario, inst.channels, inst.cached);
          std::vector<double> lambda(M);
          for (int m = 0; m < M; ++m) lambda[m] = (seed + m) % 2 ? 0.0 : 3.0;
          const auto r = uara_round(p, lambda, {});
          ++terr_cases;
          terr_pairs += terr_blocking(p, lambda, r.x.links);
        }
      }
    }
  }
  report(9, sat_pairs == 0 && terr_pairs == 0,
         fmt("satellite side: %d blocking pairs over %d instances; terrestrial side: %d over %d instances", sat_pairs,
             sat_cases, terr_pairs, terr_cases),
         w.seconds());
}

// ---------------------------------------------------------------- 10

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

// Compares every file of two output trees byte for byte.
bool same_tree(const fs::path& a, const fs::path& b, int& files) {
  std::vector<fs::path> names;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) names.push_back(fs::relative(e.path(), a));
  }
  int other = 0;
  for (const auto& e : fs::recursive_directory_iterator(b)) other += e.is_regular_file();
  if (names.empty() || other != static_cast<int>(names.size())) return false;
  for (const auto& n : names) {
    if (!fs::exists(b / n) || slurp(a / n) != slurp(b / n)) return false;
  }
  files += static_cast<int>(names.size());
  return true;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + ISTN_SIM_PATH + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

void criterion_10() {
  const Stopwatch w;
  const fs::path root = fs::temp_directory_path() / "istn_acceptance_repro";
  fs::remove_all(root);
  const std::string configs = ISTN_CONFIG_DIR;
  bool ok = true;
  int files = 0;
  for (const char* tag : {"a", "b"}) {
    ok &= run_cli("run --scenario \"" + configs + "/small_cell.toml\" --timeslots 5 --out \"" +
                  (root / "run" / tag).string() + "\"") == 0;
    ok &= run_cli("sweep --spec \"" + configs + "/sweep_repro.toml\" --out \"" + (root / "sweep" / tag).string() +
                  "\"") == 0;
  }
  if (ok) ok = same_tree(root / "run" / "a", root / "run" / "b", files);
  if (ok) ok = same_tree(root / "sweep" / "a", root / "sweep" / "b", files);
  fs::remove_all(root);
  report(10, ok, fmt("run and sweep executed twice: %d output files %s", files, ok ? "identical" : "differ or missing"),
         w.seconds());
}

// ---------------------------------------------------------------- 11

void criterion_11() {
  report(11, g_bounds.slots > 0 && g_bounds.imish_over == 0 && g_bounds.uara_over == 0,
         fmt("%ld simulated slots: %ld over the IMISH round bound, %ld over the UARA iteration bound", g_bounds.slots,
             g_bounds.imish_over, g_bounds.uara_over),
         0.0);
}

} // namespace

int main(int argc, char** argv) {
  // Optional list of criterion numbers to run; all by default. Criterion 11
  // reads the counters of whichever simulations ran before it.
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
  auto want = [&](int id) { return pick.empty() || std::find(pick.begin(), pick.end(), id) != pick.end(); };
  const std::function<void()> checks[] = {criterion_1, criterion_2, criterion_3, criterion_4,  criterion_5, criterion_6,
                                          criterion_7, criterion_8, criterion_9, criterion_10, criterion_11};
  for (int id = 1; id <= 11; ++id) {
    if (want(id)) checks[id - 1]();
  }
  return g_failed == 0 ? 0 : 1;
}
