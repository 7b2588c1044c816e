#include "istn/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "istn/rng.hpp"

namespace istn {

namespace {

double gz(double h) { return std::isnan(h) ? 0.0 : h; }

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

// Occupancy bookkeeping shared by the simple satellite baselines.
struct SatSlots {
  Matrix<char> used; // (n, k)
  std::vector<int> count;

  SatSlots(int n, int k, int m) : used(n, k, 0), count(m, 0) {}
};

} // namespace

std::optional<AlgorithmId> parse_algorithm(const std::string& name) {
  const std::string s = lower(name);
  if (s == "ciim") return AlgorithmId::CIIM;
  if (s == "jimua") return AlgorithmId::JIMUA;
  if (s == "mdh") return AlgorithmId::MDH;
  if (s == "rraihm") return AlgorithmId::RRAIHM;
  if (s == "greedy_sat" || s == "greedy") return AlgorithmId::GREEDY_SAT;
  if (s == "random_sat" || s == "random") return AlgorithmId::RANDOM_SAT;
  if (s == "uaaa") return AlgorithmId::UAAA;
  if (s == "es") return AlgorithmId::ES;
  return std::nullopt;
}

std::string algorithm_name(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::CIIM: return "ciim";
    case AlgorithmId::JIMUA: return "jimua";
    case AlgorithmId::MDH: return "mdh";
    case AlgorithmId::RRAIHM: return "rraihm";
    case AlgorithmId::GREEDY_SAT: return "greedy_sat";
    case AlgorithmId::RANDOM_SAT: return "random_sat";
    case AlgorithmId::UAAA: return "uaaa";
    case AlgorithmId::ES: return "es";
  }
  return "?";
}

std::vector<AlgorithmId> all_algorithms() {
  return {AlgorithmId::CIIM,       AlgorithmId::JIMUA,      AlgorithmId::MDH,  AlgorithmId::RRAIHM,
          AlgorithmId::GREEDY_SAT, AlgorithmId::RANDOM_SAT, AlgorithmId::UAAA, AlgorithmId::ES};
}

Pipeline pipeline_for(AlgorithmId id) {
  Pipeline p;
  switch (id) {
    case AlgorithmId::CIIM: break;
    case AlgorithmId::JIMUA:
      p.sat = SatAlgo::ImishNoHandover;
      p.enforce_c9 = false;
      break;
    case AlgorithmId::MDH: p.sat = SatAlgo::Mdh; break;
    case AlgorithmId::RRAIHM: p.sat = SatAlgo::Rraihm; break;
    case AlgorithmId::GREEDY_SAT:
      p.sat = SatAlgo::Greedy;
      p.enforce_c9 = false;
      break;
    case AlgorithmId::RANDOM_SAT:
      p.sat = SatAlgo::Random;
      p.enforce_c9 = false;
      break;
    case AlgorithmId::UAAA: p.terr = TerrAlgo::Uaaa; break;
    case AlgorithmId::ES: p.terr = TerrAlgo::Es; break;
  }
  return p;
}

SatOutcome solve_satellite(const SlotProblem& p, SatAlgo algo, const std::vector<double>& lambda) {
  SatOutcome out;
  switch (algo) {
    case SatAlgo::Imish:
    case SatAlgo::ImishNoHandover: {
      ImishOptions opt;
      opt.handover = algo == SatAlgo::Imish;
      auto r = imish_round(p, lambda, opt);
      out.b = std::move(r.matching);
      out.log = std::move(r.log);
      out.counters = r.counters;
      break;
    }
    case SatAlgo::Rraihm: out = rraihm_round(p, lambda); break;
    case SatAlgo::Mdh: out = mdh_round(p, lambda); break;
    case SatAlgo::Greedy: out.b = greedy_sat(p); break;
    case SatAlgo::Random: out.b = random_sat(p); break;
  }
  return out;
}

TerrOutcome solve_terrestrial(const SlotProblem& p, TerrAlgo algo, const std::vector<double>& lambda,
                              int wf_iterations) {
  TerrOutcome out;
  switch (algo) {
    case TerrAlgo::Uara: {
      UaraOptions opt;
      opt.wf_iterations = wf_iterations;
      auto r = uara_round(p, lambda, opt);
      out.x = std::move(r.x);
      out.counters = r.counters;
      break;
    }
    case TerrAlgo::Uaaa: {
      auto r = uaaa_round(p, lambda);
      out.x = std::move(r.x);
      out.counters = r.counters;
      break;
    }
    case TerrAlgo::Es: {
      EsOptions opt;
      opt.lambda = lambda;
      out.x = es_search(p, opt).x;
      break;
    }
  }
  return out;
}

SatOutcome mdh_round(const SlotProblem& p, const std::vector<double>& lambda) {
  const int M = p.ch.n_tbs();
  const int K = p.ch.n_sc_sat();
  const double power = p.sc.powers.p_leo_per_sc_w;
  SatSlots slots(p.ch.n_sats(), K, M);
  SatOutcome out;
  for (int m = 0; m < M; ++m) {
    std::vector<int> sats = p.ch.visible_sats[m];
    std::stable_sort(sats.begin(), sats.end(),
                     [&](int a, int b) { return p.ch.slant_range_m(a, m) < p.ch.slant_range_m(b, m); });
    for (int n : sats) {
      if (slots.count[m] >= p.sc.n_connect) break;
      int best_k = -1;
      for (int k = 0; k < K; ++k) {
        if (slots.used(n, k)) continue;
        if (best_k < 0 || p.ch.h_sat(n, m, k) > p.ch.h_sat(n, m, best_k)) best_k = k;
      }
      if (best_k < 0) continue;
      slots.used(n, best_k) = 1;
      ++slots.count[m];
      out.b.links.push_back({n, m, best_k, power});
    }
  }
  SatRules rules;
  protect_geo_gs(p, sat_weights(lambda, 1e-6), rules, p.ch.t, out.b, out.log, out.counters);
  return out;
}

Matrix<int> random_sc_choice(const SlotProblem& p) {
  const int N = p.ch.n_sats();
  const int M = p.ch.n_tbs();
  Matrix<int> k(N, M, 0);
  auto rng = make_rng(p.sc.rng_seed, Stream::RandomSubchannel, static_cast<std::uint64_t>(p.ch.t));
  std::uniform_int_distribution<int> pick(0, p.ch.n_sc_sat() - 1);
  for (int n = 0; n < N; ++n) {
    for (int m = 0; m < M; ++m) k(n, m) = pick(rng);
  }
  return k;
}

SatOutcome rraihm_round(const SlotProblem& p, const std::vector<double>& lambda) {
  const Matrix<int> fixed = random_sc_choice(p);
  ImishOptions opt;
  opt.fixed_sc = &fixed;
  auto r = imish_round(p, lambda, opt);
  return {std::move(r.matching), std::move(r.log), r.counters};
}

SatMatching greedy_sat(const SlotProblem& p) {
  struct Cand {
    int m, n, k;
    double rate;
  };
  const int K = p.ch.n_sc_sat();
  const double power = p.sc.powers.p_leo_per_sc_w;
  std::vector<Cand> cands;
  for (int m = 0; m < p.ch.n_tbs(); ++m) {
    for (int n : p.ch.visible_sats[m]) {
      for (int k = 0; k < K; ++k) {
        const double rate = p.lp.b_ka_hz * std::log2(1.0 + power * gz(p.ch.h_sat(n, m, k)) / p.lp.noise_ka_w);
        cands.push_back({m, n, k, rate});
      }
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.rate > b.rate; });
  SatSlots slots(p.ch.n_sats(), K, p.ch.n_tbs());
  SatMatching out;
  for (const Cand& c : cands) {
    if (slots.count[c.m] >= p.sc.n_connect || slots.used(c.n, c.k)) continue;
    slots.used(c.n, c.k) = 1;
    ++slots.count[c.m];
    out.links.push_back({c.n, c.m, c.k, power});
  }
  sort_links(out.links);
  return out;
}

SatMatching random_sat(const SlotProblem& p) {
  const int K = p.ch.n_sc_sat();
  const double power = p.sc.powers.p_leo_per_sc_w;
  auto rng = make_rng(p.sc.rng_seed, Stream::RandomSat, static_cast<std::uint64_t>(p.ch.t));
  SatSlots slots(p.ch.n_sats(), K, p.ch.n_tbs());
  SatMatching out;
  for (int m = 0; m < p.ch.n_tbs(); ++m) {
    for (int r = 0; r < p.sc.n_connect; ++r) {
      std::vector<std::pair<int, int>> free_units;
      for (int n : p.ch.visible_sats[m]) {
        for (int k = 0; k < K; ++k) {
          if (!slots.used(n, k)) free_units.push_back({n, k});
        }
      }
      if (free_units.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, free_units.size() - 1);
      const auto [n, k] = free_units[pick(rng)];
      slots.used(n, k) = 1;
      ++slots.count[m];
      out.links.push_back({n, m, k, power});
    }
  }
  sort_links(out.links);
  return out;
}

UaraResult uaaa_round(const SlotProblem& p, const std::vector<double>& lambda) {
  UaraOptions opt;
  opt.power = PowerMode::Equal;
  return uara_round(p, lambda, opt);
}

std::uint64_t es_state_count(int n_tbs, int n_gu, int n_sc) {
  const std::uint64_t base = static_cast<std::uint64_t>(n_gu) + 1;
  const long long units = static_cast<long long>(n_tbs) * n_sc;
  std::uint64_t s = 1;
  for (long long u = 0; u < units; ++u) {
    if (s > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    s *= base;
  }
  return s;
}

EsResult es_search(const SlotProblem& p, const EsOptions& opt) {
  const int M = p.ch.n_tbs();
  const int J = p.ch.n_gu();
  const int C = p.ch.n_sc_terr();
  EsResult res;
  res.states = es_state_count(M, J, C);
  if (res.states > opt.budget) {
    throw std::runtime_error("es_search: " + std::to_string(M) + "x" + std::to_string(C) + " units over " +
                             std::to_string(J) + " GUs exceeds the enumeration budget");
  }
  const std::vector<double> lambda = opt.lambda.empty() ? std::vector<double>(M, 0.0) : opt.lambda;

  const int U = M * C;
  std::vector<int> choice(U, 0); // 0: unit idle, else GU choice-1
  std::vector<char> used(J, 0);
  std::vector<TerrLink> links;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<TerrLink> best_links;

  for (std::uint64_t s = 0; s < res.states; ++s) {
    bool ok = true;
    links.clear();
    for (int u = 0; u < U && ok; ++u) {
      if (choice[u] == 0) continue;
      const int j = choice[u] - 1;
      const int m = u / C;
      if (p.association[j] != m || used[j]) {
        ok = false;
        break;
      }
      used[j] = 1;
      links.push_back({m, j, u % C, 0.0});
    }
    for (const auto& l : links) used[l.gu] = 0;

    if (ok) {
      ++res.feasible;
      bool within = true;
      if (opt.c7_capacity) {
        const auto load = backhaul_load(links, p.cached, p.lp);
        for (int m = 0; m < M; ++m) within &= load[m] <= (*opt.c7_capacity)[m] * (1.0 + 1e-9);
      }
      if (within) {
        allocate_power(p, links, opt.waterfill ? PowerMode::Waterfill : PowerMode::Equal, 1);
        const double v = terr_utility(links, p, lambda);
        if (v > best) {
          best = v;
          best_links = links;
        }
      }
    }

    for (int u = U - 1; u >= 0; --u) {
      if (++choice[u] <= J) break;
      choice[u] = 0;
    }
  }
  res.value = best;
  res.x.association = p.association;
  res.x.links = std::move(best_links);
  sort_links(res.x.links);
  return res;
}

} // namespace istn
