#include "istn/imish.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "istn/units.hpp"

namespace istn {

namespace {

constexpr double kImproveTol = 1e-12;
constexpr double kCapTol = 1e-9;

double gz(double h) { return std::isnan(h) ? 0.0 : h; }

struct Entry {
  int sat;
  int tbs;
};

struct Move {
  std::vector<std::pair<int, int>> drops; // (sat, sc) units released
  int tbs = -1, sat = -1, sc = -1;        // unit admitted, if tbs >= 0
};

// Mutable satellite-side matching with per-SC cached utilities.
class SatEngine {
public:
  SatEngine(const SlotProblem& p, const std::vector<double>& w, const SatRules& rules)
      : p_(p), w_(w), rules_(rules), N_(p.ch.n_sats()), M_(p.ch.n_tbs()), K_(p.ch.n_sc_sat()),
        power_(p.sc.powers.p_leo_per_sc_w), on_k_(K_), wk_(K_, 0.0), occ_(N_, K_, -1), tbs_links_(M_),
        geo_(p.ch.n_geo_gs(), 0.0), geo_sum_(N_, 0.0) {
    for (int n = 0; n < N_; ++n) {
      for (int l = 0; l < p.ch.n_geo_gs(); ++l) geo_sum_[n] += p.ch.h_geo_gs(n, l);
    }
  }

  void load(const SatMatching& m) {
    for (const auto& s : m.links) {
      Move mv;
      mv.tbs = s.tbs;
      mv.sat = s.sat;
      mv.sc = s.sc;
      apply(mv);
    }
  }

  int n_sats() const { return N_; }
  int n_tbs() const { return M_; }
  int n_sc() const { return K_; }
  int count(int m) const { return static_cast<int>(tbs_links_[m].size()); }
  int holder(int n, int k) const { return occ_(n, k); }
  const std::vector<std::pair<int, int>>& links_of(int m) const { return tbs_links_[m]; }
  const std::vector<Entry>& on_sc(int k) const { return on_k_[k]; }
  double gain(int n, int m, int k) const { return gz(p_.ch.h_sat(n, m, k)); }

  bool usable(int n, int m, int k) const {
    if (!p_.ch.is_visible(n, m)) return false;
    return rules_.fixed_sc == nullptr || (*rules_.fixed_sc)(n, m) == k;
  }

  double total() const {
    double s = 0.0;
    for (double v : wk_) s += v;
    return s;
  }

  double tolerance() const { return kImproveTol * std::max(1.0, std::abs(total())); }

  bool c9_holds() const {
    for (std::size_t l = 0; l < geo_.size(); ++l) {
      if (geo_[l] > p_.i_th[l] * (1.0 + kCapTol)) return false;
    }
    return true;
  }

  const std::vector<double>& geo() const { return geo_; }

  double sc_utility(int k, const std::vector<Entry>& es) const {
    double u = 0.0;
    for (std::size_t i = 0; i < es.size(); ++i) {
      double interference = 0.0;
      for (std::size_t q = 0; q < es.size(); ++q) {
        if (q != i) interference += power_ * gain(es[q].sat, es[i].tbs, k);
      }
      const double sinr = power_ * gain(es[i].sat, es[i].tbs, k) / (interference + p_.lp.noise_ka_w);
      u += w_[es[i].tbs] * p_.lp.b_ka_hz * std::log2(1.0 + sinr);
    }
    return u;
  }

  // Gate value of satellite n once it carries `links_after` links, one of
  // them the admitted (n, m, k).
  double gate_value_db(int n, int m, int k, const Move& mv) const {
    double signal = power_ * gain(n, m, k);
    int links = 1;
    for (int kk = 0; kk < K_; ++kk) {
      const int holder = occ_(n, kk);
      if (holder < 0) continue;
      bool dropped = false;
      for (const auto& d : mv.drops) dropped |= (d.first == n && d.second == kk);
      if (dropped) continue;
      signal += power_ * gain(n, holder, kk);
      ++links;
    }
    const double injected = links * power_ * geo_sum_[n];
    if (p_.sc.handover_mode == HandoverMode::Difference) {
      const double diff = signal - injected;
      return diff > 0.0 ? watt_to_dbm(diff) : -std::numeric_limits<double>::infinity();
    }
    if (injected <= 0.0) return std::numeric_limits<double>::infinity();
    return linear_to_db(signal / injected);
  }

  // Gate value of satellite n over the links it carries now.
  double current_gate_db(int n) const {
    double signal = 0.0;
    int links = 0;
    for (int k = 0; k < K_; ++k) {
      const int holder = occ_(n, k);
      if (holder < 0) continue;
      signal += power_ * gain(n, holder, k);
      ++links;
    }
    const double injected = links * power_ * geo_sum_[n];
    if (p_.sc.handover_mode == HandoverMode::Difference) {
      const double diff = signal - injected;
      return diff > 0.0 ? watt_to_dbm(diff) : -std::numeric_limits<double>::infinity();
    }
    if (injected <= 0.0) return std::numeric_limits<double>::infinity();
    return linear_to_db(signal / injected);
  }

  bool gated() const { return rules_.gate; }
  bool c9_enforced() const { return rules_.enforce_c9; }
  int cap() const { return p_.sc.n_connect; }
  double threshold_db() const { return p_.sc.handover_threshold_db; }

  bool passes_gate(const Move& mv) const {
    if (!rules_.gate || mv.tbs < 0) return true;
    return gate_value_db(mv.sat, mv.tbs, mv.sc, mv) >= p_.sc.handover_threshold_db;
  }

  // Structural admissibility (C4-C6, SC restriction, C9 when enforced).
  bool admissible(const Move& mv) const {
    if (mv.tbs >= 0) {
      if (!usable(mv.sat, mv.tbs, mv.sc)) return false;
      const int h = occ_(mv.sat, mv.sc);
      if (h >= 0) {
        bool released = false;
        for (const auto& d : mv.drops) released |= (d.first == mv.sat && d.second == mv.sc);
        if (!released) return false;
      }
      int after = count(mv.tbs) + 1;
      for (const auto& d : mv.drops) {
        if (occ_(d.first, d.second) == mv.tbs) --after;
      }
      if (after > p_.sc.n_connect) return false;
    }
    if (rules_.enforce_c9) {
      for (std::size_t l = 0; l < geo_.size(); ++l) {
        double v = geo_[l];
        for (const auto& d : mv.drops) v -= power_ * p_.ch.h_geo_gs(d.first, static_cast<int>(l));
        if (mv.tbs >= 0) v += power_ * p_.ch.h_geo_gs(mv.sat, static_cast<int>(l));
        if (v > p_.i_th[l] * (1.0 + kCapTol)) return false;
      }
    }
    return true;
  }

  // Utility change of the move; structural checks are the caller's job.
  double delta(const Move& mv) const {
    int ks[8];
    int nk = 0;
    auto touch = [&](int k) {
      for (int i = 0; i < nk; ++i) {
        if (ks[i] == k) return;
      }
      ks[nk++] = k;
    };
    for (const auto& d : mv.drops) touch(d.second);
    if (mv.tbs >= 0) touch(mv.sc);
    double d = 0.0;
    for (int i = 0; i < nk; ++i) {
      const int k = ks[i];
      std::vector<Entry> es;
      es.reserve(on_k_[k].size() + 1);
      for (const Entry& e : on_k_[k]) {
        bool dropped = false;
        for (const auto& dr : mv.drops) dropped |= (dr.first == e.sat && dr.second == k);
        if (!dropped) es.push_back(e);
      }
      if (mv.tbs >= 0 && mv.sc == k) es.push_back({mv.sat, mv.tbs});
      d += sc_utility(k, es) - wk_[k];
    }
    return d;
  }

  void apply(const Move& mv) {
    for (const auto& [n, k] : mv.drops) {
      const int m = occ_(n, k);
      if (m < 0) throw std::logic_error("dropping an unmatched unit");
      occ_(n, k) = -1;
      auto& es = on_k_[k];
      es.erase(std::find_if(es.begin(), es.end(), [&](const Entry& e) { return e.sat == n; }));
      auto& tl = tbs_links_[m];
      tl.erase(std::find(tl.begin(), tl.end(), std::make_pair(n, k)));
      for (std::size_t l = 0; l < geo_.size(); ++l) geo_[l] -= power_ * p_.ch.h_geo_gs(n, static_cast<int>(l));
      wk_[k] = sc_utility(k, es);
    }
    if (mv.tbs >= 0) {
      occ_(mv.sat, mv.sc) = mv.tbs;
      on_k_[mv.sc].push_back({mv.sat, mv.tbs});
      tbs_links_[mv.tbs].push_back({mv.sat, mv.sc});
      for (std::size_t l = 0; l < geo_.size(); ++l) geo_[l] += power_ * p_.ch.h_geo_gs(mv.sat, static_cast<int>(l));
      wk_[mv.sc] = sc_utility(mv.sc, on_k_[mv.sc]);
    }
    // Exact recompute of the interference sums keeps drift out of C9 checks.
    if (!mv.drops.empty()) {
      std::fill(geo_.begin(), geo_.end(), 0.0);
      for (int k = 0; k < K_; ++k) {
        for (const Entry& e : on_k_[k]) {
          for (std::size_t l = 0; l < geo_.size(); ++l) geo_[l] += power_ * p_.ch.h_geo_gs(e.sat, static_cast<int>(l));
        }
      }
    }
  }

  SatMatching matching() const {
    SatMatching out;
    for (int k = 0; k < K_; ++k) {
      for (const Entry& e : on_k_[k]) out.links.push_back({e.sat, e.tbs, k, power_});
    }
    sort_links(out.links);
    return out;
  }

  double injected(int n) const { return power_ * geo_sum_[n]; }

private:
  const SlotProblem& p_;
  const std::vector<double>& w_;
  SatRules rules_;
  int N_, M_, K_;
  double power_;
  std::vector<std::vector<Entry>> on_k_;
  std::vector<double> wk_;
  Matrix<int> occ_;
  std::vector<std::vector<std::pair<int, int>>> tbs_links_;
  std::vector<double> geo_;
  std::vector<double> geo_sum_;
};

Move add_move(int m, int n, int k) {
  Move mv;
  mv.tbs = m;
  mv.sat = n;
  mv.sc = k;
  return mv;
}

// Candidate admissions of (m, n, k): release the unit's holder if any, then
// optionally one of m's own links.
std::vector<Move> admission_variants(const SatEngine& e, int m, int n, int k) {
  std::vector<Move> out;
  Move base = add_move(m, n, k);
  const int h = e.holder(n, k);
  if (h >= 0) base.drops.push_back({n, k});
  out.push_back(base);
  for (const auto& own : e.links_of(m)) {
    Move v = base;
    v.drops.push_back(own);
    out.push_back(v);
  }
  return out;
}

// Two links of different TBSs trade SCs, or trade units outright. The set
// of transmitting satellites is unchanged, so C9 is too.
bool swap_pass(SatEngine& e, ImishCounters& counters) {
  struct Link {
    int m, n, k;
  };
  std::vector<Link> all;
  for (int m = 0; m < e.n_tbs(); ++m) {
    for (const auto& [n, k] : e.links_of(m)) all.push_back({m, n, k});
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const Link a = all[i], b = all[j];
      if (a.m == b.m) continue;
      const Link trades[2][2] = {{{a.m, a.n, b.k}, {b.m, b.n, a.k}}, {{a.m, b.n, b.k}, {b.m, a.n, a.k}}};
      for (const auto& t : trades) {
        if (t[0].n == a.n && t[0].k == a.k) continue;
        if (t[0].n == t[1].n && t[0].k == t[1].k) continue;
        if (!e.usable(t[0].n, t[0].m, t[0].k) || !e.usable(t[1].n, t[1].m, t[1].k)) continue;
        if (e.holder(t[0].n, t[0].k) >= 0 && !(t[0].n == b.n && t[0].k == b.k)) continue;
        if (e.holder(t[1].n, t[1].k) >= 0 && !(t[1].n == a.n && t[1].k == a.k)) continue;
        const double before = e.total();
        Move out;
        out.drops = {{a.n, a.k}, {b.n, b.k}};
        e.apply(out);
        e.apply(add_move(t[0].m, t[0].n, t[0].k));
        e.apply(add_move(t[1].m, t[1].n, t[1].k));
        bool ok = e.total() > before + kImproveTol * std::max(1.0, std::abs(before));
        if (ok && e.gated()) {
          ok = e.current_gate_db(t[0].n) >= e.threshold_db() && e.current_gate_db(t[1].n) >= e.threshold_db();
        }
        if (ok) {
          ++counters.refinement_moves;
          return true;
        }
        Move back;
        back.drops = {{t[0].n, t[0].k}, {t[1].n, t[1].k}};
        e.apply(back);
        e.apply(add_move(a.m, a.n, a.k));
        e.apply(add_move(b.m, b.n, b.k));
      }
    }
  }
  return false;
}

// Ejection chain: TBS a takes a unit from its holder (releasing one of its
// own links if full), and the evicted TBS re-homes on its best free unit.
bool eject_pass(SatEngine& e, const std::vector<std::vector<int>>& visible, int cap, ImishCounters& counters) {
  struct Link {
    int m, n, k;
  };
  std::vector<Link> all;
  for (int m = 0; m < e.n_tbs(); ++m) {
    for (const auto& [n, k] : e.links_of(m)) all.push_back({m, n, k});
  }
  auto gate_ok = [&](int n) { return !e.gated() || e.current_gate_db(n) >= e.threshold_db(); };
  for (const Link& b : all) {
    for (int a = 0; a < e.n_tbs(); ++a) {
      if (a == b.m || !e.usable(b.n, a, b.k)) continue;
      std::vector<std::pair<int, int>> releases;
      if (e.count(a) < cap) releases.push_back({-1, -1});
      for (const auto& own : e.links_of(a)) releases.push_back(own);
      for (const auto& rel : releases) {
        const double before = e.total();
        Move take = add_move(a, b.n, b.k);
        take.drops.push_back({b.n, b.k});
        if (rel.first >= 0) take.drops.push_back(rel);
        e.apply(take);
        bool ok = gate_ok(b.n);
        Move home;
        if (ok) {
          double best = -std::numeric_limits<double>::infinity();
          for (int n : visible[b.m]) {
            for (int k = 0; k < e.n_sc(); ++k) {
              if (!e.usable(n, b.m, k) || e.holder(n, k) >= 0) continue;
              const Move mv = add_move(b.m, n, k);
              if (!e.admissible(mv) || !e.passes_gate(mv)) continue;
              const double d = e.delta(mv);
              if (d > best) {
                best = d;
                home = mv;
              }
            }
          }
          if (home.tbs >= 0 && best > 0.0) {
            e.apply(home);
          } else {
            home = Move{};
          }
          ok = e.total() > before + kImproveTol * std::max(1.0, std::abs(before));
          if (e.c9_enforced()) ok = ok && e.c9_holds();
        }
        if (ok) {
          ++counters.refinement_moves;
          return true;
        }
        if (home.tbs >= 0) {
          Move undo;
          undo.drops.push_back({home.sat, home.sc});
          e.apply(undo);
        }
        Move undo;
        undo.drops.push_back({b.n, b.k});
        e.apply(undo);
        if (rel.first >= 0) e.apply(add_move(a, rel.first, rel.second));
        e.apply(add_move(b.m, b.n, b.k));
      }
    }
  }
  return false;
}

void run_refinement(SatEngine& e, const std::vector<std::vector<int>>& visible, ImishCounters& counters) {
  const int M = e.n_tbs();
  const int K = e.n_sc();
  bool improved = true;
  while (improved) {
    improved = false;
    for (int m = 0; m < M; ++m) {
      for (int n : visible[m]) {
        for (int k = 0; k < K; ++k) {
          if (!e.usable(n, m, k) || e.holder(n, k) == m) continue;
          double best = e.tolerance();
          Move pick;
          bool found = false;
          for (const Move& mv : admission_variants(e, m, n, k)) {
            if (!e.admissible(mv) || !e.passes_gate(mv)) continue;
            const double d = e.delta(mv);
            if (d > best) {
              best = d;
              pick = mv;
              found = true;
            }
          }
          if (found) {
            e.apply(pick);
            ++counters.refinement_moves;
            improved = true;
          }
        }
      }
    }
    for (int m = 0; m < M; ++m) {
      const auto links = e.links_of(m);
      for (const auto& u : links) {
        Move mv;
        mv.drops.push_back(u);
        if (e.admissible(mv) && e.delta(mv) > e.tolerance()) {
          e.apply(mv);
          ++counters.refinement_moves;
          improved = true;
        }
      }
    }
    if (!improved) improved = swap_pass(e, counters);
    if (!improved) improved = eject_pass(e, visible, e.cap(), counters);
  }
}

std::vector<std::vector<int>> visible_lists(const SlotProblem& p) { return p.ch.visible_sats; }

} // namespace

double sic_preference(double h_cand, double h_cur, double h_ref) {
  if (h_cand > h_ref) return h_cand / h_cur;
  return h_cand;
}

double handover_utility(int n, const std::vector<SatLink>& links, const ChannelState& ch) {
  double u = 0.0;
  for (const auto& s : links) {
    if (s.sat != n) continue;
    u += s.power_w * gz(ch.h_sat(s.sat, s.tbs, s.sc));
    for (int l = 0; l < ch.n_geo_gs(); ++l) u -= s.power_w * ch.h_geo_gs(n, l);
  }
  return u;
}

double handover_utility_db(int n, const std::vector<SatLink>& links, const ChannelState& ch, HandoverMode mode) {
  double signal = 0.0, injected = 0.0;
  for (const auto& s : links) {
    if (s.sat != n) continue;
    signal += s.power_w * gz(ch.h_sat(s.sat, s.tbs, s.sc));
    for (int l = 0; l < ch.n_geo_gs(); ++l) injected += s.power_w * ch.h_geo_gs(n, l);
  }
  if (mode == HandoverMode::Difference) {
    const double diff = signal - injected;
    return diff > 0.0 ? watt_to_dbm(diff) : -std::numeric_limits<double>::infinity();
  }
  if (injected <= 0.0) return std::numeric_limits<double>::infinity();
  return linear_to_db(signal / injected);
}

std::vector<double> sat_weights(const std::vector<double>& lambda, double floor) {
  std::vector<double> w(lambda.size());
  for (std::size_t m = 0; m < lambda.size(); ++m) w[m] = lambda[m] + floor;
  return w;
}

double sat_utility(const std::vector<SatLink>& links, const SlotProblem& p, const std::vector<double>& w) {
  const auto cap = backhaul_capacity(links, p.ch.h_sat, p.lp);
  double u = 0.0;
  for (std::size_t m = 0; m < cap.size(); ++m) u += w[m] * cap[m];
  return u;
}

void sort_links(std::vector<SatLink>& links) {
  std::sort(links.begin(), links.end(), [](const SatLink& a, const SatLink& b) {
    if (a.tbs != b.tbs) return a.tbs < b.tbs;
    if (a.sat != b.sat) return a.sat < b.sat;
    return a.sc < b.sc;
  });
}

void protect_geo_gs(const SlotProblem& p, const std::vector<double>& w, const SatRules& rules, int t,
                    SatMatching& m, HandoverLog& log, ImishCounters& counters) {
  SatRules r = rules;
  r.enforce_c9 = true;
  SatEngine e(p, w, r);
  e.load(m);
  if (e.c9_holds()) return;

  struct Debt {
    int tbs, sat;
  };
  std::vector<Debt> debts;
  const int L = p.ch.n_geo_gs();
  while (!e.c9_holds()) {
    // Most interfering link, measured against the caps it breaks.
    double worst = -1.0;
    int wm = -1, wn = -1, wk = -1;
    for (int mm = 0; mm < e.n_tbs(); ++mm) {
      for (const auto& [n, k] : e.links_of(mm)) {
        double score = 0.0;
        for (int l = 0; l < L; ++l) {
          if (e.geo()[l] <= p.i_th[l] * (1.0 + kCapTol)) continue;
          score += p.sc.powers.p_leo_per_sc_w * p.ch.h_geo_gs(n, l) / std::max(p.i_th[l], 1e-300);
        }
        const bool better = score > worst || (score == worst && std::tie(mm, n, k) < std::tie(wm, wn, wk));
        if (better) {
          worst = score;
          wm = mm;
          wn = n;
          wk = k;
        }
      }
    }
    if (wm < 0) break;
    Move mv;
    mv.drops.push_back({wn, wk});
    e.apply(mv);
    ++counters.removals;
    debts.push_back({wm, wn});
  }

  for (const Debt& d : debts) {
    double best = -std::numeric_limits<double>::infinity();
    Move pick;
    bool found = false;
    bool gated = false;
    for (int n : p.ch.visible_sats[d.tbs]) {
      if (n == d.sat) continue;
      for (int k = 0; k < e.n_sc(); ++k) {
        if (!e.usable(n, d.tbs, k) || e.holder(n, k) >= 0) continue;
        const Move mv = add_move(d.tbs, n, k);
        if (!e.admissible(mv)) continue;
        const double delta = e.delta(mv);
        if (!(delta > 0.0)) continue;
        if (!e.passes_gate(mv)) {
          gated = true;
          continue;
        }
        if (delta > best) {
          best = delta;
          pick = mv;
          found = true;
        }
      }
    }
    if (found) {
      const double u = e.gate_value_db(pick.sat, pick.tbs, pick.sc, pick);
      e.apply(pick);
      log.events.push_back({t, d.tbs, d.sat, pick.sat, u});
    } else if (gated) {
      ++counters.gate_rejections;
    }
  }
  m = e.matching();
}

void refine_sat(const SlotProblem& p, const std::vector<double>& w, const SatRules& rules, SatMatching& m,
                ImishCounters& counters) {
  SatEngine e(p, w, rules);
  e.load(m);
  run_refinement(e, visible_lists(p), counters);
  m = e.matching();
}

ImishResult imish_round(const SlotProblem& p, const std::vector<double>& lambda, const ImishOptions& opt) {
  const auto w = sat_weights(lambda, opt.weight_floor);
  const int M = p.ch.n_tbs();
  const int K = p.ch.n_sc_sat();
  const int cap = p.sc.n_connect;
  const auto& visible = p.ch.visible_sats;

  // The matching stage ignores C9; the protection step restores it.
  SatRules free_rules;
  free_rules.enforce_c9 = false;
  free_rules.gate = false;
  free_rules.fixed_sc = opt.fixed_sc;
  SatEngine e(p, w, free_rules);
  ImishResult res;

  struct Proposal {
    int k;
    Move mv;
    double gain;
  };
  auto settle = [&](std::vector<Proposal>& props, std::vector<char>& open) {
    std::stable_sort(props.begin(), props.end(), [](const Proposal& a, const Proposal& b) {
      if (a.mv.tbs != b.mv.tbs) return a.mv.tbs < b.mv.tbs;
      return a.gain > b.gain;
    });
    for (const Proposal& pr : props) {
      if (e.count(pr.mv.tbs) >= cap) continue;
      if (e.holder(pr.mv.sat, pr.mv.sc) >= 0) continue;
      e.apply(pr.mv);
    }
    for (const Proposal& pr : props) open[pr.mv.tbs] = 0;
  };

  // Initial pass: each SC offers the TBS whose weakest free link is strongest.
  {
    std::vector<char> open(M, 1);
    while (true) {
      std::vector<Proposal> props;
      for (int k = 0; k < K; ++k) {
        double best = -1.0;
        int bm = -1, bn = -1;
        for (int m = 0; m < M; ++m) {
          if (!open[m] || e.count(m) >= cap) continue;
          double worst = std::numeric_limits<double>::infinity();
          int wn = -1;
          for (int n : visible[m]) {
            if (!e.usable(n, m, k) || e.holder(n, k) >= 0) continue;
            const double h = e.gain(n, m, k);
            if (h < worst) {
              worst = h;
              wn = n;
            }
          }
          if (wn >= 0 && worst > best) {
            best = worst;
            bm = m;
            bn = wn;
          }
        }
        if (bm < 0) continue;
        const Move mv = add_move(bm, bn, k);
        const double g = e.delta(mv);
        if (g > 0.0) props.push_back({k, mv, g});
      }
      if (props.empty()) break;
      ++res.counters.init_rounds;
      settle(props, open);
    }
  }

  // Proposal rounds driven by the SIC preference and the weighted capacity.
  {
    std::vector<char> open(M, 0);
    for (int m = 0; m < M; ++m) open[m] = e.count(m) < cap;
    while (true) {
      std::vector<Proposal> props;
      for (int k = 0; k < K; ++k) {
        std::vector<Move> pool;
        for (const Entry& cur : e.on_sc(k)) {
          const double h_cur = e.gain(cur.sat, cur.tbs, k);
          double best_all = -1.0, best_g = -1.0;
          Move pick_all, pick_g;
          for (int m2 = 0; m2 < M; ++m2) {
            if (!open[m2] || e.count(m2) >= cap) continue;
            const double h_ref = p.sc.sic_symmetric ? h_cur : e.gain(cur.sat, m2, k);
            for (int n2 : visible[m2]) {
              if (!e.usable(n2, m2, k) || e.holder(n2, k) >= 0) continue;
              const double h_cand = e.gain(n2, m2, k);
              const double rho = sic_preference(h_cand, h_cur, h_ref);
              if (rho > best_all) {
                best_all = rho;
                pick_all = add_move(m2, n2, k);
              }
              if (h_cand > h_cur && rho > best_g) {
                best_g = rho;
                pick_g = add_move(m2, n2, k);
              }
            }
          }
          if (pick_all.tbs >= 0) pool.push_back(pick_all);
          if (pick_g.tbs >= 0) pool.push_back(pick_g);
        }
        double best = 0.0;
        Move choice;
        for (const Move& mv : pool) {
          const double g = e.delta(mv);
          if (g > best) {
            best = g;
            choice = mv;
          }
        }
        if (choice.tbs >= 0) props.push_back({k, choice, best});
      }
      if (props.empty()) break;
      ++res.counters.proposal_rounds;
      settle(props, open);
    }
  }

  // Settle the unconstrained matching so the protection step sees its
  // stable point, stronger interferers included.
  run_refinement(e, visible, res.counters);

  SatRules rules;
  rules.enforce_c9 = opt.handover;
  rules.gate = opt.handover;
  rules.fixed_sc = opt.fixed_sc;

  res.matching = e.matching();
  if (opt.handover) protect_geo_gs(p, w, rules, p.ch.t, res.matching, res.log, res.counters);
  refine_sat(p, w, rules, res.matching, res.counters);
  return res;
}

std::vector<SatLink> sat_blocking_pairs(const SlotProblem& p, const std::vector<double>& w, const SatRules& rules,
                                        const SatMatching& m) {
  SatEngine e(p, w, rules);
  e.load(m);
  std::vector<SatLink> out;
  const double tol = 1e-9 * std::max(1.0, std::abs(e.total()));
  for (int mm = 0; mm < e.n_tbs(); ++mm) {
    for (int n : p.ch.visible_sats[mm]) {
      for (int k = 0; k < e.n_sc(); ++k) {
        if (!e.usable(n, mm, k) || e.holder(n, k) == mm) continue;
        for (const Move& mv : admission_variants(e, mm, n, k)) {
          if (!e.admissible(mv) || !e.passes_gate(mv)) continue;
          if (e.delta(mv) > tol) {
            out.push_back({n, mm, k, p.sc.powers.p_leo_per_sc_w});
            break;
          }
        }
      }
    }
  }
  return out;
}

} // namespace istn
