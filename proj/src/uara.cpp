#include "istn/uara.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>

#include "istn/waterfill.hpp"

namespace istn {

namespace {

constexpr double kImproveTol = 1e-12;

struct Entry {
  int gu;
  int tbs;
};

// GU reassignments; new_sc < 0 leaves the GU unserved.
using Move = std::vector<std::pair<int, int>>;

// Row-to-column assignment of minimum total cost for rows <= cols
// (Hungarian method with potentials, O(rows^2 cols)). Buffers are reused
// across calls.
class Assignment {
public:
  // cost is row-major rows x cols; returns the column of each row
  const std::vector<int>& solve(const std::vector<double>& cost, int n, int m) {
    const double inf = std::numeric_limits<double>::infinity();
    u_.assign(n + 1, 0.0);
    v_.assign(m + 1, 0.0);
    p_.assign(m + 1, 0);
    way_.assign(m + 1, 0);
    for (int i = 1; i <= n; ++i) {
      p_[0] = i;
      int j0 = 0;
      minv_.assign(m + 1, inf);
      used_.assign(m + 1, 0);
      do {
        used_[j0] = 1;
        const int i0 = p_[j0];
        double d = inf;
        int j1 = 0;
        for (int j = 1; j <= m; ++j) {
          if (used_[j]) continue;
          const double cur = cost[static_cast<std::size_t>(i0 - 1) * m + (j - 1)] - u_[i0] - v_[j];
          if (cur < minv_[j]) {
            minv_[j] = cur;
            way_[j] = j0;
          }
          if (minv_[j] < d) {
            d = minv_[j];
            j1 = j;
          }
        }
        for (int j = 0; j <= m; ++j) {
          if (used_[j]) {
            u_[p_[j]] += d;
            v_[j] -= d;
          } else {
            minv_[j] -= d;
          }
        }
        j0 = j1;
      } while (p_[j0] != 0);
      do {
        const int j1 = way_[j0];
        p_[j0] = p_[j1];
        j0 = j1;
      } while (j0 != 0);
    }
    col_.assign(n, -1);
    for (int j = 1; j <= m; ++j) {
      if (p_[j] > 0) col_[p_[j] - 1] = j - 1;
    }
    return col_;
  }

private:
  std::vector<double> u_, v_, minv_;
  std::vector<int> p_, way_, col_;
  std::vector<char> used_;
};

// Matching state scored with each TBS's budget split equally over its
// occupied units, the same power model UAAA ends with.
class TerrEngine {
public:
  TerrEngine(const SlotProblem& p, const std::vector<double>& lambda)
      : p_(p), lambda_(lambda), M_(p.ch.n_tbs()), J_(p.ch.n_gu()), C_(p.ch.n_sc_terr()), on_c_(C_), uc_(C_, 0.0),
        occ_(M_, C_, -1), gu_sc_(J_, -1), active_(M_, 0), backhaul_(J_, 0), tbs_gus_(M_) {
    for (int j = 0; j < J_; ++j) {
      backhaul_[j] = p.is_backhaul(j);
      if (tbs_of(j) >= 0) tbs_gus_[tbs_of(j)].push_back(j);
    }
    alone_memo_.resize(M_);
  }

  void load(const std::vector<TerrLink>& links) {
    for (const auto& l : links) apply({{l.gu, l.sc}});
  }

  int n_gu() const { return J_; }
  int n_sc() const { return C_; }
  int tbs_of(int j) const { return p_.association[j]; }
  int sc_of(int j) const { return gu_sc_[j]; }
  int holder(int m, int c) const { return occ_(m, c); }
  bool backhaul(int j) const { return backhaul_[j] != 0; }
  const std::vector<Entry>& on_sc(int c) const { return on_c_[c]; }
  double gain(int m, int j, int c) const { return p_.ch.h_terr(m, j, c); }

  double total() const { return total_; }
  double tolerance() const { return kImproveTol * std::max(1.0, std::abs(total())); }

  double delta(const Move& mv) const {
    std::vector<int>& count = count_;
    count = active_;
    for (const auto& [j, c] : mv) {
      if (gu_sc_[j] >= 0) --count[tbs_of(j)];
      if (c >= 0) ++count[tbs_of(j)];
    }
    std::vector<int>& cs = touched_;
    cs.clear();
    auto touch = [&](int c) {
      if (c >= 0 && std::find(cs.begin(), cs.end(), c) == cs.end()) cs.push_back(c);
    };
    for (const auto& [j, c] : mv) {
      touch(gu_sc_[j]);
      touch(c);
    }
    // a TBS whose unit count changes re-splits power on all its units
    for (int m = 0; m < M_; ++m) {
      if (count[m] == active_[m]) continue;
      for (int c = 0; c < C_; ++c) {
        if (occ_(m, c) >= 0) touch(c);
      }
    }
    double d = 0.0;
    std::vector<Entry>& es = entries_;
    for (int c : cs) {
      es.clear();
      for (const Entry& e : on_c_[c]) {
        bool moved = false;
        for (const auto& mvj : mv) moved |= (mvj.first == e.gu);
        if (!moved) es.push_back(e);
      }
      for (const auto& [j, c2] : mv) {
        if (c2 == c) es.push_back({j, tbs_of(j)});
      }
      d += sc_utility(c, es, count) - uc_[c];
    }
    return d;
  }

  void apply(const Move& mv) {
    std::vector<int>& dirty = dirty_;
    dirty.clear();
    std::vector<int>& before = count_;
    before = active_;
    for (const auto& [j, c] : mv) {
      const int old = gu_sc_[j];
      if (old < 0) continue;
      auto& es = on_c_[old];
      es.erase(std::find_if(es.begin(), es.end(), [&](const Entry& e) { return e.gu == j; }));
      occ_(tbs_of(j), old) = -1;
      gu_sc_[j] = -1;
      --active_[tbs_of(j)];
      dirty.push_back(old);
    }
    for (const auto& [j, c] : mv) {
      if (c < 0) continue;
      on_c_[c].push_back({j, tbs_of(j)});
      occ_(tbs_of(j), c) = j;
      gu_sc_[j] = c;
      ++active_[tbs_of(j)];
      dirty.push_back(c);
    }
    for (int m = 0; m < M_; ++m) {
      if (active_[m] == before[m]) continue;
      for (int c = 0; c < C_; ++c) {
        if (occ_(m, c) >= 0) dirty.push_back(c);
      }
    }
    std::sort(dirty.begin(), dirty.end());
    dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());
    for (int c : dirty) {
      const double u = sc_utility(c, on_c_[c], active_);
      total_ += u - uc_[c];
      uc_[c] = u;
    }
  }

  std::vector<TerrLink> links() const {
    std::vector<TerrLink> out;
    for (int c = 0; c < C_; ++c) {
      for (const Entry& e : on_c_[c]) out.push_back({e.tbs, e.gu, c, split(e.tbs, active_)});
    }
    sort_links(out);
    return out;
  }

  // Candidate reassignment of every GU of TBS m onto exactly k units, from a
  // max-weight assignment: own rate at power P/k against the current
  // co-channel users of other TBSs, less the rate those users lose to it.
  // Only the engine's delta decides whether to take it.
  // With `alone` the other TBSs are ignored, a start point for lookahead.
  Move best_response(int m, int k, bool alone = false) const {
    const std::vector<int>& gus = tbs_gus_[m];
    const int n = static_cast<int>(gus.size());
    if (k < 0 || k > std::min(n, C_)) return {};
    Move mv;
    if (k == 0) {
      for (int j : gus) {
        if (gu_sc_[j] >= 0) mv.push_back({j, -1});
      }
      return mv;
    }
    // without the other TBSs the assignment never changes; cache it
    std::vector<int>* memo = nullptr;
    if (alone) {
      auto& per_k = alone_memo_[m];
      if (per_k.size() <= static_cast<std::size_t>(k)) per_k.resize(k + 1);
      memo = &per_k[k];
      if (!memo->empty()) {
        for (int r = 0; r < n; ++r) {
          if ((*memo)[r] != gu_sc_[gus[r]]) mv.push_back({gus[r], (*memo)[r]});
        }
        return mv;
      }
    }
    const double pw = p_.lp.p_tbs_total_w / k;
    std::vector<double>& w = weight_;
    w.assign(static_cast<std::size_t>(n) * C_, 0.0);
    std::vector<Entry>& others = entries_;
    for (int c = 0; c < C_; ++c) {
      others.clear();
      if (!alone) {
        for (const Entry& e : on_c_[c]) {
          if (e.tbs != m) others.push_back(e);
        }
      }
      double loss = 0.0;
      for (std::size_t i = 0; i < others.size(); ++i) {
        double interference = 0.0;
        for (std::size_t q = 0; q < others.size(); ++q) {
          if (q != i) interference += split(others[q].tbs, active_) * gain(others[q].tbs, others[i].gu, c);
        }
        const double sig = split(others[i].tbs, active_) * gain(others[i].tbs, others[i].gu, c);
        const double n0 = interference + p_.lp.noise_c_w;
        const bool b = backhaul(others[i].gu);
        loss += gu_rate(sig / n0, b, p_.lp.u_back_bps, p_.lp.b_c_hz) -
                gu_rate(sig / (n0 + pw * gain(m, others[i].gu, c)), b, p_.lp.u_back_bps, p_.lp.b_c_hz);
      }
      for (int r = 0; r < n; ++r) {
        const int j = gus[r];
        double interference = 0.0;
        for (const Entry& e : others) interference += split(e.tbs, active_) * gain(e.tbs, j, c);
        const bool b = backhaul(j);
        double u = gu_rate(pw * gain(m, j, c) / (interference + p_.lp.noise_c_w), b, p_.lp.u_back_bps, p_.lp.b_c_hz);
        if (b) u -= lambda_[m] * p_.lp.u_back_bps;
        w[static_cast<std::size_t>(r) * C_ + c] = u - loss;
      }
    }

    // A size-k optimum only uses rows that rank in the top k of some
    // column, and then only columns in the top k of some kept row.
    std::vector<double>& top = rank_;
    std::vector<int>& rows = rows_;
    std::vector<int>& cs = cols_;
    rows.clear();
    cs.clear();
    std::vector<char>& keep = keep_;
    keep.assign(n, 0);
    for (int c = 0; c < C_; ++c) {
      top.clear();
      for (int r = 0; r < n; ++r) top.push_back(w[static_cast<std::size_t>(r) * C_ + c]);
      std::nth_element(top.begin(), top.begin() + (k - 1), top.end(), std::greater<>());
      const double cut = top[k - 1];
      for (int r = 0; r < n; ++r) keep[r] |= w[static_cast<std::size_t>(r) * C_ + c] >= cut;
    }
    for (int r = 0; r < n; ++r) {
      if (keep[r]) rows.push_back(r);
    }
    keep.assign(C_, 0);
    for (int r : rows) {
      top.assign(w.begin() + static_cast<std::ptrdiff_t>(r) * C_, w.begin() + static_cast<std::ptrdiff_t>(r + 1) * C_);
      std::nth_element(top.begin(), top.begin() + (k - 1), top.end(), std::greater<>());
      const double cut = top[k - 1];
      for (int c = 0; c < C_; ++c) keep[c] |= w[static_cast<std::size_t>(r) * C_ + c] >= cut;
    }
    for (int c = 0; c < C_; ++c) {
      if (keep[c]) cs.push_back(c);
    }

    // rows - k dummy columns priced so every one of them gets used, leaving
    // exactly k GUs on real subchannels
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(cs.size());
    const int cols = nc + nr - k;
    double mag = 1.0;
    for (int r : rows) {
      for (int c : cs) mag += std::abs(w[static_cast<std::size_t>(r) * C_ + c]);
    }
    std::vector<double>& cost = cost_;
    cost.assign(static_cast<std::size_t>(nr) * cols, -2.0 * mag);
    for (int i = 0; i < nr; ++i) {
      for (int q = 0; q < nc; ++q) cost[static_cast<std::size_t>(i) * cols + q] = -w[static_cast<std::size_t>(rows[i]) * C_ + cs[q]];
    }
    const std::vector<int>& col = solver_.solve(cost, nr, cols);
    std::vector<int>& target = target_;
    target.assign(n, -1);
    for (int i = 0; i < nr; ++i) {
      if (col[i] < nc) target[rows[i]] = cs[col[i]];
    }
    if (memo) *memo = target;
    for (int r = 0; r < n; ++r) {
      if (target[r] != gu_sc_[gus[r]]) mv.push_back({gus[r], target[r]});
    }
    return mv;
  }

  int active(int m) const { return active_[m]; }
  int n_tbs() const { return M_; }

  // The move that undoes `mv` from the current state.
  Move inverse(const Move& mv) const {
    Move inv;
    for (const auto& [j, c] : mv) inv.push_back({j, gu_sc_[j]});
    return inv;
  }

private:
  double split(int m, const std::vector<int>& count) const {
    return count[m] > 0 ? p_.lp.p_tbs_total_w / count[m] : 0.0;
  }

  double sc_utility(int c, const std::vector<Entry>& es, const std::vector<int>& count) const {
    double u = 0.0;
    for (std::size_t i = 0; i < es.size(); ++i) {
      double interference = 0.0;
      for (std::size_t q = 0; q < es.size(); ++q) {
        if (q != i) interference += split(es[q].tbs, count) * gain(es[q].tbs, es[i].gu, c);
      }
      const double sinr = split(es[i].tbs, count) * gain(es[i].tbs, es[i].gu, c) / (interference + p_.lp.noise_c_w);
      const bool b = backhaul(es[i].gu);
      u += gu_rate(sinr, b, p_.lp.u_back_bps, p_.lp.b_c_hz);
      if (b) u -= lambda_[es[i].tbs] * p_.lp.u_back_bps;
    }
    return u;
  }

  const SlotProblem& p_;
  const std::vector<double>& lambda_;
  int M_, J_, C_;
  std::vector<std::vector<Entry>> on_c_;
  std::vector<double> uc_;
  double total_ = 0.0;
  Matrix<int> occ_;
  std::vector<int> gu_sc_;
  std::vector<int> active_;
  std::vector<char> backhaul_;
  std::vector<std::vector<int>> tbs_gus_;
  // scratch
  mutable std::vector<int> count_, touched_;
  std::vector<int> dirty_;
  mutable std::vector<Entry> entries_;
  mutable std::vector<double> cost_, weight_, rank_;
  mutable std::vector<int> rows_, cols_, target_;
  mutable std::vector<char> keep_;
  mutable std::vector<std::vector<std::vector<int>>> alone_memo_; // [tbs][k] -> SC per GU
  mutable Assignment solver_;
};

// Moves that put GU j on its TBS's subchannel c: plain adoption, or with
// the unit's holder dropped or sent to j's old SC. Each also comes with a
// variant that silences one co-channel user of another TBS. Written into
// `out` (reused between calls); returns how many.
std::size_t adoption_variants(const TerrEngine& e, int j, int c, std::vector<Move>& out) {
  std::size_t n = 0;
  auto next = [&]() -> Move& {
    if (n == out.size()) out.emplace_back();
    Move& mv = out[n++];
    mv.clear();
    return mv;
  };
  const int m = e.tbs_of(j);
  const int o = e.holder(m, c);
  if (o == j) return 0;
  if (o < 0) {
    next().push_back({j, c});
  } else {
    Move& drop = next();
    drop.push_back({o, -1});
    drop.push_back({j, c});
    const int c0 = e.sc_of(j);
    if (c0 >= 0) {
      Move& send = next();
      send.push_back({o, c0});
      send.push_back({j, c});
    }
  }
  const std::size_t base = n;
  for (const Entry& x : e.on_sc(c)) {
    if (x.tbs == m) continue;
    for (std::size_t v = 0; v < base; ++v) {
      Move& mv = next();
      mv = out[v];
      mv.push_back({x.gu, -1});
    }
  }
  return n;
}

// Best response of every TBS at its current unit count and one either side.
// Returns the number of moves applied.
int respond_all(TerrEngine& e, int skip, std::vector<Move>& undo) {
  int moves = 0;
  for (int m = 0; m < e.n_tbs(); ++m) {
    if (m == skip) continue;
    const int cur = e.active(m);
    for (int k = std::max(0, cur - 1); k <= cur + 1; ++k) {
      const Move mv = e.best_response(m, k);
      if (!mv.empty() && e.delta(mv) > e.tolerance()) {
        undo.push_back(e.inverse(mv));
        e.apply(mv);
        ++moves;
      }
    }
  }
  return moves;
}

// Two-TBS lookahead: one TBS reshuffles even at a loss, the others respond;
// kept only if the total ends higher.
bool paired_reshuffle(TerrEngine& e, UaraCounters& counters) {
  if (e.n_tbs() < 2) return false;
  std::vector<Move> undo;
  Move prev;
  for (int m = 0; m < e.n_tbs(); ++m) {
    const int cur = e.active(m);
    for (int t = 0; t < 6; ++t) {
      const int k = std::max(0, cur - 1) + t / 2;
      const bool alone = t % 2 == 1;
      if (k > cur + 1) break;
      if (k == 0 && alone) continue;
      if (!alone && k >= cur && cur > 0) continue;
      Move mv = e.best_response(m, k, alone);
      if (mv.empty() || (alone && mv == prev)) continue;
      const double before = e.total();
      undo.clear();
      undo.push_back(e.inverse(mv));
      e.apply(mv);
      int moves = respond_all(e, m, undo);
      for (int round = 0, more = moves; more > 0 && round < 8; ++round) {
        if (e.total() > before + e.tolerance()) break;
        more = respond_all(e, -1, undo);
        moves += more;
      }
      if (moves > 0 && e.total() > before + e.tolerance()) {
        counters.refinement_moves += moves + 1;
        return true;
      }
      for (auto it = undo.rbegin(); it != undo.rend(); ++it) e.apply(*it);
      prev = std::move(mv);
    }
  }
  return false;
}

void local_search(TerrEngine& e, UaraCounters& counters) {
  std::vector<Move> variants;
  Move pick;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int j = 0; j < e.n_gu(); ++j) {
      for (int c = 0; c < e.n_sc(); ++c) {
        double best = e.tolerance();
        pick.clear();
        const std::size_t n = adoption_variants(e, j, c, variants);
        for (std::size_t v = 0; v < n; ++v) {
          const double d = e.delta(variants[v]);
          if (d > best) {
            best = d;
            pick = variants[v];
          }
        }
        if (!pick.empty()) {
          e.apply(pick);
          ++counters.refinement_moves;
          improved = true;
        }
      }
      if (e.sc_of(j) >= 0) {
        const Move drop{{j, -1}};
        if (e.delta(drop) > e.tolerance()) {
          e.apply(drop);
          ++counters.refinement_moves;
          improved = true;
        }
      }
    }
    // GUs of different TBSs trading subchannels; neither single move above
    // can reach this when the intermediate state collides on one SC.
    for (int a = 0; a < e.n_gu(); ++a) {
      for (int b = a + 1; b < e.n_gu(); ++b) {
        const int ca = e.sc_of(a), cb = e.sc_of(b);
        if (ca < 0 || cb < 0 || ca == cb) continue;
        const int ma = e.tbs_of(a), mb = e.tbs_of(b);
        if (ma == mb || e.holder(ma, cb) >= 0 || e.holder(mb, ca) >= 0) continue;
        const Move trade{{a, cb}, {b, ca}};
        if (e.delta(trade) > e.tolerance()) {
          e.apply(trade);
          ++counters.refinement_moves;
          improved = true;
        }
      }
    }
    // whole-TBS reshuffles at the current unit count and one either side
    for (int m = 0; m < e.n_tbs(); ++m) {
      const int cur = e.active(m);
      for (int k = std::max(0, cur - 1); k <= cur + 1; ++k) {
        const Move mv = e.best_response(m, k);
        if (!mv.empty() && e.delta(mv) > e.tolerance()) {
          e.apply(mv);
          ++counters.refinement_moves;
          improved = true;
        }
      }
    }
    if (!improved) improved = paired_reshuffle(e, counters);
  }
}

} // namespace

std::vector<int> associate_gus(const ChannelState& ch) {
  std::vector<int> a(ch.n_gu(), 0);
  for (int j = 0; j < ch.n_gu(); ++j) {
    for (int m = 1; m < ch.n_tbs(); ++m) {
      if (ch.mean_terr(m, j) > ch.mean_terr(a[j], j)) a[j] = m;
    }
  }
  return a;
}

double theta_preference(double h_own, double h_cross, double rho) { return std::pow(h_own, rho) / h_cross; }

void sort_links(std::vector<TerrLink>& links) {
  std::sort(links.begin(), links.end(), [](const TerrLink& a, const TerrLink& b) {
    if (a.tbs != b.tbs) return a.tbs < b.tbs;
    if (a.gu != b.gu) return a.gu < b.gu;
    return a.sc < b.sc;
  });
}

double terr_utility(const std::vector<TerrLink>& links, const SlotProblem& p, const std::vector<double>& lambda) {
  double u = sum_rate(links, p.ch.h_terr, p.cached, p.lp);
  for (const auto& l : links) {
    if (!p.cached(l.tbs, l.gu)) u -= lambda[l.tbs] * p.lp.u_back_bps;
  }
  return u;
}

int allocate_power(const SlotProblem& p, std::vector<TerrLink>& links, PowerMode mode, int wf_iterations) {
  const int M = p.ch.n_tbs();
  std::vector<int> active(M, 0);
  for (const auto& l : links) ++active[l.tbs];
  for (auto& l : links) l.power_w = p.lp.p_tbs_total_w / active[l.tbs];
  if (mode == PowerMode::Equal || links.empty()) return 0;

  const double kNoCap = std::numeric_limits<double>::infinity();
  const double cap_snr = std::exp2(p.lp.u_back_bps / p.lp.b_c_hz) - 1.0;
  int accepted = 0;
  double current = sum_rate(links, p.ch.h_terr, p.cached, p.lp);
  for (int it = 0; it < wf_iterations; ++it) {
    std::vector<TerrLink> next = links;
    for (int m = 0; m < M; ++m) {
      std::vector<std::size_t> mine;
      std::vector<double> eff;
      std::vector<double> cap;
      for (std::size_t i = 0; i < links.size(); ++i) {
        if (links[i].tbs != m) continue;
        double interference = 0.0;
        for (const auto& o : links) {
          if (o.tbs != m && o.sc == links[i].sc) interference += o.power_w * p.ch.h_terr(o.tbs, links[i].gu, o.sc);
        }
        mine.push_back(i);
        eff.push_back((interference + p.lp.noise_c_w) / p.ch.h_terr(m, links[i].gu, links[i].sc));
        // a backhaul GU gains nothing past the power that reaches its rate cap
        cap.push_back(p.is_backhaul(links[i].gu) ? cap_snr * eff.back() : kNoCap);
      }
      if (mine.empty()) continue;
      const auto wf = waterfill_capped(eff, cap, p.lp.p_tbs_total_w);
      for (std::size_t q = 0; q < mine.size(); ++q) next[mine[q]].power_w = wf.power[q];
    }
    const double value = sum_rate(next, p.ch.h_terr, p.cached, p.lp);
    if (!(value >= current)) break;
    links = std::move(next);
    current = value;
    ++accepted;
  }
  return accepted;
}

UaraResult uara_round(const SlotProblem& p, const std::vector<double>& lambda, const UaraOptions& opt) {
  TerrEngine e(p, lambda);
  UaraResult res;
  const int J = p.ch.n_gu();
  const int C = p.ch.n_sc_terr();

  // Initial proposals: every free SC names its strongest unmatched GU.
  {
    std::vector<std::vector<int>> ranked(C);
    for (int c = 0; c < C; ++c) {
      auto& r = ranked[c];
      r.resize(J);
      std::iota(r.begin(), r.end(), 0);
      std::stable_sort(r.begin(), r.end(), [&](int a, int b) {
        return e.gain(e.tbs_of(a), a, c) > e.gain(e.tbs_of(b), b, c);
      });
    }
    std::vector<char> open(C, 1);
    std::vector<std::size_t> cursor(C, 0);
    while (true) {
      std::vector<int> offer(J, -1); // GU -> best proposing SC
      bool any = false;
      for (int c = 0; c < C; ++c) {
        if (!open[c]) continue;
        int pick = -1;
        auto& r = ranked[c];
        for (std::size_t q = cursor[c]; q < r.size(); ++q) {
          const int j = r[q];
          if (e.sc_of(j) >= 0 || e.holder(e.tbs_of(j), c) >= 0) continue;
          if (e.delta({{j, c}}) > 0.0) {
            pick = j;
            break;
          }
        }
        if (pick < 0) {
          open[c] = 0;
          continue;
        }
        any = true;
        const int cur = offer[pick];
        if (cur < 0 || e.gain(e.tbs_of(pick), pick, c) > e.gain(e.tbs_of(pick), pick, cur)) offer[pick] = c;
      }
      if (!any) break;
      ++res.counters.init_rounds;
      for (int j = 0; j < J; ++j) {
        if (offer[j] < 0) continue;
        e.apply({{j, offer[j]}});
        open[offer[j]] = 0;
      }
      for (int c = 0; c < C; ++c) {
        while (cursor[c] < ranked[c].size() && e.sc_of(ranked[c][cursor[c]]) >= 0) ++cursor[c];
      }
    }
  }

  // Reuse proposals from matched units, local GUs first.
  while (true) {
    std::vector<int> unmatched;
    for (int j = 0; j < J; ++j) {
      if (e.sc_of(j) < 0) unmatched.push_back(j);
    }
    if (unmatched.empty()) break;
    struct Offer {
      int c = -1;
      double gain = 0.0;
    };
    std::vector<Offer> offer(J);
    bool any = false;
    for (int c = 0; c < C; ++c) {
      const auto& units = e.on_sc(c);
      if (units.empty()) continue;
      std::vector<int> local_pool, back_pool;
      for (const auto& u : units) {
        double best_l = -1.0, best_b = -1.0;
        int pick_l = -1, pick_b = -1;
        for (int j : unmatched) {
          const int m2 = e.tbs_of(j);
          if (e.holder(m2, c) >= 0) continue;
          const double th = theta_preference(e.gain(m2, j, c), e.gain(u.tbs, j, c), p.sc.preference_rho);
          if (e.backhaul(j)) {
            if (th > best_b) {
              best_b = th;
              pick_b = j;
            }
          } else if (th > best_l) {
            best_l = th;
            pick_l = j;
          }
        }
        if (pick_l >= 0) local_pool.push_back(pick_l);
        if (pick_b >= 0) back_pool.push_back(pick_b);
      }
      auto best_of = [&](const std::vector<int>& pool, int& who) {
        double best = 0.0;
        who = -1;
        for (int j : pool) {
          const double d = e.delta({{j, c}});
          if (d > best) {
            best = d;
            who = j;
          }
        }
        return best;
      };
      int who = -1;
      double g = best_of(local_pool, who);
      if (who < 0) g = best_of(back_pool, who);
      if (who < 0) continue;
      any = true;
      if (offer[who].c < 0 || g > offer[who].gain) offer[who] = {c, g};
    }
    if (!any) break;
    ++res.counters.proposal_rounds;
    for (int j = 0; j < J; ++j) {
      if (offer[j].c >= 0 && e.holder(e.tbs_of(j), offer[j].c) < 0) e.apply({{j, offer[j].c}});
    }
  }
  local_search(e, res.counters);

  res.x.association = p.association;
  res.x.links = e.links();
  res.counters.wf_accepted = allocate_power(p, res.x.links, opt.power, opt.wf_iterations);
  return res;
}

std::vector<TerrLink> terr_blocking_pairs(const SlotProblem& p, const std::vector<double>& lambda,
                                          const TerrMatching& x) {
  TerrEngine e(p, lambda);
  e.load(x.links);
  std::vector<TerrLink> out;
  const double tol = 1e-9 * std::max(1.0, std::abs(e.total()));
  std::vector<Move> variants;
  for (int j = 0; j < e.n_gu(); ++j) {
    for (int c = 0; c < e.n_sc(); ++c) {
      const std::size_t n = adoption_variants(e, j, c, variants);
      for (std::size_t v = 0; v < n; ++v) {
        if (e.delta(variants[v]) > tol) {
          out.push_back({e.tbs_of(j), j, c, 0.0});
          break;
        }
      }
    }
  }
  return out;
}

} // namespace istn
