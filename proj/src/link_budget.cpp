#include "istn/link_budget.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

namespace istn {

namespace {

double gain_or_zero(double h) { return std::isnan(h) ? 0.0 : h; }

constexpr double kRelTol = 1e-9;

} // namespace

LinkParams LinkParams::from(const Scenario& sc) {
  LinkParams lp;
  lp.n_tbs = sc.n_tbs;
  lp.b_c_hz = sc.bands.b_c_hz;
  lp.b_ka_hz = sc.bands.b_ka_hz;
  lp.noise_c_w = sc.bands.noise_c_w();
  lp.noise_ka_w = sc.bands.noise_ka_w();
  lp.u_back_bps = sc.caching.u_back_bps;
  lp.p_tbs_total_w = sc.powers.p_tbs_total_w;
  lp.p_geo_w = sc.powers.p_geo_w;
  lp.n_connect = sc.n_connect;
  return lp;
}

double gu_sinr(const std::vector<TerrLink>& links, const Tensor3<double>& h_terr, double noise_w, std::size_t idx) {
  const TerrLink& me = links[idx];
  double interference = 0.0;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (i == idx || links[i].sc != me.sc) continue;
    interference += links[i].power_w * h_terr(links[i].tbs, me.gu, me.sc);
  }
  return me.power_w * h_terr(me.tbs, me.gu, me.sc) / (interference + noise_w);
}

double gu_rate(double sinr, bool is_backhaul, double u_back_bps, double bandwidth_hz) {
  const double r = bandwidth_hz * std::log2(1.0 + sinr);
  return is_backhaul ? std::min(r, u_back_bps) : r;
}

std::vector<double> gu_rates(const std::vector<TerrLink>& links, const Tensor3<double>& h_terr,
                             const Matrix<char>& cached, const LinkParams& lp) {
  std::vector<double> r(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const bool backhaul = !cached(links[i].tbs, links[i].gu);
    r[i] = gu_rate(gu_sinr(links, h_terr, lp.noise_c_w, i), backhaul, lp.u_back_bps, lp.b_c_hz);
  }
  return r;
}

double sum_rate(const std::vector<TerrLink>& links, const Tensor3<double>& h_terr, const Matrix<char>& cached,
                const LinkParams& lp) {
  double s = 0.0;
  for (double r : gu_rates(links, h_terr, cached, lp)) s += r;
  return s;
}

double sat_sinr(const std::vector<SatLink>& links, const Tensor3<double>& h_sat, double noise_w, std::size_t idx) {
  const SatLink& me = links[idx];
  double interference = 0.0;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (i == idx || links[i].sc != me.sc) continue;
    interference += links[i].power_w * gain_or_zero(h_sat(links[i].sat, me.tbs, me.sc));
  }
  return me.power_w * gain_or_zero(h_sat(me.sat, me.tbs, me.sc)) / (interference + noise_w);
}

std::vector<double> backhaul_capacity(const std::vector<SatLink>& links, const Tensor3<double>& h_sat,
                                      const LinkParams& lp) {
  std::vector<double> cap(lp.n_tbs, 0.0);
  for (std::size_t i = 0; i < links.size(); ++i) {
    cap[links[i].tbs] += lp.b_ka_hz * std::log2(1.0 + sat_sinr(links, h_sat, lp.noise_ka_w, i));
  }
  return cap;
}

std::vector<double> backhaul_load(const std::vector<TerrLink>& links, const Matrix<char>& cached,
                                  const LinkParams& lp) {
  std::vector<double> load(lp.n_tbs, 0.0);
  for (const auto& l : links) {
    if (!cached(l.tbs, l.gu)) load[l.tbs] += lp.u_back_bps;
  }
  return load;
}

GeoInterference geo_gs_interference(const std::vector<SatLink>& links, const Matrix<double>& h_geo_gs,
                                    const std::vector<double>& h_geo_signal, const LinkParams& lp) {
  const int L = h_geo_gs.cols();
  GeoInterference out{std::vector<double>(L, 0.0), std::vector<double>(L, 0.0)};
  for (const auto& s : links) {
    for (int l = 0; l < L; ++l) out.interference_w[l] += s.power_w * h_geo_gs(s.sat, l);
  }
  for (int l = 0; l < L; ++l) {
    out.cinr_db[l] = 10.0 * std::log10(lp.p_geo_w * h_geo_signal[l] / (out.interference_w[l] + lp.noise_ka_w));
  }
  return out;
}

const char* constraint_name(Constraint c) {
  static const char* names[] = {"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9"};
  return names[static_cast<int>(c)];
}

bool ConstraintReport::feasible(bool include_c9) const {
  for (int i = 0; i < kConstraintCount; ++i) {
    if (!include_c9 && i == static_cast<int>(Constraint::C9)) continue;
    if (!pass[i]) return false;
  }
  return true;
}

std::string ConstraintReport::summary() const {
  std::string s;
  for (int i = 0; i < kConstraintCount; ++i) {
    if (pass[i]) continue;
    if (!s.empty()) s += ';';
    s += constraint_name(static_cast<Constraint>(i));
  }
  return s;
}

ConstraintReport check_constraints(const AssignmentX& x, const AssignmentB& b, const CheckInputs& in) {
  const Scenario& sc = in.scenario;
  const ChannelState& ch = in.channels;
  const LinkParams lp = LinkParams::from(sc);

  ConstraintReport rep;
  rep.pass.fill(true);
  auto flag = [&](Constraint c, std::vector<int> idx, double amount = 0.0) {
    rep.pass[static_cast<int>(c)] = false;
    rep.violations.push_back({c, std::move(idx), amount});
  };

  // C1: x_{m,j,c} <= a_{m,j}
  for (const auto& l : x.links) {
    const bool associated = l.gu < static_cast<int>(x.association.size()) && x.association[l.gu] == l.tbs;
    if (!associated) flag(Constraint::C1, {l.tbs, l.gu, l.sc});
  }
  // C2: each GU on at most one (m, c)
  {
    std::map<int, int> per_gu;
    for (const auto& l : x.links) ++per_gu[l.gu];
    for (const auto& [j, n] : per_gu) {
      if (n > 1) flag(Constraint::C2, {j}, n - 1);
    }
  }
  // C3: each (m, c) serves at most one GU
  {
    std::map<std::pair<int, int>, int> per_unit;
    for (const auto& l : x.links) ++per_unit[{l.tbs, l.sc}];
    for (const auto& [u, n] : per_unit) {
      if (n > 1) flag(Constraint::C3, {u.first, u.second}, n - 1);
    }
  }
  // C4: elevation mask
  for (const auto& s : b.links) {
    if (!ch.is_visible(s.sat, s.tbs)) flag(Constraint::C4, {s.sat, s.tbs, s.sc});
  }
  // C5: at most N_r satellite links per TBS
  {
    std::vector<int> per_tbs(sc.n_tbs, 0);
    for (const auto& s : b.links) ++per_tbs[s.tbs];
    for (int m = 0; m < sc.n_tbs; ++m) {
      if (per_tbs[m] > sc.n_connect) flag(Constraint::C5, {m}, per_tbs[m] - sc.n_connect);
    }
  }
  // C6: each (n, k) serves at most one TBS
  {
    std::map<std::pair<int, int>, int> per_unit;
    for (const auto& s : b.links) ++per_unit[{s.sat, s.sc}];
    for (const auto& [u, n] : per_unit) {
      if (n > 1) flag(Constraint::C6, {u.first, u.second}, n - 1);
    }
  }
  // C7: backhaul traffic within capacity
  {
    const auto cap = backhaul_capacity(b.links, ch.h_sat, lp);
    const auto load = backhaul_load(x.links, in.cached, lp);
    for (int m = 0; m < sc.n_tbs; ++m) {
      if (load[m] > cap[m] * (1.0 + kRelTol)) flag(Constraint::C7, {m}, load[m] - cap[m]);
    }
  }
  // C8: TBS power budget
  {
    std::vector<double> power(sc.n_tbs, 0.0);
    for (const auto& l : x.links) power[l.tbs] += l.power_w;
    for (int m = 0; m < sc.n_tbs; ++m) {
      if (power[m] > lp.p_tbs_total_w * (1.0 + kRelTol)) flag(Constraint::C8, {m}, power[m] - lp.p_tbs_total_w);
    }
  }
  // C9: GEO-GS interference cap
  {
    const auto geo = geo_gs_interference(b.links, ch.h_geo_gs, ch.h_geo_signal, lp);
    for (int l = 0; l < static_cast<int>(geo.interference_w.size()); ++l) {
      const double cap = in.interference_threshold_w[l];
      if (geo.interference_w[l] > cap * (1.0 + kRelTol)) flag(Constraint::C9, {l}, geo.interference_w[l] - cap);
    }
  }
  return rep;
}

} // namespace istn
