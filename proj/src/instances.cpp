#include "istn/instances.hpp"

#include <cmath>

namespace istn {

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log10(lo), std::log10(hi));
  return std::pow(10.0, u(rng));
}

} // namespace

Scenario instance_scenario(const InstanceShape& shape) {
  Scenario sc;
  sc.n_tbs = shape.tbs;
  sc.n_gu = shape.gus;
  sc.n_sc_terrestrial = shape.sc_terr;
  sc.n_sc_leo = shape.sc_sat;
  sc.n_geo_gs = shape.geo_gs;
  sc.n_timeslots = 1;
  return sc;
}

void index_visibility(ChannelState& ch) {
  const int N = ch.n_sats();
  const int M = ch.n_tbs();
  ch.visible_sats.assign(M, {});
  ch.candidate_sats.clear();
  for (int n = 0; n < N; ++n) {
    bool any = false;
    for (int m = 0; m < M; ++m) {
      if (ch.is_visible(n, m)) {
        ch.visible_sats[m].push_back(n);
        any = true;
      }
    }
    if (any) ch.candidate_sats.push_back(n);
  }
}

Instance random_instance(const InstanceShape& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Instance inst{instance_scenario(s), {}, {}};
  ChannelState& ch = inst.channels;

  ch.mean_terr = Matrix<double>(s.tbs, s.gus);
  ch.h_terr = Tensor3<double>(s.tbs, s.gus, s.sc_terr);
  for (int m = 0; m < s.tbs; ++m) {
    for (int j = 0; j < s.gus; ++j) {
      const double mean = log_uniform(rng, 1e-11, 1e-8);
      ch.mean_terr(m, j) = mean;
      for (int c = 0; c < s.sc_terr; ++c) ch.h_terr(m, j, c) = mean * std::max(1e-6, rayleigh_power(rng));
    }
  }

  ch.h_sat = Tensor3<double>(s.sats, s.tbs, s.sc_sat, std::nan(""));
  ch.visible = Matrix<char>(s.sats, s.tbs, 0);
  ch.slant_range_m = Matrix<double>(s.sats, s.tbs, std::nan(""));
  for (int n = 0; n < s.sats; ++n) {
    for (int m = 0; m < s.tbs; ++m) {
      if (u01(rng) >= s.visible_prob) continue;
      ch.visible(n, m) = 1;
      ch.slant_range_m(n, m) = 550e3 + 400e3 * u01(rng);
      const double mean = log_uniform(rng, 3e-12, 6e-11);
      for (int k = 0; k < s.sc_sat; ++k) ch.h_sat(n, m, k) = mean * rician_power(rng, 10.0);
    }
  }

  ch.h_geo_gs = Matrix<double>(s.sats, s.geo_gs);
  ch.h_geo_signal.resize(s.geo_gs);
  for (int l = 0; l < s.geo_gs; ++l) ch.h_geo_signal[l] = log_uniform(rng, 5e-14, 2e-13);
  for (int n = 0; n < s.sats; ++n) {
    for (int l = 0; l < s.geo_gs; ++l) ch.h_geo_gs(n, l) = log_uniform(rng, 1e-17, 1e-12);
  }
  index_visibility(ch);

  inst.cached = Matrix<char>(s.tbs, s.gus, 0);
  for (int m = 0; m < s.tbs; ++m) {
    for (int j = 0; j < s.gus; ++j) inst.cached(m, j) = u01(rng) < s.local_prob ? 1 : 0;
  }
  return inst;
}

} // namespace istn
