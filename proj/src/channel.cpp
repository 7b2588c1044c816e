#include "istn/channel.hpp"

#include <algorithm>
#include <limits>

#include "istn/rng.hpp"
#include "istn/units.hpp"

namespace istn {

double friis_gain(double distance_m, double frequency_hz) {
  const double x = kSpeedOfLight / (4.0 * kPi * distance_m * frequency_hz);
  return x * x;
}

double offaxis_gain_dbi(double phi_deg, double peak_dbi) {
  if (phi_deg <= 0.0) return peak_dbi;
  const double g = 32.0 - 25.0 * std::log10(phi_deg);
  return std::clamp(g, -10.0, peak_dbi);
}

double rayleigh_power(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  return 0.5 * (re * re + im * im);
}

double rician_power(std::mt19937_64& rng, double k_linear) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng);
  const double im = n(rng);
  if (std::isinf(k_linear)) return 1.0;
  const double los = std::sqrt(k_linear / (k_linear + 1.0));
  const double s = std::sqrt(0.5 / (k_linear + 1.0));
  const double a = los + s * re;
  const double b = s * im;
  return a * a + b * b;
}

NoisePowers noise_powers(const Scenario& sc) { return {sc.bands.noise_c_w(), sc.bands.noise_ka_w()}; }

TerrestrialGains sample_terrestrial_gains(const Scenario& sc, const NodePositions& nodes, int t) {
  const int M = static_cast<int>(nodes.tbs.size());
  const int J = static_cast<int>(nodes.gu.size());
  const int C = sc.n_sc_terrestrial;
  const double antennas = db_to_linear(sc.powers.g_tbs_db + sc.powers.g_gu_db);

  TerrestrialGains out{Tensor3<double>(M, J, C), Matrix<double>(M, J), 0};
  auto rng = make_rng(sc.rng_seed, Stream::TerrestrialFading, static_cast<std::uint64_t>(t));
  for (int m = 0; m < M; ++m) {
    for (int j = 0; j < J; ++j) {
      double d = distance(nodes.tbs[m], nodes.gu[j]);
      if (d < sc.min_distance_m) {
        d = sc.min_distance_m;
        ++out.clamped;
      }
      const double mean = friis_gain(d, sc.bands.f_c_hz) * antennas;
      out.mean(m, j) = mean;
      for (int c = 0; c < C; ++c) out.h(m, j, c) = mean * rayleigh_power(rng);
    }
  }
  return out;
}

SatelliteGains sample_satellite_gains(const Scenario& sc, const NodePositions& nodes,
                                      const ConstellationState& cs, int t) {
  const int N = cs.n_sats();
  const int M = static_cast<int>(nodes.tbs.size());
  const int K = sc.n_sc_leo;
  const double antennas = db_to_linear(sc.powers.g_t_db + sc.powers.g_r_db);
  const double k_lin = db_to_linear(sc.rician_k_db);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  SatelliteGains out{Tensor3<double>(N, M, K, nan), Matrix<char>(N, M, 0), Matrix<double>(N, M, nan)};
  auto rng = make_rng(sc.rng_seed, Stream::SatelliteFading, static_cast<std::uint64_t>(t));
  for (int n = 0; n < N; ++n) {
    const Vec3 sat = cs.position(t, n);
    for (int m = 0; m < M; ++m) {
      if (elevation_angle_deg(sat, nodes.tbs[m]) < sc.elevation_min_deg) continue;
      const double range = distance(sat, nodes.tbs[m]);
      out.visible(n, m) = 1;
      out.range_m(n, m) = range;
      const double mean = friis_gain(range, sc.bands.f_ka_hz) * antennas;
      for (int k = 0; k < K; ++k) out.h(n, m, k) = mean * rician_power(rng, k_lin);
    }
  }
  return out;
}

GeoGains geo_gs_interference_gains(const Scenario& sc, const NodePositions& nodes, const ConstellationState& cs,
                                   int t) {
  const int N = cs.n_sats();
  const int L = static_cast<int>(nodes.geo_gs.size());
  const double peak = sc.powers.peak_receive_gain_db();
  const double g_leo_tx = db_to_linear(sc.powers.g_t_db);
  const Vec3 geo = cs.geo_position();

  GeoGains out{Matrix<double>(N, L), std::vector<double>(L)};
  for (int l = 0; l < L; ++l) {
    const Vec3& gs = nodes.geo_gs[l];
    out.signal[l] = friis_gain(distance(geo, gs), sc.bands.f_ka_hz) * db_to_linear(sc.powers.g_geo_t_db + peak);
  }
  for (int n = 0; n < N; ++n) {
    const Vec3 sat = cs.position(t, n);
    for (int l = 0; l < L; ++l) {
      const Vec3& gs = nodes.geo_gs[l];
      const double phi = angle_between_deg(geo - gs, sat - gs);
      out.interference(n, l) =
          friis_gain(distance(sat, gs), sc.bands.f_ka_hz) * g_leo_tx * db_to_linear(offaxis_gain_dbi(phi, peak));
    }
  }
  return out;
}

ChannelState sample_channels(const Scenario& sc, const NodePositions& nodes, const ConstellationState& cs, int t) {
  ChannelState ch;
  ch.t = t;
  auto terr = sample_terrestrial_gains(sc, nodes, t);
  auto sat = sample_satellite_gains(sc, nodes, cs, t);
  auto geo = geo_gs_interference_gains(sc, nodes, cs, t);
  ch.h_terr = std::move(terr.h);
  ch.mean_terr = std::move(terr.mean);
  ch.clamped_distances = terr.clamped;
  ch.h_sat = std::move(sat.h);
  ch.visible = std::move(sat.visible);
  ch.slant_range_m = std::move(sat.range_m);
  ch.h_geo_gs = std::move(geo.interference);
  ch.h_geo_signal = std::move(geo.signal);

  const int M = ch.n_tbs();
  ch.visible_sats.assign(M, {});
  std::vector<char> any(ch.n_sats(), 0);
  for (int n = 0; n < ch.n_sats(); ++n) {
    for (int m = 0; m < M; ++m) {
      if (ch.is_visible(n, m)) {
        ch.visible_sats[m].push_back(n);
        any[n] = 1;
      }
    }
  }
  for (int n = 0; n < ch.n_sats(); ++n) {
    if (any[n]) ch.candidate_sats.push_back(n);
  }
  return ch;
}

std::vector<double> interference_thresholds(const Scenario& sc, const ChannelState& ch) {
  const int L = ch.n_geo_gs();
  std::vector<double> th(L);
  if (sc.interference_threshold_w) {
    std::fill(th.begin(), th.end(), *sc.interference_threshold_w);
    return th;
  }
  const double noise = sc.bands.noise_ka_w();
  const double cinr = db_to_linear(sc.cinr_threshold_db);
  for (int l = 0; l < L; ++l) th[l] = std::max(0.0, sc.powers.p_geo_w * ch.h_geo_signal[l] / cinr - noise);
  return th;
}

} // namespace istn
