#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "istn/constellation.hpp"
#include "istn/scenario.hpp"
#include "istn/tensor.hpp"

namespace istn {

/// Free-space (Friis) power gain (lambda / 4 pi d)^2, linear.
double friis_gain(double distance_m, double frequency_hz);

/// Off-axis receive gain of a GEO ground station in dBi: 32 - 25 log10(phi)
/// clamped to [-10, peak]. phi = 0 yields the peak.
double offaxis_gain_dbi(double phi_deg, double peak_dbi);

/// |g|^2 of a unit-power Rayleigh fade.
double rayleigh_power(std::mt19937_64& rng);
/// |g|^2 of a unit-power Rician fade with K-factor `k_linear`; infinite K
/// gives exactly 1.
double rician_power(std::mt19937_64& rng, double k_linear);

/// All channel power gains for one timeslot. Satellite gains of pairs below
/// the elevation mask are absent (NaN) and flagged in `visible`.
struct ChannelState {
  int t = 0;
  Tensor3<double> h_terr;   // [M][J][C]
  Tensor3<double> h_sat;    // [N][M][K]
  Matrix<char> visible;     // [N][M]
  Matrix<double> slant_range_m; // [N][M]
  Matrix<double> h_geo_gs;  // [N][L], LEO n -> GEO-GS l interference gain
  std::vector<double> h_geo_signal; // [L], GEO -> GEO-GS l
  Matrix<double> mean_terr; // [M][J], fading-free terrestrial gain
  std::vector<std::vector<int>> visible_sats; // per TBS, ascending
  std::vector<int> candidate_sats; // union over TBSs, ascending
  int clamped_distances = 0;

  int n_tbs() const { return h_terr.dim0(); }
  int n_gu() const { return h_terr.dim1(); }
  int n_sc_terr() const { return h_terr.dim2(); }
  int n_sats() const { return h_sat.dim0(); }
  int n_sc_sat() const { return h_sat.dim2(); }
  int n_geo_gs() const { return h_geo_gs.cols(); }

  bool is_visible(int n, int m) const { return visible(n, m) != 0; }
};

/// Receiver noise powers per band.
struct NoisePowers {
  double terrestrial_w; // per C-band subchannel
  double satellite_w;   // per Ka-band subchannel, also at GEO-GSs
};
NoisePowers noise_powers(const Scenario& sc);

struct TerrestrialGains {
  Tensor3<double> h;
  Matrix<double> mean;
  int clamped = 0;
};
TerrestrialGains sample_terrestrial_gains(const Scenario& sc, const NodePositions& nodes, int t);

struct SatelliteGains {
  Tensor3<double> h;
  Matrix<char> visible;
  Matrix<double> range_m;
};
SatelliteGains sample_satellite_gains(const Scenario& sc, const NodePositions& nodes,
                                      const ConstellationState& cs, int t);

struct GeoGains {
  Matrix<double> interference; // [N][L]
  std::vector<double> signal;  // [L]
};
GeoGains geo_gs_interference_gains(const Scenario& sc, const NodePositions& nodes, const ConstellationState& cs,
                                   int t);

ChannelState sample_channels(const Scenario& sc, const NodePositions& nodes, const ConstellationState& cs, int t);

/// Per-GS interference caps. An explicit threshold applies to every GS;
/// otherwise each is derived from the CINR working threshold as
/// p_geo h_geo,l / CINR_th - sigma^2, floored at zero.
std::vector<double> interference_thresholds(const Scenario& sc, const ChannelState& ch);

} // namespace istn
