#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "istn/geometry.hpp"

namespace istn {

/// Raised for malformed or out-of-range configuration. The message names the
/// offending field.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct BandConfig {
  double f_c_hz = 4.9e9;
  double f_ka_hz = 30.0e9;
  double b_c_hz = 100.0e6;  // per terrestrial subchannel
  double b_ka_hz = 500.0e6; // per satellite subchannel
  double noise_psd_dbm_hz = -174.0;

  double noise_c_w() const;
  double noise_ka_w() const;
};

/// Powers are stored in watts; the config file takes dBm.
struct PowerConfig {
  double p_tbs_total_w = 0.0;  // P_TBS, set from 47 dBm by default
  double p_leo_per_sc_w = 0.0; // p_leo, 48 dBm
  double p_geo_w = 0.0;        // 60 dBm
  double g_t_db = 30.0;        // LEO transmit antenna
  double g_r_db = 0.0;         // TBS satellite-link receive antenna; derived from G/T when unset
  double g_over_t_db_k = 18.5;
  double g_tbs_db = 0.0;       // terrestrial TBS transmit antenna
  double g_gu_db = 0.0;        // GU receive antenna
  double g_geo_t_db = 40.0;    // GEO transmit antenna toward its ground stations

  PowerConfig();
  /// Peak receive gain implied by G/T at the reference system temperature.
  double peak_receive_gain_db() const;
};

struct CacheConfig {
  int n_files = 50;
  double zipf_omega = 0.5;
  int cache_capacity = 40;
  double u_back_bps = 3.0e6;
  bool static_requests = false;
};

enum class ConstellationModel { Walker, Trace };

struct ConstellationConfig {
  ConstellationModel model = ConstellationModel::Walker;
  int planes = 36;
  int sats_per_plane = 40;
  double altitude_m = 550.0e3;
  double inclination_deg = 53.0;
  int phasing = 1;
  bool earth_rotation = true;
  std::string trace_file;
};

enum class HandoverMode { RatioDb, Difference };
enum class TbsLayout { Grid, Random };

struct Scenario {
  double area_side_m = 3000.0;
  double site_lat_deg = 40.0;
  double site_lon_deg = 0.0;

  int n_tbs = 4;            // M
  int n_gu = 100;           // J
  int n_geo_gs = 2;         // L
  int n_sc_terrestrial = 273; // C
  int n_sc_leo = 8;         // K
  TbsLayout tbs_layout = TbsLayout::Grid;

  BandConfig bands;
  PowerConfig powers;
  ConstellationConfig constellation;
  CacheConfig caching;

  double elevation_min_deg = 30.0;
  int n_connect = 3;                // N_r
  double handover_threshold_db = 3.0; // H
  HandoverMode handover_mode = HandoverMode::RatioDb;
  double cinr_threshold_db = 0.0;
  std::optional<double> interference_threshold_w; // derived from the CINR threshold when unset

  double rician_k_db = 10.0;
  double min_distance_m = 1.0;
  double preference_rho = 1.0;
  bool sic_symmetric = false;

  int n_timeslots = 1440;
  double slot_duration_s = 60.0;

  // dual loop
  double theta0 = 1.0;
  double theta_decay = 0.9;
  int max_dual_iterations = 200;
  bool warm_start_lambda = true;
  double lambda0 = 0.0;
  int wf_iterations = 1;

  std::uint64_t rng_seed = 1;

  /// GU density in users per square metre.
  double gu_density() const { return n_gu / (area_side_m * area_side_m); }

  /// Throws ConfigError naming the first violated field.
  void validate() const;
};

/// Parses a TOML document; absent keys keep their defaults.
Scenario scenario_from_toml(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Ground node coordinates (Earth-fixed) and their planar offsets.
struct NodePositions {
  std::vector<Vec3> tbs;
  std::vector<Vec3> gu;
  std::vector<Vec3> geo_gs;
  std::vector<std::pair<double, double>> tbs_xy;
  std::vector<std::pair<double, double>> gu_xy;
  std::vector<std::pair<double, double>> geo_gs_xy;
};

/// TBSs on the uniform grid (or i.i.d. when configured), GUs and GEO-GSs
/// i.i.d. uniform over the square. Deterministic per seed.
NodePositions place_nodes(const Scenario& sc);

/// Cell centres of the most square grid with at least `count` cells.
std::vector<std::pair<double, double>> grid_points(int count, double side_m);

} // namespace istn
