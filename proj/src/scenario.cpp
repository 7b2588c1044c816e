#include "istn/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "istn/rng.hpp"
#include "istn/units.hpp"

namespace istn {

double BandConfig::noise_c_w() const { return dbm_to_watt(noise_psd_dbm_hz) * b_c_hz; }
double BandConfig::noise_ka_w() const { return dbm_to_watt(noise_psd_dbm_hz) * b_ka_hz; }

PowerConfig::PowerConfig()
    : p_tbs_total_w(dbm_to_watt(47.0)), p_leo_per_sc_w(dbm_to_watt(48.0)), p_geo_w(dbm_to_watt(60.0)) {
  g_r_db = peak_receive_gain_db();
}

double PowerConfig::peak_receive_gain_db() const {
  return g_over_t_db_k + linear_to_db(kSystemTemperatureK);
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field + ": " + what);
}

} // namespace

void Scenario::validate() const {
  require(area_side_m > 0.0, "area_side_m", "must be positive");
  require(n_tbs >= 1, "network.tbs", "must be >= 1");
  require(n_gu >= 1, "network.gus", "must be >= 1");
  require(n_geo_gs >= 1, "network.geo_gs", "must be >= 1");
  require(n_sc_terrestrial >= 1, "network.sc_terrestrial", "must be >= 1");
  require(n_sc_leo >= 1, "network.sc_leo", "must be >= 1");
  require(n_timeslots >= 1, "timeslots", "must be >= 1");
  require(slot_duration_s > 0.0, "slot_duration_s", "must be positive");
  require(elevation_min_deg > 0.0 && elevation_min_deg <= 90.0, "elevation_min",
          "elevation_min out of range (0, 90]");
  require(n_connect >= 1, "thresholds.n_connect", "must be >= 1");

  require(bands.f_c_hz > 0.0, "bands.f_c_hz", "must be positive");
  require(bands.f_ka_hz > 0.0, "bands.f_ka_hz", "must be positive");
  require(bands.b_c_hz > 0.0, "bands.b_c_hz", "must be positive");
  require(bands.b_ka_hz > 0.0, "bands.b_ka_hz", "must be positive");
  require(bands.noise_psd_dbm_hz < 0.0, "bands.noise_psd_dbm_hz", "must be negative");

  require(powers.p_tbs_total_w > 0.0, "power.p_tbs_dbm", "must be positive");
  require(powers.p_leo_per_sc_w > 0.0, "power.p_leo_dbm", "must be positive");
  require(powers.p_geo_w > 0.0, "power.p_geo_dbm", "must be positive");

  require(caching.n_files >= 1, "caching.files", "must be >= 1");
  require(caching.cache_capacity >= 0 && caching.cache_capacity <= caching.n_files, "caching.cache_capacity",
          "must lie in [0, files]");
  require(caching.zipf_omega >= 0.0, "caching.zipf_omega", "must be >= 0");
  require(caching.u_back_bps > 0.0, "caching.u_back_bps", "must be positive");

  const auto& cst = constellation;
  if (cst.model == ConstellationModel::Walker) {
    require(cst.planes >= 1, "constellation.planes", "must be >= 1");
    require(cst.sats_per_plane >= 1, "constellation.sats_per_plane", "must be >= 1");
    require(cst.altitude_m >= 300.0e3 && cst.altitude_m <= 2000.0e3, "constellation.altitude_m",
            "altitude out of bounds [300 km, 2000 km]");
    require(cst.inclination_deg >= 0.0 && cst.inclination_deg <= 180.0, "constellation.inclination_deg",
            "must lie in [0, 180]");
  } else {
    require(!cst.trace_file.empty(), "constellation.trace_file", "required for the trace model");
  }

  require(rician_k_db > -100.0, "channel.rician_k_db", "out of range");
  require(min_distance_m > 0.0, "channel.min_distance_m", "must be positive");
  require(preference_rho >= 0.0, "matching.rho", "must be >= 0");
  if (interference_threshold_w) {
    require(*interference_threshold_w > 0.0, "thresholds.interference_threshold_w", "must be positive");
  }
  require(theta0 > 0.0, "dual.theta0", "must be positive");
  require(theta_decay > 0.0 && theta_decay < 1.0, "dual.theta_decay", "must lie in (0, 1)");
  require(max_dual_iterations >= 1, "dual.max_iterations", "must be >= 1");
  require(lambda0 >= 0.0, "dual.lambda0", "must be >= 0");
  require(wf_iterations >= 1, "dual.wf_iterations", "must be >= 1");
}

namespace {

/// Reads typed values out of one table and records which keys were consumed
/// so that leftovers can be reported as unknown.
class TableReader {
public:
  TableReader(const toml::table& table, std::string prefix) : table_(table), prefix_(std::move(prefix)) {}

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const toml::node* node = table_.get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
      auto v = node->value<bool>();
      if (!v) fail(key, "expected a boolean");
      out = *v;
    } else if constexpr (std::is_integral_v<T>) {
      auto v = node->value<std::int64_t>();
      if (!v) fail(key, "expected an integer");
      out = static_cast<T>(*v);
    } else if constexpr (std::is_floating_point_v<T>) {
      auto v = node->value<double>();
      if (!v) fail(key, "expected a number");
      out = *v;
    } else {
      auto v = node->value<std::string>();
      if (!v) fail(key, "expected a string");
      out = *v;
    }
  }

  bool has(const char* key) const { return table_.contains(key); }

  void finish() const {
    for (const auto& [k, v] : table_) {
      if (v.is_table()) continue;
      if (!seen_.count(std::string(k.str()))) fail(std::string(k.str()), "unknown key");
    }
  }

private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(prefix_ + key + ": " + what);
  }

  const toml::table& table_;
  std::string prefix_;
  std::set<std::string> seen_;
};

const toml::table& subtable(const toml::table& root, const char* name) {
  static const toml::table empty;
  const toml::node* node = root.get(name);
  if (!node) return empty;
  if (!node->is_table()) throw ConfigError(std::string(name) + ": expected a table");
  return *node->as_table();
}

} // namespace

Scenario scenario_from_toml(const std::string& text) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }

  static const std::set<std::string> kSections = {"network", "bands", "power", "caching", "constellation",
                                                  "thresholds", "channel", "matching", "dual"};
  for (const auto& [k, v] : root) {
    if (v.is_table() && !kSections.count(std::string(k.str()))) {
      throw ConfigError(std::string(k.str()) + ": unknown section");
    }
  }

  Scenario sc;
  {
    TableReader r(root, "");
    r.get("area_side_m", sc.area_side_m);
    r.get("site_lat_deg", sc.site_lat_deg);
    r.get("site_lon_deg", sc.site_lon_deg);
    std::int64_t seed = static_cast<std::int64_t>(sc.rng_seed);
    r.get("seed", seed);
    sc.rng_seed = static_cast<std::uint64_t>(seed);
    r.get("timeslots", sc.n_timeslots);
    r.get("slot_duration_s", sc.slot_duration_s);
    r.finish();
  }
  {
    TableReader r(subtable(root, "network"), "network.");
    r.get("tbs", sc.n_tbs);
    r.get("gus", sc.n_gu);
    r.get("geo_gs", sc.n_geo_gs);
    r.get("sc_terrestrial", sc.n_sc_terrestrial);
    r.get("sc_leo", sc.n_sc_leo);
    std::string layout = "grid";
    r.get("tbs_layout", layout);
    if (layout == "grid") {
      sc.tbs_layout = TbsLayout::Grid;
    } else if (layout == "random") {
      sc.tbs_layout = TbsLayout::Random;
    } else {
      throw ConfigError("network.tbs_layout: expected \"grid\" or \"random\"");
    }
    r.finish();
  }
  {
    TableReader r(subtable(root, "bands"), "bands.");
    r.get("f_c_hz", sc.bands.f_c_hz);
    r.get("f_ka_hz", sc.bands.f_ka_hz);
    r.get("b_c_hz", sc.bands.b_c_hz);
    r.get("b_ka_hz", sc.bands.b_ka_hz);
    r.get("noise_psd_dbm_hz", sc.bands.noise_psd_dbm_hz);
    r.finish();
  }
  {
    TableReader r(subtable(root, "power"), "power.");
    auto dbm = [&](const char* key, double& watts) {
      double v = 0.0;
      const bool present = r.has(key);
      r.get(key, v);
      if (present) watts = dbm_to_watt(v);
    };
    dbm("p_tbs_dbm", sc.powers.p_tbs_total_w);
    dbm("p_leo_dbm", sc.powers.p_leo_per_sc_w);
    dbm("p_geo_dbm", sc.powers.p_geo_w);
    r.get("g_t_db", sc.powers.g_t_db);
    r.get("g_over_t_db_k", sc.powers.g_over_t_db_k);
    sc.powers.g_r_db = sc.powers.peak_receive_gain_db();
    r.get("g_r_db", sc.powers.g_r_db);
    r.get("g_tbs_db", sc.powers.g_tbs_db);
    r.get("g_gu_db", sc.powers.g_gu_db);
    r.get("g_geo_t_db", sc.powers.g_geo_t_db);
    r.finish();
  }
  {
    TableReader r(subtable(root, "caching"), "caching.");
    r.get("files", sc.caching.n_files);
    r.get("cache_capacity", sc.caching.cache_capacity);
    r.get("zipf_omega", sc.caching.zipf_omega);
    r.get("u_back_bps", sc.caching.u_back_bps);
    r.get("static_requests", sc.caching.static_requests);
    r.finish();
  }
  {
    TableReader r(subtable(root, "constellation"), "constellation.");
    std::string model = "walker";
    r.get("model", model);
    if (model == "walker") {
      sc.constellation.model = ConstellationModel::Walker;
    } else if (model == "trace") {
      sc.constellation.model = ConstellationModel::Trace;
    } else {
      throw ConfigError("constellation.model: expected \"walker\" or \"trace\"");
    }
    r.get("planes", sc.constellation.planes);
    r.get("sats_per_plane", sc.constellation.sats_per_plane);
    r.get("altitude_m", sc.constellation.altitude_m);
    r.get("inclination_deg", sc.constellation.inclination_deg);
    r.get("phasing", sc.constellation.phasing);
    r.get("earth_rotation", sc.constellation.earth_rotation);
    r.get("trace_file", sc.constellation.trace_file);
    r.finish();
  }
  {
    TableReader r(subtable(root, "thresholds"), "thresholds.");
    r.get("elevation_min_deg", sc.elevation_min_deg);
    r.get("n_connect", sc.n_connect);
    r.get("handover_threshold_db", sc.handover_threshold_db);
    std::string mode = "ratio_db";
    r.get("handover_mode", mode);
    if (mode == "ratio_db") {
      sc.handover_mode = HandoverMode::RatioDb;
    } else if (mode == "difference") {
      sc.handover_mode = HandoverMode::Difference;
    } else {
      throw ConfigError("thresholds.handover_mode: expected \"ratio_db\" or \"difference\"");
    }
    r.get("cinr_th_db", sc.cinr_threshold_db);
    if (r.has("interference_threshold_w")) {
      double v = 0.0;
      r.get("interference_threshold_w", v);
      sc.interference_threshold_w = v;
    }
    r.finish();
  }
  {
    TableReader r(subtable(root, "channel"), "channel.");
    r.get("rician_k_db", sc.rician_k_db);
    r.get("min_distance_m", sc.min_distance_m);
    r.finish();
  }
  {
    TableReader r(subtable(root, "matching"), "matching.");
    r.get("rho", sc.preference_rho);
    r.get("sic_symmetric", sc.sic_symmetric);
    r.finish();
  }
  {
    TableReader r(subtable(root, "dual"), "dual.");
    r.get("theta0", sc.theta0);
    r.get("theta_decay", sc.theta_decay);
    r.get("max_iterations", sc.max_dual_iterations);
    r.get("warm_start", sc.warm_start_lambda);
    r.get("lambda0", sc.lambda0);
    r.get("wf_iterations", sc.wf_iterations);
    r.finish();
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Scenario sc = scenario_from_toml(buf.str());
  // relative trace paths resolve against the scenario file
  auto& trace = sc.constellation.trace_file;
  if (!trace.empty() && std::filesystem::path(trace).is_relative()) {
    trace = (path.parent_path() / trace).string();
  }
  return sc;
}

std::vector<std::pair<double, double>> grid_points(int count, double side_m) {
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int rows = (count + cols - 1) / cols;
  const double dx = side_m / cols;
  const double dy = side_m / rows;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int r = i / cols;
    const int c = i % cols;
    pts.emplace_back((c + 0.5) * dx, (r + 0.5) * dy);
  }
  return pts;
}

NodePositions place_nodes(const Scenario& sc) {
  auto rng = make_rng(sc.rng_seed, Stream::Placement);
  std::uniform_real_distribution<double> u(0.0, sc.area_side_m);
  const EnuFrame frame = EnuFrame::at(sc.site_lat_deg, sc.site_lon_deg);
  const double half = sc.area_side_m / 2.0;

  NodePositions pos;
  if (sc.tbs_layout == TbsLayout::Grid) {
    pos.tbs_xy = grid_points(sc.n_tbs, sc.area_side_m);
  } else {
    for (int m = 0; m < sc.n_tbs; ++m) {
      const double x = u(rng);
      const double y = u(rng);
      pos.tbs_xy.emplace_back(x, y);
    }
  }
  for (int j = 0; j < sc.n_gu; ++j) {
    const double x = u(rng);
    const double y = u(rng);
    pos.gu_xy.emplace_back(x, y);
  }
  for (int l = 0; l < sc.n_geo_gs; ++l) {
    const double x = u(rng);
    const double y = u(rng);
    pos.geo_gs_xy.emplace_back(x, y);
  }
  auto lift = [&](const auto& xy, std::vector<Vec3>& out) {
    out.reserve(xy.size());
    for (const auto& [x, y] : xy) out.push_back(frame.to_ecef(x - half, y - half));
  };
  lift(pos.tbs_xy, pos.tbs);
  lift(pos.gu_xy, pos.gu);
  lift(pos.geo_gs_xy, pos.geo_gs);
  return pos;
}

} // namespace istn
