#include "istn/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "istn/units.hpp"

namespace istn {

ConstellationState ConstellationState::walker(std::vector<Orbit> orbits, double semi_major_m,
                                              double inclination_deg, double slot_duration_s,
                                              bool earth_rotation, int n_slots, Vec3 geo) {
  ConstellationState cs;
  cs.n_sats_ = static_cast<int>(orbits.size());
  cs.n_slots_ = n_slots;
  cs.geo_ = geo;
  cs.orbits_ = std::move(orbits);
  cs.semi_major_m_ = semi_major_m;
  cs.cos_inc_ = std::cos(deg_to_rad(inclination_deg));
  cs.sin_inc_ = std::sin(deg_to_rad(inclination_deg));
  cs.mean_motion_ = std::sqrt(kEarthMu / (semi_major_m * semi_major_m * semi_major_m));
  cs.slot_duration_s_ = slot_duration_s;
  cs.earth_rotation_ = earth_rotation;
  return cs;
}

ConstellationState ConstellationState::trace(std::vector<std::vector<Vec3>> positions, Vec3 geo) {
  ConstellationState cs;
  cs.from_trace_ = true;
  cs.n_slots_ = static_cast<int>(positions.size());
  cs.n_sats_ = positions.empty() ? 0 : static_cast<int>(positions.front().size());
  cs.geo_ = geo;
  cs.stored_ = std::move(positions);
  return cs;
}

Vec3 ConstellationState::position(int t, int n) const {
  if (from_trace_) return stored_[t][n];
  const double time = t * slot_duration_s_;
  const Orbit& o = orbits_[n];
  const double u = o.phase0_rad + mean_motion_ * time;
  const double cu = std::cos(u), su = std::sin(u);
  const double co = std::cos(o.raan_rad), so = std::sin(o.raan_rad);
  Vec3 p{semi_major_m_ * (cu * co - su * cos_inc_ * so), semi_major_m_ * (cu * so + su * cos_inc_ * co),
         semi_major_m_ * (su * sin_inc_)};
  if (earth_rotation_) {
    const double g = -kEarthRotationRate * time;
    const double cg = std::cos(g), sg = std::sin(g);
    p = {cg * p.x - sg * p.y, sg * p.x + cg * p.y, p.z};
  }
  return p;
}

std::vector<Vec3> ConstellationState::positions_at(int t) const {
  if (from_trace_) return stored_[t];
  std::vector<Vec3> out;
  out.reserve(n_sats_);
  for (int n = 0; n < n_sats_; ++n) out.push_back(position(t, n));
  return out;
}

double orbital_period_s(double a_m) { return 2.0 * kPi * std::sqrt(a_m * a_m * a_m / kEarthMu); }

Vec3 geo_position_for(const Scenario& sc) { return geodetic_to_ecef(0.0, sc.site_lon_deg, kGeoAltitude); }

ConstellationState generate_walker(const Scenario& sc) {
  const auto& cfg = sc.constellation;
  if (cfg.altitude_m < 300.0e3 || cfg.altitude_m > 2000.0e3) {
    throw ConfigError("constellation.altitude_m: altitude out of bounds [300 km, 2000 km]");
  }
  const int total = cfg.planes * cfg.sats_per_plane;
  std::vector<ConstellationState::Orbit> orbits;
  orbits.reserve(total);
  for (int p = 0; p < cfg.planes; ++p) {
    for (int s = 0; s < cfg.sats_per_plane; ++s) {
      const double raan = 2.0 * kPi * p / cfg.planes;
      const double phase = 2.0 * kPi * s / cfg.sats_per_plane + 2.0 * kPi * cfg.phasing * p / total;
      orbits.push_back({raan, phase});
    }
  }
  return ConstellationState::walker(std::move(orbits), kEarthRadius + cfg.altitude_m, cfg.inclination_deg,
                                    sc.slot_duration_s, cfg.earth_rotation, sc.n_timeslots, geo_position_for(sc));
}

ConstellationState load_trace(const std::filesystem::path& path, const Scenario& sc) {
  std::ifstream in(path);
  if (!in) throw ConfigError("constellation.trace_file: cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw ConfigError("constellation.trace_file: empty file");
  if (line.rfind("t,sat_id,x_m,y_m,z_m", 0) != 0) {
    throw ConfigError("constellation.trace_file: expected header t,sat_id,x_m,y_m,z_m");
  }

  struct Row {
    int t, sat;
    Vec3 p;
  };
  std::vector<Row> rows;
  int max_sat = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[5];
    for (auto& s : f) {
      if (!std::getline(ss, s, ',')) throw ConfigError("trace line " + std::to_string(line_no) + ": expected 5 fields");
    }
    Row r{};
    try {
      r.t = std::stoi(f[0]);
      r.sat = std::stoi(f[1]);
      r.p = {std::stod(f[2]), std::stod(f[3]), std::stod(f[4])};
    } catch (const std::exception&) {
      throw ConfigError("trace line " + std::to_string(line_no) + ": malformed number");
    }
    if (r.t < 0 || r.sat < 0) throw ConfigError("trace line " + std::to_string(line_no) + ": negative index");
    const double alt = r.p.norm() - kEarthRadius;
    if (alt < 300.0e3 || alt > 2000.0e3) {
      throw ConfigError("trace line " + std::to_string(line_no) + ": altitude out of bounds");
    }
    max_sat = std::max(max_sat, r.sat);
    rows.push_back(r);
  }
  if (max_sat < 0) throw ConfigError("constellation.trace_file: no rows");

  const int n_sats = max_sat + 1;
  std::vector<std::vector<Vec3>> pos(sc.n_timeslots, std::vector<Vec3>(n_sats));
  std::vector<std::vector<char>> have(sc.n_timeslots, std::vector<char>(n_sats, 0));
  for (const Row& r : rows) {
    if (r.t >= sc.n_timeslots) continue;
    pos[r.t][r.sat] = r.p;
    have[r.t][r.sat] = 1;
  }
  for (int t = 0; t < sc.n_timeslots; ++t) {
    for (int n = 0; n < n_sats; ++n) {
      if (!have[t][n]) {
        throw ConfigError("constellation.trace_file: missing (t=" + std::to_string(t) + ", sat=" +
                          std::to_string(n) + ")");
      }
    }
  }
  return ConstellationState::trace(std::move(pos), geo_position_for(sc));
}

ConstellationState generate_constellation(const Scenario& sc) {
  if (sc.constellation.model == ConstellationModel::Trace) return load_trace(sc.constellation.trace_file, sc);
  return generate_walker(sc);
}

int visible_count(const ConstellationState& cs, int t, const Vec3& ground, double elevation_min_deg) {
  int count = 0;
  for (int n = 0; n < cs.n_sats(); ++n) {
    if (elevation_angle_deg(cs.position(t, n), ground) >= elevation_min_deg) ++count;
  }
  return count;
}

} // namespace istn
