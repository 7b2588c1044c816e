#pragma once

#include <filesystem>
#include <vector>

#include "istn/geometry.hpp"
#include "istn/scenario.hpp"

namespace istn {

/// Satellite positions per timeslot in the Earth-fixed frame. Walker shells
/// are evaluated on demand from their orbital elements; trace files are held
/// in memory.
class ConstellationState {
public:
  struct Orbit {
    double raan_rad;
    double phase0_rad;
  };

  static ConstellationState walker(std::vector<Orbit> orbits, double semi_major_m, double inclination_deg,
                                   double slot_duration_s, bool earth_rotation, int n_slots, Vec3 geo);
  static ConstellationState trace(std::vector<std::vector<Vec3>> positions, Vec3 geo);

  int n_sats() const { return n_sats_; }
  int n_slots() const { return n_slots_; }
  const Vec3& geo_position() const { return geo_; }

  Vec3 position(int t, int n) const;
  std::vector<Vec3> positions_at(int t) const;

private:
  bool from_trace_ = false;
  int n_sats_ = 0;
  int n_slots_ = 0;
  Vec3 geo_;

  std::vector<Orbit> orbits_;
  double semi_major_m_ = 0.0;
  double cos_inc_ = 1.0;
  double sin_inc_ = 0.0;
  double mean_motion_ = 0.0;
  double slot_duration_s_ = 0.0;
  bool earth_rotation_ = true;

  std::vector<std::vector<Vec3>> stored_; // [t][n]
};

/// Circular-orbit period (s) for semi-major axis `a_m`.
double orbital_period_s(double a_m);

/// Walker-delta shell on circular orbits. Slot t sits at time
/// t * slot_duration_s; the mean anomaly advances by sqrt(mu/a^3) per second.
ConstellationState generate_walker(const Scenario& sc);

/// Reads a CSV with header `t,sat_id,x_m,y_m,z_m` (t and sat_id 0-based).
/// Every (t, sat) pair for t < n_timeslots must be present.
ConstellationState load_trace(const std::filesystem::path& path, const Scenario& sc);

ConstellationState generate_constellation(const Scenario& sc);

/// GEO satellite above the equator at the site longitude.
Vec3 geo_position_for(const Scenario& sc);

int visible_count(const ConstellationState& cs, int t, const Vec3& ground, double elevation_min_deg);

} // namespace istn
