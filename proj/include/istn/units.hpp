#pragma once

#include <cmath>

namespace istn {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;       // m/s
inline constexpr double kEarthRadius = 6371.0e3;           // m, spherical model
inline constexpr double kEarthMu = 3.986e14;               // m^3/s^2
inline constexpr double kEarthRotationRate = 7.2921159e-5; // rad/s
inline constexpr double kGeoAltitude = 35786.0e3;          // m
inline constexpr double kSystemTemperatureK = 290.0;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// dBm to watts.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

} // namespace istn
