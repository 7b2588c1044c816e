#include "istn/geometry.hpp"

#include <algorithm>

#include "istn/units.hpp"

namespace istn {

double angle_between_deg(const Vec3& a, const Vec3& b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return rad_to_deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

double elevation_angle_deg(const Vec3& sat, const Vec3& ground) {
  const Vec3 los = sat - ground;
  const double s = los.dot(ground.unit()) / los.norm();
  return rad_to_deg(std::asin(std::clamp(s, -1.0, 1.0)));
}

Vec3 geodetic_to_ecef(double lat_deg, double lon_deg, double height_m) {
  const double lat = deg_to_rad(lat_deg);
  const double lon = deg_to_rad(lon_deg);
  const double r = kEarthRadius + height_m;
  return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon), r * std::sin(lat)};
}

EnuFrame EnuFrame::at(double lat_deg, double lon_deg) {
  const double lat = deg_to_rad(lat_deg);
  const double lon = deg_to_rad(lon_deg);
  EnuFrame f;
  f.origin = geodetic_to_ecef(lat_deg, lon_deg);
  f.east = {-std::sin(lon), std::cos(lon), 0.0};
  f.north = {-std::sin(lat) * std::cos(lon), -std::sin(lat) * std::sin(lon), std::cos(lat)};
  f.up = {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
  return f;
}

Vec3 EnuFrame::to_ecef(double east_m, double north_m, double up_m) const {
  return origin + east * east_m + north * north_m + up * up_m;
}

} // namespace istn
