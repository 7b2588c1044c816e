#pragma once

#include <cmath>

namespace istn {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Vec3&) const = default;

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 unit() const { return *this * (1.0 / norm()); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Angle between two vectors in degrees, in [0, 180].
double angle_between_deg(const Vec3& a, const Vec3& b);

/// Elevation of `sat` seen from ground point `ground` on a spherical Earth,
/// in degrees within [-90, 90]. The local vertical is the geocentric radial.
double elevation_angle_deg(const Vec3& sat, const Vec3& ground);

/// Earth-centred Earth-fixed position of a point at geocentric latitude and
/// longitude (degrees) and height above the spherical surface (m).
Vec3 geodetic_to_ecef(double lat_deg, double lon_deg, double height_m = 0.0);

/// Local east/north/up basis at a surface point.
struct EnuFrame {
  Vec3 origin;
  Vec3 east;
  Vec3 north;
  Vec3 up;

  static EnuFrame at(double lat_deg, double lon_deg);
  /// Point offset by (east_m, north_m) on the tangent plane.
  Vec3 to_ecef(double east_m, double north_m, double up_m = 0.0) const;
};

} // namespace istn
