#pragma once

#include "bot/core.hpp"

namespace bot {

inline constexpr double kEarthRadiusKm = 6371.0088;

struct LatLon {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, (-180, 180]
};

// Unit-sphere Cartesian embedding: (0, 0) -> (1, 0, 0), north pole -> (0, 0, 1).
Point geo_embed(double lat, double lon);
inline Point geo_embed(const LatLon& ll) { return geo_embed(ll.lat, ll.lon); }

// Radially projects a nonzero 3-D point onto the sphere and reads off
// latitude/longitude.
LatLon geo_project(const Point& p);

// Central angle in radians between two nonzero 3-D points.
double central_angle(const Point& a, const Point& b);

// Points along the great circle from a to b (both ends included) such that no
// piece is longer than max_km on the Earth's surface.
std::vector<LatLon> great_circle_path(const Point& a, const Point& b, double max_km);

}  // namespace bot
