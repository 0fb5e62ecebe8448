#include "bot/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bot {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

Point unit(const Point& p) {
  if (p.dim() != 3) throw ParameterError("geographic points must be 3-D");
  const double r = norm(p);
  if (!(r > 0.0)) throw ParameterError("cannot project the origin onto the sphere");
  return p / r;
}

}  // namespace

Point geo_embed(double lat, double lon) {
  if (!(lat >= -90.0 && lat <= 90.0)) throw ParameterError("latitude out of range: " + std::to_string(lat));
  if (!(lon >= -180.0 && lon <= 180.0)) throw ParameterError("longitude out of range: " + std::to_string(lon));
  if (lat == 90.0) return Point{0.0, 0.0, 1.0};
  if (lat == -90.0) return Point{0.0, 0.0, -1.0};
  const double phi = lat * kDeg;
  const double lambda = lon * kDeg;
  return Point{std::cos(phi) * std::cos(lambda), std::cos(phi) * std::sin(lambda), std::sin(phi)};
}

LatLon geo_project(const Point& p) {
  const Point u = unit(p);
  LatLon out;
  out.lat = std::atan2(u[2], std::hypot(u[0], u[1])) / kDeg;
  out.lon = std::atan2(u[1], u[0]) / kDeg;
  if (out.lon <= -180.0) out.lon += 360.0;
  return out;
}

double central_angle(const Point& a, const Point& b) {
  const Point ua = unit(a);
  const Point ub = unit(b);
  const double cx = ua[1] * ub[2] - ua[2] * ub[1];
  const double cy = ua[2] * ub[0] - ua[0] * ub[2];
  const double cz = ua[0] * ub[1] - ua[1] * ub[0];
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot(ua, ub));
}

std::vector<LatLon> great_circle_path(const Point& a, const Point& b, double max_km) {
  if (!(max_km > 0.0)) throw ParameterError("segment length must be positive");
  const Point ua = unit(a);
  const Point ub = unit(b);
  const double theta = central_angle(ua, ub);
  const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(theta * kEarthRadiusKm / max_km)));
  std::vector<LatLon> path;
  path.reserve(pieces + 1);
  path.push_back(geo_project(ua));
  const double s = std::sin(theta);
  for (std::size_t k = 1; k < pieces; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(pieces);
    // Slerp; antipodal endpoints (s == 0 with theta == pi) are not routed.
    const Point p = s > 1e-15 ? ua * (std::sin((1.0 - t) * theta) / s) + ub * (std::sin(t * theta) / s)
                              : ua * (1.0 - t) + ub * t;
    path.push_back(geo_project(p));
  }
  path.push_back(geo_project(ub));
  return path;
}

}  // namespace bot
