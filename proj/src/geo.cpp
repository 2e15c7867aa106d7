#include "wildnet/geo.hpp"

#include <cmath>
#include <numbers>

namespace wildnet {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
}

double haversine_m(const LatLon& a, const LatLon& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

LatLon offset_north_m(const LatLon& origin, double meters) {
  return LatLon{origin.lat + (meters / kEarthRadiusM) / kDegToRad, origin.lon};
}

}  // namespace wildnet
