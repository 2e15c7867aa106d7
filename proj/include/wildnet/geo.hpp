#pragma once

namespace wildnet {

struct LatLon {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees

  bool operator==(const LatLon&) const = default;
};

inline constexpr double kEarthRadiusM = 6371000.0;

// Great-circle distance in meters (haversine, spherical earth).
double haversine_m(const LatLon& a, const LatLon& b);

// Point at the given distance due north of the origin; handy for laying
// out test geometries with exact spacings.
LatLon offset_north_m(const LatLon& origin, double meters);

}  // namespace wildnet
