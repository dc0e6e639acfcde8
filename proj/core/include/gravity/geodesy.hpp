#pragma once

#include "gravity/records.hpp"

namespace gravity {

// IUGG mean Earth radius. All distances in this project are great-circle
// distances on this sphere; sub-0.5% ellipsoidal error is immaterial to
// log-distance regressors.
inline constexpr double earth_radius_km = 6371.0088;

struct GeoPoint {
    double lat_deg = 0.0; // [-90, 90]
    double lon_deg = 0.0; // (-180, 180]
};

bool valid_point(const GeoPoint& p);

// Great-circle distance in km via the haversine formula. Works on absolute
// coordinate differences so d(a,b) and d(b,a) are the same expression and the
// symmetry is exact, not approximate. Zero iff the points coincide.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

// Distance between the two capitals.
double capital_distance(const CountryRecord& a, const CountryRecord& b);

// Expected inter-city distance under independent GDP-share weights:
//   sum_p sum_q w_p * w_q * haversine(city_p of a, city_q of b).
// This is the "mass not concentrated at a single point" reading of a
// size-weighted distance; averaging coordinates instead would be ill-defined
// across the antimeridian. Throws Error(E_VALUE) naming the country when a
// city list is empty, with a hint to fall back to capital_distance.
double weighted_city_distance(const CountryRecord& a, const CountryRecord& b);

} // namespace gravity
