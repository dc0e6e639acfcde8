#include "gravity/geodesy.hpp"

#include "gravity/errors.hpp"

#include <cmath>

namespace gravity {
namespace {

constexpr double pi = 3.141592653589793238462643383279502884;

double radians(double deg) { return deg * (pi / 180.0); }

} // namespace

bool valid_point(const GeoPoint& p) {
    return p.lat_deg >= -90.0 && p.lat_deg <= 90.0 &&
           p.lon_deg > -180.0 && p.lon_deg <= 180.0;
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = radians(a.lat_deg);
    const double phi2 = radians(b.lat_deg);
    const double dphi = std::fabs(phi2 - phi1);
    // Longitudes live on a circle: take the short way around so the formula
    // never sees a separation above pi.
    double dlam = std::fabs(radians(b.lon_deg) - radians(a.lon_deg));
    if (dlam > pi) dlam = 2.0 * pi - dlam;

    const double sin_dphi = std::sin(dphi / 2.0);
    const double sin_dlam = std::sin(dlam / 2.0);
    double h = sin_dphi * sin_dphi +
               std::cos(phi1) * std::cos(phi2) * sin_dlam * sin_dlam;
    // Rounding can push h a hair past 1 for near-antipodal points.
    if (h > 1.0) h = 1.0;
    return 2.0 * earth_radius_km * std::asin(std::sqrt(h));
}

double capital_distance(const CountryRecord& a, const CountryRecord& b) {
    return haversine_km({a.capital_lat, a.capital_lon},
                        {b.capital_lat, b.capital_lon});
}

double weighted_city_distance(const CountryRecord& a, const CountryRecord& b) {
    const CountryRecord* rec[2] = {&a, &b};
    for (const CountryRecord* r : rec) {
        if (r->cities.empty())
            throw Error("E_VALUE",
                        "country '" + r->iso3 +
                            "' has no city list; use capital_distance instead");
    }
    // Keep the accumulation order independent of argument order so the result
    // is exactly symmetric: iterate the lexicographically smaller code first.
    const CountryRecord* first = rec[0];
    const CountryRecord* second = rec[1];
    if (second->iso3 < first->iso3) std::swap(first, second);

    double total = 0.0;
    for (const CityEntry& p : first->cities) {
        for (const CityEntry& q : second->cities) {
            total += p.gdp_share * q.gdp_share *
                     haversine_km({p.lat_deg, p.lon_deg}, {q.lat_deg, q.lon_deg});
        }
    }
    return total;
}

} // namespace gravity
