#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gravity {

// Trade sectors carried by flow records. "total" is the all-goods aggregate;
// the three named sectors are the paper-style disaggregation.
enum class Sector { total, agriculture, manufacturing, services };

inline constexpr std::array<Sector, 4> all_sectors = {
    Sector::total, Sector::agriculture, Sector::manufacturing, Sector::services};
// The disaggregated sectors, i.e. everything except the aggregate.
inline constexpr std::array<Sector, 3> trade_sectors = {
    Sector::agriculture, Sector::manufacturing, Sector::services};

std::string to_string(Sector s);
Sector parse_sector(const std::string& text); // throws DomainError

struct CityEntry {
    std::string name;
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double gdp_share = 0.0; // in [0,1]; one country's shares sum to 1
};

struct CountryRecord {
    std::string iso3;
    std::string name;
    double capital_lat = 0.0; // degrees in [-90, 90]
    double capital_lon = 0.0; // degrees in (-180, 180]
    std::vector<CityEntry> cities; // optional; empty means capital-only
    std::set<std::string> languages;
};

struct MacroEntry {
    double gdp_usd = 0.0;   // > 0
    double population = 0.0; // persons, > 0
};

// (iso3, year) -> GDP and population.
class MacroSeries {
public:
    // Returns false when an entry for (iso3, year) already exists.
    bool set(const std::string& iso3, int year, MacroEntry entry);
    const MacroEntry* find(const std::string& iso3, int year) const;
    std::size_t size() const { return entries_.size(); }
    const std::map<std::pair<std::string, int>, MacroEntry>& entries() const {
        return entries_;
    }

private:
    std::map<std::pair<std::string, int>, MacroEntry> entries_;
};

struct FlowRecord {
    int year = 0;
    std::string reporter; // canonical: reporter < partner lexicographically
    std::string partner;
    Sector sector = Sector::total;
    double value_usd = 0.0; // >= 0; zero is a real observation, not missing
};

struct MembershipRow {
    std::string bloc;
    std::string iso3;
    int year_start = 0; // inclusive
    int year_end = 0;   // inclusive
};

class MembershipTable {
public:
    // Returns false when the row's year range overlaps existing coverage of
    // the same (bloc, country).
    bool add(MembershipRow row);
    bool covers(const std::string& bloc, const std::string& iso3, int year) const;
    // Both countries members of the named bloc in `year`.
    bool share_bloc(const std::string& bloc, const std::string& a,
                    const std::string& b, int year) const;
    // Some bloc contains both countries in `year`.
    bool share_any_bloc(const std::string& a, const std::string& b, int year) const;
    const std::vector<MembershipRow>& rows() const { return rows_; }
    std::vector<std::string> blocs() const; // sorted distinct bloc ids

private:
    std::vector<MembershipRow> rows_;
};

// Unordered country pairs sharing a land border.
class AdjacencyTable {
public:
    // Returns false for a duplicate pair.
    bool add(const std::string& a, const std::string& b);
    bool adjacent(const std::string& a, const std::string& b) const;
    std::size_t size() const { return pairs_.size(); }
    const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

private:
    std::set<std::pair<std::string, std::string>> pairs_; // stored with first < second
};

// Annual oil price, USD per barrel.
class OilSeries {
public:
    // Returns false when the year is already present.
    bool set(int year, double price);
    std::optional<double> price(int year) const;
    bool covers(int year) const { return prices_.count(year) != 0; }
    bool empty() const { return prices_.empty(); }
    int min_year() const;
    int max_year() const;
    // True when every year in [min_year, max_year] has a price.
    bool contiguous() const;
    const std::map<int, double>& entries() const { return prices_; }

private:
    std::map<int, double> prices_;
};

// One estimation-ready row: an unordered country pair in one (year, sector).
struct PairObservation {
    int year = 0;
    std::string i; // canonical: i < j lexicographically
    std::string j;
    Sector sector = Sector::total;
    double trade_value = 0.0; // USD, >= 0
    double gdp_i = 0.0;
    double gdp_j = 0.0;
    double pop_i = 0.0;
    double pop_j = 0.0;
    double distance_km = 0.0; // > 0 for distinct countries
    int adjacent = 0;
    int same_language = 0;     // language sets intersect
    int shared_free_trade = 0; // both in some common bloc that year
    // Blocs containing both countries in this year; feeds the named bloc
    // dummies of the product-form layout. shared_free_trade == !empty().
    std::set<std::string> shared_blocs;
};

} // namespace gravity
