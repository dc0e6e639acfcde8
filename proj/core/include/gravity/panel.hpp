#pragma once

#include "gravity/records.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace gravity {

// Which pairwise distance feeds the regressions.
enum class DistanceMeasure { capital, weighted_city };
std::string to_string(DistanceMeasure m);
DistanceMeasure parse_distance_measure(const std::string& text); // throws DomainError

// File locations for one panel. in_directory() applies the fixed schema
// names; cities.csv is optional and only picked up when present.
struct PanelPaths {
    std::filesystem::path countries;
    std::filesystem::path flows;
    std::filesystem::path macro;
    std::filesystem::path memberships;
    std::filesystem::path adjacency;
    std::filesystem::path oil;
    std::filesystem::path cities; // empty when absent

    static PanelPaths in_directory(const std::filesystem::path& dir);
};

// Raw, unvalidated panel content. Produced by the CSV loader and by the
// synthetic generator; validated and indexed by the PanelDataset constructor.
struct PanelData {
    std::vector<CountryRecord> countries;
    MacroSeries macro;
    std::vector<FlowRecord> flows;
    MembershipTable memberships;
    AdjacencyTable adjacency;
    OilSeries oil;
};

// A validated, cross-referenced bilateral trade panel. Immutable after
// construction; safe to read from any number of concurrent workers.
class PanelDataset {
public:
    // Validates every dataset invariant (unique codes, coordinate ranges,
    // positive macro values, canonical unique flows, reference integrity,
    // membership overlaps, oil contiguity) and computes the distance matrix
    // for the requested measure. Throws ValidationError naming the offending
    // record.
    PanelDataset(PanelData data, DistanceMeasure measure);

    const std::vector<CountryRecord>& countries() const { return countries_; }
    int country_index(const std::string& iso3) const; // -1 when unknown
    const CountryRecord& country(const std::string& iso3) const; // throws DomainError

    const MacroSeries& macro() const { return macro_; }
    const std::vector<FlowRecord>& flows() const { return flows_; }
    const MembershipTable& memberships() const { return memberships_; }
    const AdjacencyTable& adjacency() const { return adjacency_; }
    const OilSeries& oil() const { return oil_; }

    DistanceMeasure distance_measure() const { return measure_; }
    // Pairwise distance under the active measure, km. Symmetric, zero diagonal.
    double distance_km(int i, int j) const;
    double distance_km(const std::string& a, const std::string& b) const;

    std::size_t country_count() const { return countries_.size(); }
    // n(n-1)/2 unordered pairs.
    std::size_t pair_count() const;

    // Sorted distinct years appearing in flow records.
    const std::vector<int>& years() const { return years_; }
    bool covers_year(int year) const;

    const FlowRecord* find_flow(int year, const std::string& a,
                                const std::string& b, Sector sector) const;

private:
    std::vector<CountryRecord> countries_;
    MacroSeries macro_;
    std::vector<FlowRecord> flows_;
    MembershipTable memberships_;
    AdjacencyTable adjacency_;
    OilSeries oil_;
    DistanceMeasure measure_ = DistanceMeasure::capital;

    std::unordered_map<std::string, int> index_;
    std::vector<double> distance_; // row-major n*n, active measure
    std::vector<int> years_;
    // (year, sector, i-index, j-index) -> position in flows_
    std::map<std::tuple<int, Sector, int, int>, std::size_t> flow_index_;
};

// Parses the CSV schemas and builds a validated dataset.
PanelDataset load_panel(const PanelPaths& paths, DistanceMeasure measure);
PanelDataset load_panel(const std::filesystem::path& dir, DistanceMeasure measure);

// One PairObservation per unordered pair holding a flow record for
// (year, sector), in canonical (i, j) order; pairs without a record are
// omitted, never imputed. Throws DomainError when the year is outside panel
// coverage.
std::vector<PairObservation> pair_observations(const PanelDataset& panel,
                                               int year, Sector sector);

// Writes the panel back out in the input CSV schemas (numeric fields in
// shortest round-trip form). Creates the directory if needed.
void write_panel_csvs(const PanelDataset& panel, const std::filesystem::path& dir);

} // namespace gravity
