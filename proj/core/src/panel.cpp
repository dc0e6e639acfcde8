#include "gravity/panel.hpp"

#include "gravity/csv.hpp"
#include "gravity/errors.hpp"
#include "gravity/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

namespace gravity {

// ---------------------------------------------------------------------------
// Record-type methods (dataset domain types)

std::string to_string(Sector s) {
    switch (s) {
        case Sector::total: return "total";
        case Sector::agriculture: return "agriculture";
        case Sector::manufacturing: return "manufacturing";
        case Sector::services: return "services";
    }
    return "total";
}

Sector parse_sector(const std::string& text) {
    for (Sector s : all_sectors)
        if (text == to_string(s)) return s;
    throw DomainError("unknown sector '" + text +
                      "' (expected total, agriculture, manufacturing, or services)");
}

bool MacroSeries::set(const std::string& iso3, int year, MacroEntry entry) {
    return entries_.emplace(std::make_pair(iso3, year), entry).second;
}

const MacroEntry* MacroSeries::find(const std::string& iso3, int year) const {
    auto it = entries_.find(std::make_pair(iso3, year));
    return it == entries_.end() ? nullptr : &it->second;
}

bool MembershipTable::add(MembershipRow row) {
    for (const MembershipRow& r : rows_) {
        if (r.bloc == row.bloc && r.iso3 == row.iso3 &&
            row.year_start <= r.year_end && r.year_start <= row.year_end)
            return false;
    }
    rows_.push_back(std::move(row));
    return true;
}

bool MembershipTable::covers(const std::string& bloc, const std::string& iso3,
                             int year) const {
    for (const MembershipRow& r : rows_)
        if (r.bloc == bloc && r.iso3 == iso3 && r.year_start <= year &&
            year <= r.year_end)
            return true;
    return false;
}

bool MembershipTable::share_bloc(const std::string& bloc, const std::string& a,
                                 const std::string& b, int year) const {
    return covers(bloc, a, year) && covers(bloc, b, year);
}

bool MembershipTable::share_any_bloc(const std::string& a, const std::string& b,
                                     int year) const {
    for (const std::string& bloc : blocs())
        if (share_bloc(bloc, a, b, year)) return true;
    return false;
}

std::vector<std::string> MembershipTable::blocs() const {
    std::vector<std::string> out;
    for (const MembershipRow& r : rows_) out.push_back(r.bloc);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool AdjacencyTable::add(const std::string& a, const std::string& b) {
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    return pairs_.insert(std::move(key)).second;
}

bool AdjacencyTable::adjacent(const std::string& a, const std::string& b) const {
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    return pairs_.count(key) != 0;
}

bool OilSeries::set(int year, double price) {
    return prices_.emplace(year, price).second;
}

std::optional<double> OilSeries::price(int year) const {
    auto it = prices_.find(year);
    if (it == prices_.end()) return std::nullopt;
    return it->second;
}

int OilSeries::min_year() const {
    if (prices_.empty()) throw DomainError("oil series is empty");
    return prices_.begin()->first;
}

int OilSeries::max_year() const {
    if (prices_.empty()) throw DomainError("oil series is empty");
    return prices_.rbegin()->first;
}

bool OilSeries::contiguous() const {
    if (prices_.empty()) return true;
    int expected = prices_.begin()->first;
    for (const auto& [year, price] : prices_) {
        if (year != expected) return false;
        ++expected;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Distance measure

std::string to_string(DistanceMeasure m) {
    return m == DistanceMeasure::capital ? "capital" : "weighted-city";
}

DistanceMeasure parse_distance_measure(const std::string& text) {
    if (text == "capital") return DistanceMeasure::capital;
    if (text == "weighted-city" || text == "weighted_city")
        return DistanceMeasure::weighted_city;
    throw DomainError("unknown distance measure '" + text +
                      "' (expected capital or weighted-city)");
}

// ---------------------------------------------------------------------------
// Validation helpers

namespace {

std::string flow_name(const FlowRecord& f) {
    return "flow (" + std::to_string(f.year) + ", " + f.reporter + ", " +
           f.partner + ", " + to_string(f.sector) + ")";
}

bool valid_iso3(const std::string& code) {
    if (code.size() != 3) return false;
    for (char c : code)
        if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))) return false;
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// PanelDataset

PanelDataset::PanelDataset(PanelData data, DistanceMeasure measure)
    : countries_(std::move(data.countries)),
      macro_(std::move(data.macro)),
      flows_(std::move(data.flows)),
      memberships_(std::move(data.memberships)),
      adjacency_(std::move(data.adjacency)),
      oil_(std::move(data.oil)),
      measure_(measure) {
    if (countries_.empty())
        throw ValidationError("E_VALUE", "dataset has no countries");

    std::sort(countries_.begin(), countries_.end(),
              [](const CountryRecord& a, const CountryRecord& b) {
                  return a.iso3 < b.iso3;
              });
    for (std::size_t idx = 0; idx < countries_.size(); ++idx) {
        const CountryRecord& c = countries_[idx];
        if (!valid_iso3(c.iso3))
            throw ValidationError("E_VALUE", "bad country code '" + c.iso3 +
                                                 "' (want 3 chars, A-Z or 0-9)");
        if (!index_.emplace(c.iso3, static_cast<int>(idx)).second)
            throw ValidationError("E_VALUE",
                                  "duplicate country code '" + c.iso3 + "'");
        if (!valid_point({c.capital_lat, c.capital_lon}))
            throw ValidationError(
                "E_RANGE", "country '" + c.iso3 + "': capital coordinates (" +
                               std::to_string(c.capital_lat) + ", " +
                               std::to_string(c.capital_lon) +
                               ") outside lat [-90,90] / lon (-180,180]");
        if (!c.cities.empty()) {
            double share_sum = 0.0;
            for (const CityEntry& city : c.cities) {
                if (!valid_point({city.lat_deg, city.lon_deg}))
                    throw ValidationError("E_RANGE",
                                          "city '" + city.name + "' of '" + c.iso3 +
                                              "': coordinates out of range");
                if (city.gdp_share < 0.0 || city.gdp_share > 1.0)
                    throw ValidationError("E_VALUE",
                                          "city '" + city.name + "' of '" + c.iso3 +
                                              "': gdp_share outside [0,1]");
                share_sum += city.gdp_share;
            }
            if (std::fabs(share_sum - 1.0) > 1e-9)
                throw ValidationError(
                    "E_VALUE", "country '" + c.iso3 + "': city gdp_shares sum to " +
                                   std::to_string(share_sum) + ", expected 1");
        }
    }

    auto require_country = [&](const std::string& iso3, const std::string& where) {
        if (index_.find(iso3) == index_.end())
            throw ValidationError("E_REF",
                                  where + ": unknown country '" + iso3 + "'");
    };

    // Flows: canonical pair order, uniqueness, reference integrity, macro
    // coverage for both endpoints.
    for (FlowRecord& f : flows_) {
        if (f.reporter == f.partner)
            throw ValidationError("E_VALUE",
                                  flow_name(f) + ": reporter equals partner");
        if (f.partner < f.reporter) std::swap(f.reporter, f.partner);
        require_country(f.reporter, flow_name(f));
        require_country(f.partner, flow_name(f));
        if (!(f.value_usd >= 0.0) || !std::isfinite(f.value_usd))
            throw ValidationError("E_VALUE", flow_name(f) + ": value_usd must be >= 0, got " +
                                                 std::to_string(f.value_usd));
        for (const std::string& iso3 : {f.reporter, f.partner})
            if (!macro_.find(iso3, f.year))
                throw ValidationError("E_REF", flow_name(f) + ": no macro entry for (" +
                                                   iso3 + ", " +
                                                   std::to_string(f.year) + ")");
    }
    std::sort(flows_.begin(), flows_.end(),
              [](const FlowRecord& a, const FlowRecord& b) {
                  return std::tie(a.year, a.sector, a.reporter, a.partner) <
                         std::tie(b.year, b.sector, b.reporter, b.partner);
              });
    for (std::size_t i = 0; i < flows_.size(); ++i) {
        const FlowRecord& f = flows_[i];
        auto key = std::make_tuple(f.year, f.sector, country_index(f.reporter),
                                   country_index(f.partner));
        if (!flow_index_.emplace(key, i).second)
            throw ValidationError("E_VALUE", "duplicate " + flow_name(f));
        if (years_.empty() || years_.back() != f.year) years_.push_back(f.year);
    }
    std::sort(years_.begin(), years_.end());
    years_.erase(std::unique(years_.begin(), years_.end()), years_.end());

    // Memberships and adjacency reference known countries; membership ranges
    // are ordered (overlap is rejected by MembershipTable::add at build time).
    for (const MembershipRow& r : memberships_.rows()) {
        require_country(r.iso3, "membership (" + r.bloc + ", " + r.iso3 + ")");
        if (r.year_start > r.year_end)
            throw ValidationError("E_VALUE", "membership (" + r.bloc + ", " + r.iso3 +
                                                 "): year_start " +
                                                 std::to_string(r.year_start) +
                                                 " > year_end " +
                                                 std::to_string(r.year_end));
    }
    for (const auto& [a, b] : adjacency_.pairs()) {
        if (a == b)
            throw ValidationError("E_VALUE",
                                  "adjacency pair (" + a + ", " + b + ") is a self-pair");
        require_country(a, "adjacency pair (" + a + ", " + b + ")");
        require_country(b, "adjacency pair (" + a + ", " + b + ")");
    }

    for (const auto& [year, price] : oil_.entries())
        if (!(price > 0.0) || !std::isfinite(price))
            throw ValidationError("E_VALUE", "oil price for " + std::to_string(year) +
                                                 " must be > 0, got " +
                                                 std::to_string(price));
    if (!oil_.contiguous()) {
        int expected = oil_.min_year();
        for (const auto& [year, price] : oil_.entries()) {
            if (year != expected) break;
            ++expected;
        }
        throw ValidationError("E_VALUE",
                              "oil series has a gap: no price for " +
                                  std::to_string(expected));
    }

    // Macro reference integrity and positivity (per-flow coverage was
    // checked above).
    for (const auto& [key, entry] : macro_.entries()) {
        const auto& [iso3, year] = key;
        require_country(iso3, "macro (" + iso3 + ", " + std::to_string(year) + ")");
        if (!(entry.gdp_usd > 0.0) || !(entry.population > 0.0) ||
            !std::isfinite(entry.gdp_usd) || !std::isfinite(entry.population))
            throw ValidationError("E_VALUE",
                                  "macro (" + iso3 + ", " + std::to_string(year) +
                                      "): gdp_usd and population must be > 0");
    }

    // Active-measure distance matrix: symmetric, zero diagonal, positive off
    // diagonal. Coincident locations make a zero distance and are rejected
    // (log-distance would be undefined).
    const std::size_t n = countries_.size();
    distance_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = measure_ == DistanceMeasure::capital
                           ? capital_distance(countries_[i], countries_[j])
                           : weighted_city_distance(countries_[i], countries_[j]);
            if (!(d > 0.0))
                throw ValidationError("E_VALUE",
                                      "countries '" + countries_[i].iso3 + "' and '" +
                                          countries_[j].iso3 +
                                          "' have coincident locations (distance 0)");
            distance_[i * n + j] = d;
            distance_[j * n + i] = d;
        }
    }
}

int PanelDataset::country_index(const std::string& iso3) const {
    auto it = index_.find(iso3);
    return it == index_.end() ? -1 : it->second;
}

const CountryRecord& PanelDataset::country(const std::string& iso3) const {
    int idx = country_index(iso3);
    if (idx < 0) throw DomainError("unknown country '" + iso3 + "'");
    return countries_[static_cast<std::size_t>(idx)];
}

double PanelDataset::distance_km(int i, int j) const {
    const auto n = static_cast<int>(countries_.size());
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw DomainError("country index out of range");
    return distance_[static_cast<std::size_t>(i) * countries_.size() +
                     static_cast<std::size_t>(j)];
}

double PanelDataset::distance_km(const std::string& a, const std::string& b) const {
    return distance_km(country_index(a), country_index(b));
}

std::size_t PanelDataset::pair_count() const {
    return countries_.size() * (countries_.size() - 1) / 2;
}

bool PanelDataset::covers_year(int year) const {
    return std::binary_search(years_.begin(), years_.end(), year);
}

const FlowRecord* PanelDataset::find_flow(int year, const std::string& a,
                                          const std::string& b, Sector sector) const {
    int i = country_index(a);
    int j = country_index(b);
    if (i < 0 || j < 0) return nullptr;
    if (j < i) std::swap(i, j);
    auto it = flow_index_.find(std::make_tuple(year, sector, i, j));
    return it == flow_index_.end() ? nullptr : &flows_[it->second];
}

// ---------------------------------------------------------------------------
// Pair observations

std::vector<PairObservation> pair_observations(const PanelDataset& panel,
                                               int year, Sector sector) {
    if (!panel.covers_year(year))
        throw DomainError("year " + std::to_string(year) +
                          " outside panel coverage");

    std::vector<PairObservation> out;
    const auto& countries = panel.countries();
    for (std::size_t i = 0; i < countries.size(); ++i) {
        for (std::size_t j = i + 1; j < countries.size(); ++j) {
            const CountryRecord& a = countries[i];
            const CountryRecord& b = countries[j];
            const FlowRecord* flow = panel.find_flow(year, a.iso3, b.iso3, sector);
            if (!flow) continue; // missing is missing, never imputed as zero

            const MacroEntry* ma = panel.macro().find(a.iso3, year);
            const MacroEntry* mb = panel.macro().find(b.iso3, year);
            if (!ma || !mb)
                throw ValidationError("E_REF", "no macro entry for (" +
                                                   (ma ? b.iso3 : a.iso3) + ", " +
                                                   std::to_string(year) + ")");

            PairObservation obs;
            obs.year = year;
            obs.i = a.iso3;
            obs.j = b.iso3;
            obs.sector = sector;
            obs.trade_value = flow->value_usd;
            obs.gdp_i = ma->gdp_usd;
            obs.gdp_j = mb->gdp_usd;
            obs.pop_i = ma->population;
            obs.pop_j = mb->population;
            obs.distance_km = panel.distance_km(static_cast<int>(i), static_cast<int>(j));
            obs.adjacent = panel.adjacency().adjacent(a.iso3, b.iso3) ? 1 : 0;
            bool common_language = std::any_of(
                a.languages.begin(), a.languages.end(),
                [&](const std::string& lang) { return b.languages.count(lang) != 0; });
            obs.same_language = common_language ? 1 : 0;
            for (const std::string& bloc : panel.memberships().blocs())
                if (panel.memberships().share_bloc(bloc, a.iso3, b.iso3, year))
                    obs.shared_blocs.insert(bloc);
            obs.shared_free_trade = obs.shared_blocs.empty() ? 0 : 1;
            out.push_back(std::move(obs));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// CSV loading

PanelPaths PanelPaths::in_directory(const std::filesystem::path& dir) {
    PanelPaths p;
    p.countries = dir / "countries.csv";
    p.flows = dir / "flows.csv";
    p.macro = dir / "macro.csv";
    p.memberships = dir / "memberships.csv";
    p.adjacency = dir / "adjacency.csv";
    p.oil = dir / "oil.csv";
    if (std::filesystem::exists(dir / "cities.csv")) p.cities = dir / "cities.csv";
    return p;
}

namespace {

std::set<std::string> split_languages(const std::string& field) {
    std::set<std::string> out;
    std::string token;
    std::istringstream in(field);
    while (std::getline(in, token, ';'))
        if (!token.empty()) out.insert(token);
    return out;
}

std::vector<CountryRecord> load_countries(const std::filesystem::path& path) {
    csv::Table t = csv::read_file(path);
    int c_iso = t.require_column("iso3");
    int c_name = t.require_column("name");
    int c_lat = t.require_column("capital_lat");
    int c_lon = t.require_column("capital_lon");
    int c_lang = t.require_column("languages");

    std::vector<CountryRecord> out;
    std::set<std::string> seen;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        CountryRecord c;
        c.iso3 = t.cell(r, c_iso);
        if (!seen.insert(c.iso3).second)
            throw ParseError(t.path, t.line(r),
                             "duplicate country code '" + c.iso3 + "'");
        c.name = t.cell(r, c_name);
        c.capital_lat = csv::to_double(t, r, c_lat);
        c.capital_lon = csv::to_double(t, r, c_lon);
        c.languages = split_languages(t.cell(r, c_lang));
        out.push_back(std::move(c));
    }
    return out;
}

void load_cities(const std::filesystem::path& path,
                 std::vector<CountryRecord>& countries) {
    csv::Table t = csv::read_file(path);
    int c_iso = t.require_column("iso3");
    int c_city = t.require_column("city");
    int c_lat = t.require_column("lat");
    int c_lon = t.require_column("lon");
    int c_share = t.require_column("gdp_share");

    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& iso3 = t.cell(r, c_iso);
        auto it = std::find_if(countries.begin(), countries.end(),
                               [&](const CountryRecord& c) { return c.iso3 == iso3; });
        if (it == countries.end())
            throw ValidationError("E_REF", t.path + ":" + std::to_string(t.line(r)) +
                                               ": unknown country '" + iso3 + "'");
        CityEntry city;
        city.name = t.cell(r, c_city);
        city.lat_deg = csv::to_double(t, r, c_lat);
        city.lon_deg = csv::to_double(t, r, c_lon);
        city.gdp_share = csv::to_double(t, r, c_share);
        it->cities.push_back(std::move(city));
    }
}

std::vector<FlowRecord> load_flows(const std::filesystem::path& path) {
    csv::Table t = csv::read_file(path);
    int c_year = t.require_column("year");
    int c_rep = t.require_column("reporter");
    int c_par = t.require_column("partner");
    int c_sec = t.require_column("sector");
    int c_val = t.require_column("value_usd");

    std::vector<FlowRecord> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        FlowRecord f;
        f.year = static_cast<int>(csv::to_int(t, r, c_year));
        f.reporter = t.cell(r, c_rep);
        f.partner = t.cell(r, c_par);
        try {
            f.sector = parse_sector(t.cell(r, c_sec));
        } catch (const DomainError& e) {
            throw ParseError(t.path, t.line(r), e.what());
        }
        f.value_usd = csv::to_double(t, r, c_val);
        out.push_back(std::move(f));
    }
    return out;
}

MacroSeries load_macro(const std::filesystem::path& path) {
    csv::Table t = csv::read_file(path);
    int c_year = t.require_column("year");
    int c_iso = t.require_column("iso3");
    int c_gdp = t.require_column("gdp_usd");
    int c_pop = t.require_column("population");

    MacroSeries out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        int year = static_cast<int>(csv::to_int(t, r, c_year));
        MacroEntry e{csv::to_double(t, r, c_gdp), csv::to_double(t, r, c_pop)};
        if (!out.set(t.cell(r, c_iso), year, e))
            throw ParseError(t.path, t.line(r),
                             "duplicate macro entry for (" + t.cell(r, c_iso) + ", " +
                                 std::to_string(year) + ")");
    }
    return out;
}

MembershipTable load_memberships(const std::filesystem::path& path) {
    csv::Table t = csv::read_file(path);
    int c_bloc = t.require_column("bloc");
    int c_iso = t.require_column("iso3");
    int c_start = t.require_column("year_start");
    int c_end = t.require_column("year_end");

    MembershipTable out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        MembershipRow row;
        row.bloc = t.cell(r, c_bloc);
        row.iso3 = t.cell(r, c_iso);
        row.year_start = static_cast<int>(csv::to_int(t, r, c_start));
        row.year_end = static_cast<int>(csv::to_int(t, r, c_end));
        if (row.year_start > row.year_end)
            throw ParseError(t.path, t.line(r), "year_start > year_end");
        if (!out.add(row))
            throw ParseError(t.path, t.line(r),
                             "overlapping membership coverage for (" + row.bloc +
                                 ", " + row.iso3 + ")");
    }
    return out;
}

AdjacencyTable load_adjacency(const std::filesystem::path& path) {
    csv::Table t = csv::read_file(path);
    int c_a = t.require_column("iso3_a");
    int c_b = t.require_column("iso3_b");

    AdjacencyTable out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& a = t.cell(r, c_a);
        const std::string& b = t.cell(r, c_b);
        if (a == b)
            throw ParseError(t.path, t.line(r), "self-pair '" + a + "'");
        if (!out.add(a, b))
            throw ParseError(t.path, t.line(r),
                             "duplicate adjacency pair (" + a + ", " + b + ")");
    }
    return out;
}

OilSeries load_oil(const std::filesystem::path& path) {
    csv::Table t = csv::read_file(path);
    int c_year = t.require_column("year");
    int c_price = t.require_column("price_usd_per_barrel");

    OilSeries out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        int year = static_cast<int>(csv::to_int(t, r, c_year));
        if (!out.set(year, csv::to_double(t, r, c_price)))
            throw ParseError(t.path, t.line(r),
                             "duplicate oil price for year " + std::to_string(year));
    }
    return out;
}

} // namespace

PanelDataset load_panel(const PanelPaths& paths, DistanceMeasure measure) {
    PanelData data;
    data.countries = load_countries(paths.countries);
    if (!paths.cities.empty()) load_cities(paths.cities, data.countries);
    data.flows = load_flows(paths.flows);
    data.macro = load_macro(paths.macro);
    data.memberships = load_memberships(paths.memberships);
    data.adjacency = load_adjacency(paths.adjacency);
    data.oil = load_oil(paths.oil);
    return PanelDataset(std::move(data), measure);
}

PanelDataset load_panel(const std::filesystem::path& dir, DistanceMeasure measure) {
    return load_panel(PanelPaths::in_directory(dir), measure);
}

// ---------------------------------------------------------------------------
// CSV writing

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("E_IO", "cannot write '" + path.string() + "'");
    return out;
}

} // namespace

void write_panel_csvs(const PanelDataset& panel, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("E_IO", "cannot create directory '" + dir.string() + "'");

    {
        auto out = open_out(dir / "countries.csv");
        out << "iso3,name,capital_lat,capital_lon,languages\n";
        for (const CountryRecord& c : panel.countries()) {
            std::string langs;
            for (const std::string& l : c.languages) {
                if (!langs.empty()) langs += ';';
                langs += l;
            }
            std::vector<std::string> row{c.iso3, c.name, csv::fmt_exact(c.capital_lat),
                                         csv::fmt_exact(c.capital_lon), langs};
            csv::write_row(out, row);
        }
    }
    bool any_cities = std::any_of(panel.countries().begin(), panel.countries().end(),
                                  [](const CountryRecord& c) { return !c.cities.empty(); });
    if (any_cities) {
        auto out = open_out(dir / "cities.csv");
        out << "iso3,city,lat,lon,gdp_share\n";
        for (const CountryRecord& c : panel.countries())
            for (const CityEntry& city : c.cities) {
                std::vector<std::string> row{c.iso3, city.name,
                                             csv::fmt_exact(city.lat_deg),
                                             csv::fmt_exact(city.lon_deg),
                                             csv::fmt_exact(city.gdp_share)};
                csv::write_row(out, row);
            }
    }
    {
        auto out = open_out(dir / "flows.csv");
        out << "year,reporter,partner,sector,value_usd\n";
        for (const FlowRecord& f : panel.flows()) {
            std::vector<std::string> row{std::to_string(f.year), f.reporter, f.partner,
                                         to_string(f.sector), csv::fmt_exact(f.value_usd)};
            csv::write_row(out, row);
        }
    }
    {
        auto out = open_out(dir / "macro.csv");
        out << "year,iso3,gdp_usd,population\n";
        for (const auto& [key, m] : panel.macro().entries()) {
            std::vector<std::string> row{std::to_string(key.second), key.first,
                                         csv::fmt_exact(m.gdp_usd),
                                         csv::fmt_exact(m.population)};
            csv::write_row(out, row);
        }
    }
    {
        auto out = open_out(dir / "memberships.csv");
        out << "bloc,iso3,year_start,year_end\n";
        for (const MembershipRow& r : panel.memberships().rows()) {
            std::vector<std::string> row{r.bloc, r.iso3, std::to_string(r.year_start),
                                         std::to_string(r.year_end)};
            csv::write_row(out, row);
        }
    }
    {
        auto out = open_out(dir / "adjacency.csv");
        out << "iso3_a,iso3_b\n";
        for (const auto& [a, b] : panel.adjacency().pairs()) {
            std::vector<std::string> row{a, b};
            csv::write_row(out, row);
        }
    }
    {
        auto out = open_out(dir / "oil.csv");
        out << "year,price_usd_per_barrel\n";
        for (const auto& [year, price] : panel.oil().entries()) {
            std::vector<std::string> row{std::to_string(year), csv::fmt_exact(price)};
            csv::write_row(out, row);
        }
    }
}

} // namespace gravity
