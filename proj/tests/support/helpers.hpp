#pragma once

// Shared test scaffolding: temp directories, canned fixture locations, and
// small in-memory panels that exercise one invariant at a time.

#include "gravity/errors.hpp"
#include "gravity/panel.hpp"
#include "gravity/records.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#ifndef GRAVITY_FIXTURE_DIR
#error "GRAVITY_FIXTURE_DIR must be defined by the build"
#endif
#ifndef GRAVITY_DEMO_DIR
#error "GRAVITY_DEMO_DIR must be defined by the build"
#endif

namespace testing {

inline std::filesystem::path fixture_dir() { return GRAVITY_FIXTURE_DIR; }
inline std::filesystem::path demo_dir() { return GRAVITY_DEMO_DIR; }

// Runs `fn` and reports the gravity::Error it threw (if any), so tests can
// assert on the code and message separately.
struct Caught {
    bool thrown = false;
    std::string code;
    std::string message;
};

template <typename Fn>
Caught catching(Fn&& fn) {
    Caught c;
    try {
        fn();
    } catch (const gravity::Error& e) {
        c.thrown = true;
        c.code = e.code();
        c.message = e.what();
    }
    return c;
}

inline bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// Self-deleting scratch directory.
class TempDir {
public:
    TempDir() {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("gravity_test_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

    void write(const std::string& name, const std::string& content) const {
        std::ofstream os(path_ / name);
        os << content;
    }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// The bundled 10-country demo panel, loaded once per process.
inline const gravity::PanelDataset& demo_panel() {
    static const gravity::PanelDataset panel =
        gravity::load_panel(demo_dir(), gravity::DistanceMeasure::capital);
    return panel;
}

// ---------------------------------------------------------------------------
// Minimal in-memory panel: four countries on distinct coordinates, total
// flows for the requested years, constant macro. Tests mutate the returned
// PanelData before handing it to PanelDataset to probe one rule at a time.

inline gravity::PanelData small_panel_data(std::vector<int> years = {2000}) {
    using namespace gravity;
    PanelData data;
    data.countries = {
        {"AAA", "Alpha", 10.0, 20.0, {}, {"en"}},
        {"BBB", "Bravo", -30.0, 40.0, {}, {"en", "fr"}},
        {"CCC", "Charlie", 50.0, -60.0, {}, {"de"}},
        {"DDD", "Delta", -15.0, 170.0, {}, {"fr"}},
    };
    data.adjacency.add("AAA", "BBB");
    data.memberships.add({"ZONE", "AAA", years.front(), years.back()});
    data.memberships.add({"ZONE", "CCC", years.front(), years.back()});
    double value = 100.0;
    for (int year : years) {
        for (std::size_t a = 0; a < data.countries.size(); ++a) {
            const std::string& ia = data.countries[a].iso3;
            data.macro.set(ia, year, {1.0e11 * (double)(a + 1), 1.0e6 * (double)(a + 2)});
            for (std::size_t b = a + 1; b < data.countries.size(); ++b) {
                data.flows.push_back({year, ia, data.countries[b].iso3,
                                      Sector::total, value});
                value += 37.5;
            }
        }
        data.oil.set(year, 20.0 + (year - years.front()));
    }
    return data;
}

inline gravity::PanelDataset small_panel(std::vector<int> years = {2000}) {
    return gravity::PanelDataset(small_panel_data(std::move(years)),
                                 gravity::DistanceMeasure::capital);
}

// A larger deterministic panel (n*(n-1)/2 pairs per year) for tests that need
// more observations than regression columns. Values come from a fixed integer
// formula, not an RNG, so expectations stay readable.
inline gravity::PanelData grid_panel_data(int countries, std::vector<int> years) {
    using namespace gravity;
    const char* langs[3] = {"en", "fr", "de"};
    PanelData data;
    for (int i = 0; i < countries; ++i) {
        CountryRecord c;
        c.iso3 = std::string{char('A' + i), char('A' + i), char('A' + i)};
        c.name = "Country " + std::to_string(i);
        c.capital_lat = -45.0 + 15.0 * i;
        c.capital_lon = -150.0 + 40.0 * i;
        c.languages = {langs[i % 3]};
        data.countries.push_back(std::move(c));
    }
    for (int i = 0; i + 1 < countries; i += 2)
        data.adjacency.add(data.countries[(std::size_t)i].iso3,
                           data.countries[(std::size_t)i + 1].iso3);
    for (int i = 0; i < countries; i += 3)
        data.memberships.add({"ZONE", data.countries[(std::size_t)i].iso3,
                              years.front(), years.back()});
    for (int year : years) {
        const int t = year - years.front();
        for (int a = 0; a < countries; ++a) {
            data.macro.set(data.countries[(std::size_t)a].iso3, year,
                           {1.0e11 * (a + 1) * std::pow(1.03, t),
                            1.0e6 * (a + 2)});
            for (int b = a + 1; b < countries; ++b)
                data.flows.push_back(
                    {year, data.countries[(std::size_t)a].iso3,
                     data.countries[(std::size_t)b].iso3, Sector::total,
                     1.0e8 * (1 + (a * 7 + b * 13 + year * 3) % 17)});
        }
        data.oil.set(year, 20.0 + t);
    }
    return data;
}

// Writes a complete CSV panel directory. `overrides` replaces whole files by
// name; a missing key keeps the default content. An empty-string value
// removes the file entirely.
inline void write_panel_dir(const TempDir& dir,
                            const std::map<std::string, std::string>& overrides = {}) {
    std::map<std::string, std::string> files = {
        {"countries.csv",
         "iso3,name,capital_lat,capital_lon,languages\n"
         "AAA,Alpha,10,20,en\n"
         "BBB,Bravo,-30,40,en;fr\n"
         "CCC,Charlie,50,-60,de\n"},
        {"flows.csv",
         "year,reporter,partner,sector,value_usd\n"
         "2000,AAA,BBB,total,100\n"
         "2000,AAA,CCC,total,250\n"
         "2000,BBB,CCC,total,75\n"},
        {"macro.csv",
         "year,iso3,gdp_usd,population\n"
         "2000,AAA,1e11,5e6\n"
         "2000,BBB,2e11,7e6\n"
         "2000,CCC,3e11,9e6\n"},
        {"memberships.csv", "bloc,iso3,year_start,year_end\n"
                            "ZONE,AAA,1999,2005\n"
                            "ZONE,BBB,1999,2005\n"},
        {"adjacency.csv", "iso3_a,iso3_b\nAAA,BBB\n"},
        {"oil.csv", "year,price_usd_per_barrel\n2000,25.5\n"},
    };
    for (const auto& [name, content] : overrides) files[name] = content;
    for (const auto& [name, content] : files)
        if (!content.empty()) dir.write(name, content);
}

} // namespace testing
