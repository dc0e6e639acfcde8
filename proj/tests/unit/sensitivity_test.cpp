#include "gravity/errors.hpp"
#include "gravity/sensitivity.hpp"

#include "support/helpers.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace gravity;
using testing::Caught;
using testing::catching;
using testing::contains;

namespace {

CoefficientSeries series_from(const std::vector<std::pair<int, double>>& points) {
    CoefficientSeries s;
    for (const auto& [year, coef] : points) {
        SeriesEntry e;
        e.year = year;
        e.ok = true;
        e.distance_coef = coef;
        s.entries.push_back(e);
    }
    return s;
}

OilSeries oil_ramp(int first, int last, double start, double step) {
    OilSeries oil;
    for (int y = first; y <= last; ++y) oil.set(y, start + step * (y - first));
    return oil;
}

} // namespace

TEST_SUITE("sensitivity") {

TEST_CASE("window lists parse or fail loudly") {
    const auto ws = parse_windows("1993:1995,1995:1998,1998:2006");
    REQUIRE(ws.size() == 3);
    CHECK(ws[0].start_year == 1993);
    CHECK(ws[0].end_year == 1995);
    CHECK(ws[2].end_year == 2006);

    for (const char* bad : {"", "1995", "1998:1995", "1995:1995", "a:b", "1993:1995,,"}) {
        const Caught c = catching([&] { parse_windows(bad); });
        CHECK(c.code == "E_DOMAIN");
    }
}

TEST_CASE("pearson matches the brute-force oracle and reports degeneracy") {
    const std::vector<double> xs = {1.0, 2.5, 3.1, 4.7, 5.2, 6.9};
    const std::vector<double> ys = {2.3, 1.9, 3.8, 4.1, 5.5, 5.0};
    const auto r = pearson(xs, ys);
    REQUIRE(r.has_value());
    CHECK(*r == doctest::Approx(oracle::pearson_brute(xs, ys)).epsilon(1e-13));
    CHECK(*r == doctest::Approx(0.862076691012289).epsilon(1e-12)); // frozen

    // Perfect correlation clamps into [-1, 1] instead of drifting past it.
    const std::vector<double> twice = {2.0, 5.0, 6.2, 9.4, 10.4, 13.8};
    CHECK(*pearson(xs, twice) == 1.0);

    const std::vector<double> flat = {3.0, 3.0, 3.0, 3.0, 3.0, 3.0};
    CHECK_FALSE(pearson(xs, flat).has_value());
    CHECK_FALSE(pearson(flat, ys).has_value());

    Caught c = catching([&] { pearson(std::vector<double>{1.0}, std::vector<double>{2.0}); });
    CHECK(c.code == "E_DOMAIN");
    c = catching([&] { pearson(xs, std::vector<double>{1.0, 2.0}); });
    CHECK(c.code == "E_DOMAIN");
}

TEST_CASE("window deltas are endpoint differences") {
    const CoefficientSeries s = series_from(
        {{1993, -0.40}, {1994, -0.55}, {1995, -0.30}, {1996, -0.45}, {1997, -0.50}});
    const OilSeries oil = oil_ramp(1993, 1997, 20.0, 2.5);
    const auto ws = parse_windows("1993:1995,1995:1997");
    const SensitivityReport rep = window_sensitivity(s, oil, ws);

    REQUIRE(rep.windows.size() == 2);
    const WindowResult& w0 = rep.windows[0];
    CHECK(w0.valid);
    CHECK(w0.year_count == 3);
    CHECK(w0.delta_coef == doctest::Approx(0.10).epsilon(1e-12));
    CHECK(w0.delta_oil == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(w0.ratio_defined);
    CHECK(w0.ratio == doctest::Approx(0.02).epsilon(1e-12));
    REQUIRE(w0.pearson_r.has_value());
    const std::vector<double> oil_vals = {20.0, 22.5, 25.0};
    const std::vector<double> coef_vals = {-0.40, -0.55, -0.30};
    CHECK(*w0.pearson_r ==
          doctest::Approx(oracle::pearson_brute(oil_vals, coef_vals)).epsilon(1e-12));
}

TEST_CASE("constant oil inside a window leaves the ratio and r undefined") {
    const CoefficientSeries s =
        series_from({{2000, -0.4}, {2001, -0.5}, {2002, -0.6}});
    OilSeries oil;
    for (int y = 2000; y <= 2002; ++y) oil.set(y, 30.0);
    const SensitivityReport rep =
        window_sensitivity(s, oil, parse_windows("2000:2002"));
    const WindowResult& w = rep.windows[0];
    CHECK(w.valid);
    CHECK(w.delta_oil == 0.0);
    CHECK_FALSE(w.ratio_defined);
    CHECK_FALSE(w.pearson_r.has_value());
    CHECK(!w.pearson_note.empty());
}

TEST_CASE("failed series years invalidate their window but not the report") {
    CoefficientSeries s = series_from({{2000, -0.4}, {2002, -0.6}, {2003, -0.7}});
    SeriesEntry bad;
    bad.year = 2001;
    bad.failure = "E_RANK: column 'adj' has zero variance in this sample";
    s.entries.insert(s.entries.begin() + 1, bad);
    const OilSeries oil = oil_ramp(2000, 2003, 25.0, 1.0);

    const SensitivityReport rep =
        window_sensitivity(s, oil, parse_windows("2000:2001,2002:2003"));
    REQUIRE(rep.windows.size() == 2);
    CHECK_FALSE(rep.windows[0].valid);
    CHECK(contains(rep.windows[0].invalid_reason, "2001"));
    CHECK(rep.windows[1].valid);
}

TEST_CASE("windows outside coverage are hard errors") {
    const CoefficientSeries s = series_from({{2000, -0.4}, {2001, -0.5}});
    const OilSeries oil = oil_ramp(2000, 2001, 25.0, 1.0);
    Caught c = catching(
        [&] { window_sensitivity(s, oil, parse_windows("1999:2001")); });
    CHECK(c.code == "E_DOMAIN");

    // Oil coverage matters independently of series coverage.
    const CoefficientSeries s2 = series_from({{2000, -0.4}, {2001, -0.5}, {2002, -0.6}});
    const OilSeries short_oil = oil_ramp(2000, 2001, 25.0, 1.0);
    c = catching([&] { window_sensitivity(s2, short_oil, parse_windows("2000:2002")); });
    CHECK(c.code == "E_DOMAIN");
    CHECK(contains(c.message, "oil"));
    CHECK(contains(c.message, "2002"));
}

TEST_CASE("demo panel reproduces the quoted oil price deltas") {
    ModelSpec spec = ModelSpec::defaults_for(EstimatorKind::ols);
    const CrossSectionRun run =
        run_cross_sections(testing::demo_panel(), spec, {1991, 2006});
    const SensitivityReport rep =
        window_sensitivity(run.series, testing::demo_panel().oil(),
                           parse_windows("1993:1995,1995:1998,1998:2006"));
    REQUIRE(rep.windows.size() == 3);
    CHECK(rep.windows[0].delta_oil == doctest::Approx(1.18).epsilon(1e-12));
    CHECK(rep.windows[1].delta_oil == doctest::Approx(-8.51).epsilon(1e-12));
    CHECK(rep.windows[2].delta_oil == doctest::Approx(48.45).epsilon(1e-12));
    for (const WindowResult& w : rep.windows) {
        CHECK(w.valid);
        CHECK(w.ratio_defined);
    }
}

TEST_CASE("csv and text renderings carry every window") {
    const CoefficientSeries s = series_from(
        {{1993, -0.40}, {1994, -0.55}, {1995, -0.30}, {1996, -0.45}, {1997, -0.50}});
    const OilSeries oil = oil_ramp(1993, 1997, 20.0, 2.5);
    const SensitivityReport rep =
        window_sensitivity(s, oil, parse_windows("1993:1995,1995:1997"));

    std::ostringstream os;
    write_sensitivity_csv(rep, os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line ==
          "start_year,end_year,valid,years,delta_coef,delta_oil,ratio_per_usd,"
          "pearson_r,note");
    std::getline(is, line);
    CHECK(contains(line, "1993,1995,true,3,"));

    const std::string text = render_sensitivity_report(rep);
    CHECK(contains(text, "window 1993-1995"));
    CHECK(contains(text, "window 1995-1997"));
    CHECK(contains(text, "USD/barrel"));
}

} // TEST_SUITE
