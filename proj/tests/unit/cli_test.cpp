#include "cli.hpp"

#include "support/helpers.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

using testing::contains;
using testing::read_file;
using testing::TempDir;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    RunResult r;
    r.code = gravity::cli::run_command(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string demo() { return testing::demo_dir().string(); }

std::string dgp_config_text() {
    return "countries = 10\n"
           "years = 1994:1996\n"
           "seed = 99\n"
           "beta0 = -8.0\n"
           "beta_gdp_i = 0.85\n"
           "beta_gdp_j = 0.7\n"
           "beta_distance = 0.75\n"
           "sigma = 0.5\n";
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help prints usage on stdout and succeeds") {
    const RunResult r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(contains(r.out, "estimate"));
    CHECK(contains(r.out, "chart-data"));
    CHECK(contains(r.out, "sensitivity"));
}

TEST_CASE("usage mistakes exit 2 with a single-line code") {
    RunResult r = run({});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "E_USAGE"));

    r = run({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "E_USAGE"));

    r = run({"estimate", "--data", demo()}); // missing required --year
    CHECK(r.code == 2);
    CHECK(contains(r.err, "E_USAGE"));

    r = run({"validate", "--data", demo(), "--no-such-flag"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "E_USAGE"));

    // Bad flag *values* are usage errors too, not estimation errors.
    r = run({"estimate", "--data", demo(), "--year", "1995", "--estimator",
             "bogus"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "E_USAGE"));

    r = run({"estimate", "--data", demo(), "--year", "1995", "--level", "1.5"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "E_USAGE"));

    // Contradictory model requests fail before any data is touched.
    r = run({"estimate", "--data", demo(), "--year", "1995", "--estimator",
             "ppml", "--response", "log"});
    CHECK(r.code == 2);
    CHECK(contains(r.err, "E_USAGE"));
}

TEST_CASE("validate summarizes a healthy panel") {
    const RunResult r = run({"validate", "--data", demo()});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(contains(r.out, "dataset ok"));
    CHECK(contains(r.out, "countries: 10 (45 pairs)"));
    CHECK(contains(r.out, "flows: 2880 records, years 1991-2006"));
    CHECK(contains(r.out, "oil: 1991-2006 (16 years)"));
    CHECK(contains(r.out, "distance measure: capital"));

    const RunResult w = run({"validate", "--data", demo(), "--distance-measure",
                             "weighted-city"});
    CHECK(w.code == 0);
    CHECK(contains(w.out, "distance measure: weighted-city"));

    const RunResult bad = run({"validate", "--data", "/nonexistent/panel"});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "E_IO"));
}

TEST_CASE("estimate prints the inference table and mirrors it to --out") {
    const RunResult r = run({"estimate", "--data", demo(), "--year", "1995",
                             "--sector", "manufacturing"});
    CHECK(r.code == 0);
    CHECK(contains(r.out,
                   "-> year = 1995, sector = manufacturing, estimator = ols, "
                   "n = 42, dropped zeros = 3"));
    CHECK(contains(r.out, "| log_dis | -0.6688321 |"));
    CHECK(contains(r.out, "| _cons |"));

    TempDir dir;
    const std::string out_file = dir.file("table.txt").string();
    const RunResult w = run({"estimate", "--data", demo(), "--year", "1995",
                             "--sector", "manufacturing", "--out", out_file});
    CHECK(w.code == 0);
    const std::string file_content = read_file(out_file);
    CHECK(file_content == r.out); // the file carries exactly the table
    CHECK(w.out == file_content + "wrote " + out_file + "\n");
}

TEST_CASE("estimate runs the multiplicative estimator with zeros kept") {
    const RunResult r = run({"estimate", "--data", demo(), "--year", "1995",
                             "--sector", "manufacturing", "--estimator", "ppml"});
    CHECK(r.code == 0);
    CHECK(contains(r.out,
                   "estimator = ppml, n = 45, dropped zeros = 0, iterations = 8"));
    CHECK(contains(r.out, "| log_dis | -0.6992382 |"));
}

TEST_CASE("estimate reports data problems with a nonzero exit") {
    const RunResult r = run({"estimate", "--data", demo(), "--year", "1885"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "E_DOMAIN"));
}

TEST_CASE("series writes one csv per requested sector") {
    TempDir dir;
    const std::string out_dir = dir.file("series").string();
    const RunResult r = run({"series", "--data", demo(), "--sector", "all",
                             "--years", "1994:1996", "--out", out_dir});
    CHECK(r.code == 0);
    for (const std::string sector : {"agriculture", "manufacturing", "services"}) {
        const std::string path = out_dir + "/series_" + sector + "_ols.csv";
        CHECK(contains(r.out, "wrote " + path));
        const std::string content = read_file(path);
        CHECK(contains(content,
                       "year,sector,estimator,coef,se,n,dropped_zeros,status"));
        CHECK(contains(content, "1995," + sector + ",ols,"));
    }

    // A single sector yields a single file named for it.
    const RunResult one = run({"series", "--data", demo(), "--years",
                               "1994:1995", "--out", out_dir});
    CHECK(one.code == 0);
    CHECK(contains(one.out, "series_total_ols.csv"));

    const RunResult bad = run({"series", "--data", demo(), "--years",
                               "1994-1996", "--out", out_dir});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "E_DOMAIN"));
}

TEST_CASE("sensitivity reports windows and writes the csv on request") {
    TempDir dir;
    const std::string out_file = dir.file("sens.csv").string();
    const RunResult r = run({"sensitivity", "--data", demo(), "--years",
                             "1991:2006", "--windows",
                             "1993:1995,1995:1998,1998:2006", "--out", out_file});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "window 1993-1995"));
    CHECK(contains(r.out, "window 1998-2006"));
    CHECK(contains(r.out, "1.18"));
    CHECK(contains(r.out, "-8.51"));
    CHECK(contains(r.out, "48.45"));
    CHECK(contains(r.out, "wrote " + out_file));

    const std::string csv = read_file(out_file);
    CHECK(contains(csv, "start_year,end_year,valid,years,delta_coef,delta_oil,"
                        "ratio_per_usd,pearson_r,note"));
    CHECK(contains(csv, "1993,1995,true,3,"));

    const RunResult bad = run({"sensitivity", "--data", demo(), "--years",
                               "1991:2006", "--windows", "1995:1993"});
    CHECK(bad.code == 2);
    CHECK(contains(bad.err, "E_USAGE"));
}

TEST_CASE("simulate writes a loadable panel directory") {
    TempDir dir;
    dir.write("dgp.conf", dgp_config_text());
    const std::string out_dir = dir.file("panel").string();
    const RunResult r =
        run({"simulate", "--config", dir.file("dgp.conf").string(), "--out",
             out_dir});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "simulated panel: 10 countries, 45 pairs, "
                          "years 1994:1996, 135 flows -> " +
                              out_dir));

    const RunResult check = run({"validate", "--data", out_dir});
    CHECK(check.code == 0);
    CHECK(contains(check.out, "dataset ok"));
    CHECK(contains(check.out, "countries: 10 (45 pairs)"));

    const RunResult bad =
        run({"simulate", "--config", dir.file("missing.conf").string(), "--out",
             out_dir});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "E_IO"));
}

TEST_CASE("recover prints the per-coefficient table and csv") {
    TempDir dir;
    dir.write("dgp.conf", dgp_config_text());
    const std::string out_file = dir.file("recovery.csv").string();
    const RunResult r = run({"recover", "--config", dir.file("dgp.conf").string(),
                             "--population", "omit", "--replications", "6",
                             "--workers", "2", "--out", out_file});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "coefficient recovery at year 1994"));
    CHECK(contains(r.out, "6 replications"));
    CHECK(contains(r.out, "| log_dis |"));
    CHECK(contains(r.out, "wrote " + out_file));

    const std::string csv = read_file(out_file);
    CHECK(contains(csv, "label,truth,mean,bias,rmse,coverage95"));
    CHECK(contains(csv, "log_dis,-0.75,"));

    // Synthetic panels carry aggregate flows only; asking for a sector is a
    // domain error from the experiment, not a usage error.
    const RunResult bad = run({"recover", "--config",
                               dir.file("dgp.conf").string(), "--sector",
                               "services", "--replications", "2"});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "E_DOMAIN"));
}

TEST_CASE("chart data is tidy, round-trippable, and keeps gaps blank") {
    TempDir dir;
    const std::string out_file = dir.file("chart.csv").string();
    const RunResult r = run({"chart-data", "--data", demo(), "--sector",
                             "manufacturing", "--years", "1994:1996", "--out",
                             out_file});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "wrote " + out_file));

    const std::string csv = read_file(out_file);
    CHECK(contains(csv, "year,variable,value\n"));
    CHECK(contains(csv, "1995,oil_price_usd,24.89"));
    REQUIRE(contains(csv, "1995,manufacturing_ols_distance_coef,"));

    // The value column must round-trip to the exact double the run produced.
    const std::string key = "1995,manufacturing_ols_distance_coef,";
    const auto at = csv.find(key);
    const auto end = csv.find('\n', at);
    const std::string value = csv.substr(at + key.size(), end - at - key.size());
    REQUIRE(!value.empty());
    const double parsed = std::strtod(value.c_str(), nullptr);
    CHECK(parsed == doctest::Approx(-0.6688321).epsilon(1e-6));

    // A panel too small to estimate keeps its rows with blank values.
    TempDir tiny;
    testing::write_panel_dir(tiny);
    const std::string tiny_file = tiny.file("chart.csv").string();
    const RunResult t = run({"chart-data", "--data", tiny.path().string(),
                             "--years", "2000:2000", "--out", tiny_file});
    CHECK(t.code == 0);
    const std::string tiny_csv = read_file(tiny_file);
    CHECK(contains(tiny_csv, "2000,total_ols_distance_coef,\n"));
    CHECK(contains(tiny_csv, "2000,oil_price_usd,25.5"));

    const RunResult bad = run({"chart-data", "--data", demo(), "--years",
                               "1994:1996"}); // missing required --out
    CHECK(bad.code == 2);
    CHECK(contains(bad.err, "E_USAGE"));
}

} // TEST_SUITE
