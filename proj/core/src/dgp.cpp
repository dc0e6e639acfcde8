#include "gravity/dgp.hpp"

#include "gravity/csv.hpp"
#include "gravity/errors.hpp"
#include "gravity/geodesy.hpp"
#include "gravity/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

namespace gravity {

// ---------------------------------------------------------------------------
// Config

double DGPConfig::cost_level_at(int year) const {
    auto it = cost_level.find(year);
    return it == cost_level.end() ? 1.0 : it->second;
}

double DGPConfig::cost_elasticity_at(int year) const {
    auto it = cost_elasticity.find(year);
    return it == cost_elasticity.end() ? 1.0 : it->second;
}

void DGPConfig::validate() const {
    if (countries < 2 || countries > 1296)
        throw DomainError("countries must lie in [2, 1296], got " +
                          std::to_string(countries));
    if (first_year > last_year)
        throw DomainError("year window runs backwards: " + std::to_string(first_year) +
                          ":" + std::to_string(last_year));
    if (beta.distance < 0.0)
        throw DomainError("beta_distance is an elasticity magnitude; it must be >= 0");
    if (sigma < 0.0) throw DomainError("sigma must be >= 0");
    if (zero_share < 0.0 || zero_share >= 1.0)
        throw DomainError("zero_share must lie in [0, 1)");
    for (const auto& [year, level] : cost_level) {
        if (!(level > 0.0))
            throw DomainError("cost_level." + std::to_string(year) + " must be > 0");
        if (year < first_year || year > last_year)
            throw DomainError("cost_level." + std::to_string(year) +
                              " is outside the year window");
    }
    for (const auto& [year, rho] : cost_elasticity) {
        if (!(rho > 0.0))
            throw DomainError("cost_elasticity." + std::to_string(year) +
                              " must be > 0");
        if (year < first_year || year > last_year)
            throw DomainError("cost_elasticity." + std::to_string(year) +
                              " is outside the year window");
    }
}

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return {};
    auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

double parse_double_field(const std::string& file, long line, const std::string& v) {
    try {
        std::size_t used = 0;
        double out = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(out))
            throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ParseError(file, line, "not a finite number: '" + v + "'");
    }
}

long long parse_int_field(const std::string& file, long line, const std::string& v) {
    try {
        std::size_t used = 0;
        long long out = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw ParseError(file, line, "not an integer: '" + v + "'");
    }
}

} // namespace

DGPConfig read_dgp_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("E_IO", "cannot open '" + path.string() + "'");

    DGPConfig config;
    const std::string file = path.string();
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(file, line_no, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError(file, line_no, "expected key = value");

        if (key == "countries") {
            config.countries = static_cast<int>(parse_int_field(file, line_no, value));
        } else if (key == "years") {
            try {
                YearRange r = parse_year_range(value);
                config.first_year = r.first;
                config.last_year = r.last;
            } catch (const Error& e) {
                throw ParseError(file, line_no, e.what());
            }
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(
                parse_int_field(file, line_no, value));
        } else if (key == "beta0") {
            config.beta.intercept = parse_double_field(file, line_no, value);
        } else if (key == "beta_gdp_i") {
            config.beta.gdp_i = parse_double_field(file, line_no, value);
        } else if (key == "beta_gdp_j") {
            config.beta.gdp_j = parse_double_field(file, line_no, value);
        } else if (key == "beta_distance") {
            config.beta.distance = parse_double_field(file, line_no, value);
        } else if (key == "sigma") {
            config.sigma = parse_double_field(file, line_no, value);
        } else if (key == "zero_share") {
            config.zero_share = parse_double_field(file, line_no, value);
        } else if (key.rfind("cost_level.", 0) == 0) {
            int year = static_cast<int>(
                parse_int_field(file, line_no, key.substr(std::string("cost_level.").size())));
            config.cost_level[year] = parse_double_field(file, line_no, value);
        } else if (key.rfind("cost_elasticity.", 0) == 0) {
            int year = static_cast<int>(parse_int_field(
                file, line_no, key.substr(std::string("cost_elasticity.").size())));
            config.cost_elasticity[year] = parse_double_field(file, line_no, value);
        } else {
            throw ParseError(file, line_no, "unknown key '" + key + "'");
        }
    }
    try {
        config.validate();
    } catch (const Error& e) {
        throw ParseError(file, 0, e.what());
    }
    return config;
}

// ---------------------------------------------------------------------------
// Simulation

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

std::string synthetic_code(int index) {
    static const char digits[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
    std::string code = "C??";
    code[1] = digits[(index / 36) % 36];
    code[2] = digits[index % 36];
    return code;
}

double wrap_longitude(double lon) {
    lon = std::fmod(lon, 360.0);
    if (lon > 180.0) lon -= 360.0;
    if (lon <= -180.0) lon += 360.0;
    return lon;
}

} // namespace

PanelDataset simulate_panel(const DGPConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);

    const int n = config.countries;
    PanelData data;

    // Capitals on a Fibonacci sphere: evenly spread latitudes with a
    // golden-angle longitude walk, rotated by a seeded offset. Distinct
    // z-values guarantee non-coincident points for every n >= 2.
    const double golden_angle_deg = 360.0 * (1.0 - 2.0 / (1.0 + std::sqrt(5.0)));
    const double lon_offset =
        std::uniform_real_distribution<double>(0.0, 360.0)(rng);
    const double pi = 3.141592653589793238462643383279502884;
    const int language_count = std::max(2, n / 3);
    for (int i = 0; i < n; ++i) {
        CountryRecord c;
        c.iso3 = synthetic_code(i);
        c.name = "Synthetic " + c.iso3;
        double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        c.capital_lat = std::asin(z) * 180.0 / pi;
        c.capital_lon = wrap_longitude(golden_angle_deg * static_cast<double>(i) +
                                       lon_offset);
        c.languages.insert("L" + std::to_string(i % language_count));
        data.countries.push_back(std::move(c));
    }

    // Country fundamentals, constant across the window: the per-year
    // variation of interest comes from the cost paths, not from size growth.
    std::vector<double> gdp(static_cast<std::size_t>(n));
    std::vector<double> population(static_cast<std::size_t>(n));
    {
        std::normal_distribution<double> log_gdp(25.0, 1.0);
        std::normal_distribution<double> log_pop(17.0, 0.8);
        for (int i = 0; i < n; ++i) {
            gdp[static_cast<std::size_t>(i)] = std::exp(log_gdp(rng));
            population[static_cast<std::size_t>(i)] = std::exp(log_pop(rng));
        }
    }
    for (int i = 0; i < n; ++i)
        for (int year = config.first_year; year <= config.last_year; ++year)
            data.macro.set(data.countries[static_cast<std::size_t>(i)].iso3, year,
                           {gdp[static_cast<std::size_t>(i)],
                            population[static_cast<std::size_t>(i)]});

    // Sparse adjacency and three bloc memberships; the real-world bloc names
    // are reused so the product-form layout runs unchanged on synthetic data.
    {
        std::bernoulli_distribution is_adjacent(0.2);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (is_adjacent(rng))
                    data.adjacency.add(data.countries[static_cast<std::size_t>(i)].iso3,
                                       data.countries[static_cast<std::size_t>(j)].iso3);
        std::bernoulli_distribution joins(0.35);
        for (const char* bloc : {"EA", "EC", "NAFTA"})
            for (int i = 0; i < n; ++i)
                if (joins(rng))
                    data.memberships.add({bloc,
                                          data.countries[static_cast<std::size_t>(i)].iso3,
                                          config.first_year, config.last_year});
    }

    for (int year = config.first_year; year <= config.last_year; ++year)
        data.oil.set(year, 20.0);

    // Flows: year-major, canonical-pair-minor, one noise draw (and one
    // censoring draw when enabled) per flow, in a fixed order off the single
    // engine. Distances come straight from the capitals.
    std::vector<GeoPoint> capitals;
    capitals.reserve(static_cast<std::size_t>(n));
    for (const CountryRecord& c : data.countries)
        capitals.push_back({c.capital_lat, c.capital_lon});

    std::normal_distribution<double> log_eta(-config.sigma * config.sigma / 2.0,
                                             config.sigma > 0.0 ? config.sigma : 1.0);
    std::bernoulli_distribution censored(config.zero_share > 0.0 ? config.zero_share
                                                                 : 0.5);
    for (int year = config.first_year; year <= config.last_year; ++year) {
        const double rho = config.cost_elasticity_at(year);
        const double level = config.cost_level_at(year);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double d = haversine_km(capitals[static_cast<std::size_t>(i)],
                                              capitals[static_cast<std::size_t>(j)]);
                double log_mean = config.beta.intercept +
                                  config.beta.gdp_i * std::log(gdp[static_cast<std::size_t>(i)]) +
                                  config.beta.gdp_j * std::log(gdp[static_cast<std::size_t>(j)]) -
                                  rho * config.beta.distance * std::log(d) -
                                  std::log(level);
                double value = std::exp(log_mean +
                                        (config.sigma > 0.0 ? log_eta(rng) : 0.0));
                if (config.zero_share > 0.0 && censored(rng)) value = 0.0;
                FlowRecord f;
                f.year = year;
                f.reporter = data.countries[static_cast<std::size_t>(i)].iso3;
                f.partner = data.countries[static_cast<std::size_t>(j)].iso3;
                f.sector = Sector::total;
                f.value_usd = value;
                data.flows.push_back(std::move(f));
            }
        }
    }

    return PanelDataset(std::move(data), DistanceMeasure::capital);
}

// ---------------------------------------------------------------------------
// Planted truth

std::vector<double> planted_truth(const DGPConfig& config, const ModelSpec& spec,
                                  std::span<const std::string> labels, int year) {
    const double intercept_shift = -std::log(config.cost_level_at(year));
    // Under response=log the regression error is ln eta with mean -sigma^2/2,
    // which the intercept absorbs; the multiplicative form keeps E[eta] = 1.
    const double log_error_mean = spec.response == ResponseTransform::log
                                      ? -config.sigma * config.sigma / 2.0
                                      : 0.0;

    std::vector<double> truth;
    truth.reserve(labels.size());
    for (const std::string& label : labels) {
        if (label == "_cons") {
            truth.push_back(config.beta.intercept + intercept_shift + log_error_mean);
        } else if (label == "log_gdpa") {
            truth.push_back(config.beta.gdp_i);
        } else if (label == "log_gdpb") {
            truth.push_back(config.beta.gdp_j);
        } else if (label == "log_gnp_product") {
            if (config.beta.gdp_i != config.beta.gdp_j)
                throw DomainError(
                    "the product-form layout has one size coefficient; the planted "
                    "truth is only defined when beta_gdp_i equals beta_gdp_j");
            truth.push_back(config.beta.gdp_i);
        } else if (label == "log_dis") {
            truth.push_back(-config.cost_elasticity_at(year) * config.beta.distance);
        } else {
            // Dummies, populations, and the per-capita product do not enter
            // the generating model.
            truth.push_back(0.0);
        }
    }
    return truth;
}

// ---------------------------------------------------------------------------
// Recovery experiment

namespace {

struct RepResult {
    bool ok = false;
    std::string failure;
    Eigen::VectorXd coef;
    Eigen::VectorXd ci_low;
    Eigen::VectorXd ci_high;
};

RepResult run_replication(const DGPConfig& config, const ModelSpec& spec,
                          std::uint64_t sub_seed,
                          const std::vector<std::string>& expected_labels) {
    RepResult res;
    try {
        DGPConfig rep_config = config;
        rep_config.seed = sub_seed;
        PanelDataset panel = simulate_panel(rep_config);
        auto obs = pair_observations(panel, config.first_year, spec.sector);
        DesignMatrix d = build_design(obs, spec);
        if (d.column_labels != expected_labels)
            throw DomainError("design labels changed across replications");
        FitResult fit = spec.estimator == EstimatorKind::ppml ? ppml_fit(d)
                                                              : ols_fit(d);
        InferenceTable table = inference(fit, 0.95);
        const auto k = static_cast<Eigen::Index>(table.rows.size());
        res.coef.resize(k);
        res.ci_low.resize(k);
        res.ci_high.resize(k);
        for (Eigen::Index c = 0; c < k; ++c) {
            res.coef(c) = table.rows[static_cast<std::size_t>(c)].coef;
            res.ci_low(c) = table.rows[static_cast<std::size_t>(c)].ci_low;
            res.ci_high(c) = table.rows[static_cast<std::size_t>(c)].ci_high;
        }
        res.ok = true;
    } catch (const Error& e) {
        res.failure = e.code() + ": " + e.what();
    }
    return res;
}

} // namespace

RecoveryReport recovery_experiment(const DGPConfig& config, const ModelSpec& spec,
                                   int replications, int workers) {
    config.validate();
    spec.validate();
    if (replications < 1)
        throw DomainError("replications must be >= 1");
    if (spec.sector != Sector::total)
        throw DomainError("synthetic panels carry the total sector only");

    // Labels (and their planted truths) from a probe design; replications
    // must reproduce them exactly.
    std::vector<std::string> labels;
    {
        DGPConfig probe = config;
        probe.seed = splitmix64(config.seed);
        PanelDataset panel = simulate_panel(probe);
        auto obs = pair_observations(panel, config.first_year, spec.sector);
        labels = build_design(obs, spec).column_labels;
    }
    std::vector<double> truth = planted_truth(config, spec, labels, config.first_year);

    // Position-derived sub-seeds: replication r is a pure function of
    // (seed, r), so any worker count reproduces the sequential results.
    std::vector<RepResult> results(static_cast<std::size_t>(replications));
    auto sub_seed = [&](int rep) {
        return splitmix64(config.seed +
                          0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(rep + 1));
    };
    int thread_count = std::clamp(workers, 1, replications);
    if (thread_count <= 1) {
        for (int r = 0; r < replications; ++r)
            results[static_cast<std::size_t>(r)] =
                run_replication(config, spec, sub_seed(r), labels);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int w = 0; w < thread_count; ++w) {
            pool.emplace_back([&, w]() {
                for (int r = w; r < replications; r += thread_count)
                    results[static_cast<std::size_t>(r)] =
                        run_replication(config, spec, sub_seed(r), labels);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    RecoveryReport report;
    report.replications = replications;
    report.year = config.first_year;
    report.estimator = spec.estimator;

    const auto k = static_cast<Eigen::Index>(labels.size());
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd sq_err = Eigen::VectorXd::Zero(k);
    Eigen::VectorXd covered = Eigen::VectorXd::Zero(k);
    int successes = 0;
    for (const RepResult& res : results) {
        if (!res.ok) {
            ++report.failures;
            if (report.first_failure.empty()) report.first_failure = res.failure;
            continue;
        }
        ++successes;
        for (Eigen::Index c = 0; c < k; ++c) {
            const double err = res.coef(c) - truth[static_cast<std::size_t>(c)];
            sum(c) += res.coef(c);
            sq_err(c) += err * err;
            if (res.ci_low(c) <= truth[static_cast<std::size_t>(c)] &&
                truth[static_cast<std::size_t>(c)] <= res.ci_high(c))
                covered(c) += 1.0;
        }
    }
    if (successes == 0)
        throw DomainError("every replication failed; first failure: " +
                          report.first_failure);

    for (Eigen::Index c = 0; c < k; ++c) {
        CoefficientRecovery rec;
        rec.label = labels[static_cast<std::size_t>(c)];
        rec.truth = truth[static_cast<std::size_t>(c)];
        rec.mean = sum(c) / successes;
        rec.bias = rec.mean - rec.truth;
        rec.rmse = std::sqrt(sq_err(c) / successes);
        rec.coverage = covered(c) / successes;
        report.coefficients.push_back(std::move(rec));
    }
    return report;
}

void write_recovery_csv(const RecoveryReport& report, std::ostream& os) {
    os << "label,truth,mean,bias,rmse,coverage95\n";
    for (const CoefficientRecovery& rec : report.coefficients) {
        std::vector<std::string> row{rec.label,
                                     csv::fmt_sig7(rec.truth),
                                     csv::fmt_sig7(rec.mean),
                                     csv::fmt_sig7(rec.bias),
                                     csv::fmt_sig7(rec.rmse),
                                     csv::fmt_sig7(rec.coverage)};
        csv::write_row(os, row);
    }
}

std::string render_recovery_report(const RecoveryReport& report) {
    std::ostringstream os;
    os << "coefficient recovery at year " << report.year << " ("
       << to_string(report.estimator) << ", " << report.replications
       << " replications, " << report.failures << " failed";
    if (report.failures > 0) os << "; first failure: " << report.first_failure;
    os << ")\n";
    os << "| label | truth | mean | bias | rmse | coverage95 |\n";
    for (const CoefficientRecovery& rec : report.coefficients) {
        os << "| " << rec.label << " | " << csv::fmt_sig7(rec.truth) << " | "
           << csv::fmt_sig7(rec.mean) << " | " << csv::fmt_sig7(rec.bias) << " | "
           << csv::fmt_sig7(rec.rmse) << " | " << csv::fmt_sig7(rec.coverage)
           << " |\n";
    }
    return os.str();
}

} // namespace gravity
