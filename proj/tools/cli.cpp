#include "cli.hpp"

#include "gravity/csv.hpp"
#include "gravity/dgp.hpp"
#include "gravity/errors.hpp"
#include "gravity/estimators.hpp"
#include "gravity/harness.hpp"
#include "gravity/panel.hpp"
#include "gravity/sensitivity.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace gravity::cli {
namespace {

// Model flags shared by the estimation subcommands. Empty response/zeros
// means "derive from the estimator" (ols: log/drop, ppml: level/keep).
struct ModelFlags {
    std::string specification = "disaggregated";
    std::string sector = "total";
    std::string estimator = "ols";
    std::string response;
    std::string zeros;
    std::string population = "level";
};

void add_model_flags(CLI::App* cmd, ModelFlags& flags, bool allow_all_sector) {
    cmd->add_option("--spec", flags.specification,
                    "regression layout: disaggregated or eq1-blocs");
    cmd->add_option("--sector", flags.sector,
                    allow_all_sector
                        ? "sector: total, agriculture, manufacturing, services, or all"
                        : "sector: total, agriculture, manufacturing, or services");
    cmd->add_option("--estimator", flags.estimator, "estimator: ols or ppml");
    cmd->add_option("--response", flags.response,
                    "response transform: log or level (default from estimator)");
    cmd->add_option("--zeros", flags.zeros,
                    "zero-flow policy: drop or keep (default from estimator)");
    cmd->add_option("--population", flags.population,
                    "population columns: level, log, or omit");
}

// Flag values and combinations are usage errors, not data errors.
ModelSpec spec_from_flags(const ModelFlags& flags, bool* all_sectors = nullptr) {
    try {
        ModelSpec spec = ModelSpec::defaults_for(parse_estimator(flags.estimator));
        spec.specification = parse_specification(flags.specification);
        spec.population_mode = parse_population_mode(flags.population);
        if (!flags.response.empty()) spec.response = parse_response(flags.response);
        if (!flags.zeros.empty()) spec.zero_policy = parse_zero_policy(flags.zeros);
        if (all_sectors && flags.sector == "all") {
            *all_sectors = true;
            spec.sector = Sector::total; // overwritten per expanded sector
        } else {
            spec.sector = parse_sector(flags.sector);
        }
        spec.validate();
        return spec;
    } catch (const DomainError& e) {
        throw Error("E_USAGE", e.what());
    }
}

std::vector<Sector> expand_sectors(const ModelSpec& spec, bool all_sectors) {
    if (!all_sectors) return {spec.sector};
    return {trade_sectors.begin(), trade_sectors.end()};
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("E_IO", "cannot write '" + path.string() + "'");
    return out;
}

std::string estimate_heading(int year, Sector sector, const FitResult& fit) {
    std::ostringstream os;
    os << "-> year = " << year << ", sector = " << to_string(sector)
       << ", estimator = " << to_string(fit.estimator) << ", n = " << fit.n
       << ", dropped zeros = " << fit.dropped_zero_count;
    if (fit.estimator == EstimatorKind::ppml)
        os << ", iterations = " << fit.iterations;
    return os.str();
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_validate(const std::string& data_dir, const std::string& measure,
                 std::ostream& out) {
    PanelDataset panel =
        load_panel(std::filesystem::path(data_dir), parse_distance_measure(measure));

    std::set<Sector> sectors;
    for (const FlowRecord& f : panel.flows()) sectors.insert(f.sector);
    std::string sector_names;
    for (Sector s : sectors) {
        if (!sector_names.empty()) sector_names += ", ";
        sector_names += to_string(s);
    }

    out << "dataset ok\n";
    out << "countries: " << panel.country_count() << " (" << panel.pair_count()
        << " pairs)\n";
    out << "flows: " << panel.flows().size() << " records, years "
        << panel.years().front() << "-" << panel.years().back() << ", sectors: "
        << sector_names << "\n";
    out << "macro entries: " << panel.macro().size() << "\n";
    out << "memberships: " << panel.memberships().rows().size() << " rows\n";
    out << "adjacency: " << panel.adjacency().size() << " pairs\n";
    if (!panel.oil().empty())
        out << "oil: " << panel.oil().min_year() << "-" << panel.oil().max_year()
            << " (" << panel.oil().entries().size() << " years)\n";
    out << "distance measure: " << to_string(panel.distance_measure()) << "\n";
    return 0;
}

int cmd_estimate(const std::string& data_dir, const std::string& measure,
                 const ModelFlags& flags, int year, double level,
                 const std::string& out_file, std::ostream& out) {
    ModelSpec spec = spec_from_flags(flags);
    if (!(level > 0.0 && level < 1.0))
        throw Error("E_USAGE", "--level must lie in (0,1)");

    PanelDataset panel =
        load_panel(std::filesystem::path(data_dir), parse_distance_measure(measure));
    auto obs = pair_observations(panel, year, spec.sector);
    DesignMatrix d = build_design(obs, spec);
    FitResult fit =
        spec.estimator == EstimatorKind::ppml ? ppml_fit(d) : ols_fit(d);
    InferenceTable table = inference(fit, level);
    std::string rendered =
        render_inference_table(table, estimate_heading(year, spec.sector, fit));

    out << rendered;
    if (!out_file.empty()) {
        auto file = open_output(out_file);
        file << rendered;
        out << "wrote " << out_file << "\n";
    }
    return 0;
}

int cmd_series(const std::string& data_dir, const std::string& measure,
               const ModelFlags& flags, const std::string& years_text,
               const std::string& out_dir, int workers, std::ostream& out) {
    bool all_sectors = false;
    ModelSpec spec = spec_from_flags(flags, &all_sectors);
    YearRange years = parse_year_range(years_text);

    PanelDataset panel =
        load_panel(std::filesystem::path(data_dir), parse_distance_measure(measure));
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error("E_IO", "cannot create directory '" + out_dir + "'");

    for (Sector sector : expand_sectors(spec, all_sectors)) {
        ModelSpec sector_spec = spec;
        sector_spec.sector = sector;
        CrossSectionRun run = run_cross_sections(panel, sector_spec, years, workers);
        std::filesystem::path path =
            std::filesystem::path(out_dir) /
            ("series_" + to_string(sector) + "_" + to_string(spec.estimator) + ".csv");
        auto file = open_output(path);
        write_series_csv(run.series, file);
        out << "wrote " << path.string() << "\n";
    }
    return 0;
}

int cmd_sensitivity(const std::string& data_dir, const std::string& measure,
                    const ModelFlags& flags, const std::string& years_text,
                    const std::string& windows_text, const std::string& out_file,
                    int workers, std::ostream& out) {
    ModelSpec spec = spec_from_flags(flags);
    YearRange years = parse_year_range(years_text);
    std::vector<Window> windows;
    try {
        windows = parse_windows(windows_text);
    } catch (const DomainError& e) {
        throw Error("E_USAGE", e.what());
    }

    PanelDataset panel =
        load_panel(std::filesystem::path(data_dir), parse_distance_measure(measure));
    CrossSectionRun run = run_cross_sections(panel, spec, years, workers);
    SensitivityReport report =
        window_sensitivity(run.series, panel.oil(), windows);

    out << render_sensitivity_report(report);
    if (!out_file.empty()) {
        auto file = open_output(out_file);
        write_sensitivity_csv(report, file);
        out << "wrote " << out_file << "\n";
    }
    return 0;
}

int cmd_simulate(const std::string& config_file, const std::string& out_dir,
                 std::ostream& out) {
    DGPConfig config = read_dgp_config(config_file);
    PanelDataset panel = simulate_panel(config);
    write_panel_csvs(panel, out_dir);
    out << "simulated panel: " << panel.country_count() << " countries, "
        << panel.pair_count() << " pairs, years " << config.first_year << ":"
        << config.last_year << ", " << panel.flows().size() << " flows -> "
        << out_dir << "\n";
    return 0;
}

int cmd_recover(const std::string& config_file, const ModelFlags& flags,
                int replications, int workers, const std::string& out_file,
                std::ostream& out) {
    ModelSpec spec = spec_from_flags(flags);
    DGPConfig config = read_dgp_config(config_file);
    RecoveryReport report = recovery_experiment(config, spec, replications, workers);

    out << render_recovery_report(report);
    if (!out_file.empty()) {
        auto file = open_output(out_file);
        write_recovery_csv(report, file);
        out << "wrote " << out_file << "\n";
    }
    return 0;
}

int cmd_chart_data(const std::string& data_dir, const std::string& measure,
                   const ModelFlags& flags, const std::string& years_text,
                   const std::string& out_file, int workers, std::ostream& out) {
    bool all_sectors = false;
    ModelSpec spec = spec_from_flags(flags, &all_sectors);
    YearRange years = parse_year_range(years_text);

    PanelDataset panel =
        load_panel(std::filesystem::path(data_dir), parse_distance_measure(measure));

    auto file = open_output(out_file);
    file << "year,variable,value\n";
    for (Sector sector : expand_sectors(spec, all_sectors)) {
        ModelSpec sector_spec = spec;
        sector_spec.sector = sector;
        CrossSectionRun run = run_cross_sections(panel, sector_spec, years, workers);
        std::string variable =
            to_string(sector) + "_" + to_string(spec.estimator) + "_distance_coef";
        for (const SeriesEntry& e : run.series.entries) {
            // Failed years keep their row with a blank value: a gap, not a zero.
            std::vector<std::string> row{std::to_string(e.year), variable,
                                         e.ok ? csv::fmt_exact(e.distance_coef) : ""};
            csv::write_row(file, row);
        }
    }
    for (int year = years.first; year <= years.last; ++year) {
        auto price = panel.oil().price(year);
        std::vector<std::string> row{std::to_string(year), "oil_price_usd",
                                     price ? csv::fmt_exact(*price) : ""};
        csv::write_row(file, row);
    }
    out << "wrote " << out_file << "\n";
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
    CLI::App app{"gravity: bilateral trade panel estimation toolkit"};
    app.require_subcommand(1);

    std::string data_dir;
    std::string measure = "capital";
    ModelFlags flags;
    int year = 0;
    double level = 0.95;
    std::string years_text;
    std::string windows_text;
    std::string out_path;
    std::string config_file;
    int workers = 1;
    int replications = 200;

    auto add_data_flags = [&](CLI::App* cmd) {
        cmd->add_option("--data", data_dir, "panel directory (CSV schemas)")
            ->required();
        cmd->add_option("--distance-measure", measure,
                        "pairwise distance: capital or weighted-city");
    };

    CLI::App* validate = app.add_subcommand("validate", "load and check a panel");
    add_data_flags(validate);

    CLI::App* estimate =
        app.add_subcommand("estimate", "single-year inference table");
    add_data_flags(estimate);
    add_model_flags(estimate, flags, false);
    estimate->add_option("--year", year, "cross-section year")->required();
    estimate->add_option("--level", level, "confidence level (default 0.95)");
    estimate->add_option("--out", out_path, "also write the table to this file");

    CLI::App* series =
        app.add_subcommand("series", "per-year distance-coefficient series CSVs");
    add_data_flags(series);
    add_model_flags(series, flags, true);
    series->add_option("--years", years_text, "inclusive range, e.g. 1991:2006")
        ->required();
    series->add_option("--out", out_path, "output directory (default .)");
    series->add_option("--workers", workers, "parallel workers (default 1)");

    CLI::App* sensitivity = app.add_subcommand(
        "sensitivity", "distance-coefficient sensitivity to oil prices");
    add_data_flags(sensitivity);
    add_model_flags(sensitivity, flags, false);
    sensitivity->add_option("--years", years_text, "series range, e.g. 1991:2006")
        ->required();
    sensitivity
        ->add_option("--windows", windows_text,
                     "comma-separated windows, e.g. 1993:1995,1995:1998")
        ->required();
    sensitivity->add_option("--out", out_path, "also write the report CSV here");
    sensitivity->add_option("--workers", workers, "parallel workers (default 1)");

    CLI::App* simulate =
        app.add_subcommand("simulate", "write a synthetic panel from a config");
    simulate->add_option("--config", config_file, "flat key=value config file")
        ->required();
    simulate->add_option("--out", out_path, "output directory")->required();

    CLI::App* recover = app.add_subcommand(
        "recover", "planted-coefficient recovery experiment");
    recover->add_option("--config", config_file, "flat key=value config file")
        ->required();
    add_model_flags(recover, flags, false);
    recover->add_option("--replications", replications,
                        "Monte Carlo replications (default 200)");
    recover->add_option("--workers", workers, "parallel workers (default 1)");
    recover->add_option("--out", out_path, "also write the per-coefficient CSV here");

    CLI::App* chart = app.add_subcommand(
        "chart-data", "tidy year,variable,value CSV for plotting");
    add_data_flags(chart);
    add_model_flags(chart, flags, true);
    chart->add_option("--years", years_text, "inclusive range, e.g. 1991:2006")
        ->required();
    chart->add_option("--out", out_path, "output CSV path")->required();
    chart->add_option("--workers", workers, "parallel workers (default 1)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));

        if (validate->parsed()) return cmd_validate(data_dir, measure, out);
        if (estimate->parsed())
            return cmd_estimate(data_dir, measure, flags, year, level, out_path, out);
        if (series->parsed())
            return cmd_series(data_dir, measure, flags, years_text,
                              out_path.empty() ? "." : out_path, workers, out);
        if (sensitivity->parsed())
            return cmd_sensitivity(data_dir, measure, flags, years_text,
                                   windows_text, out_path, workers, out);
        if (simulate->parsed()) return cmd_simulate(config_file, out_path, out);
        if (recover->parsed())
            return cmd_recover(config_file, flags, replications, workers, out_path,
                               out);
        if (chart->parsed())
            return cmd_chart_data(data_dir, measure, flags, years_text, out_path,
                                  workers, out);
        err << "E_USAGE: no subcommand\n";
        return 2;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "E_USAGE: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << e.code() << ": " << e.what() << "\n";
        return e.code() == "E_USAGE" ? 2 : 1;
    } catch (const std::exception& e) {
        err << "E_INTERNAL: " << e.what() << "\n";
        return 1;
    }
}

} // namespace gravity::cli
