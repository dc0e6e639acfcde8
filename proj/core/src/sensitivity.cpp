#include "gravity/sensitivity.hpp"

#include "gravity/csv.hpp"
#include "gravity/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace gravity {

std::vector<Window> parse_windows(const std::string& text) {
    std::vector<Window> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        auto colon = token.find(':');
        if (colon == std::string::npos)
            throw DomainError("window '" + token + "' is not of the form START:END");
        YearRange r = parse_year_range(token);
        if (r.first >= r.last)
            throw DomainError("window '" + token + "' must have start < end");
        out.push_back({r.first, r.last});
    }
    if (out.empty()) throw DomainError("empty window list");
    return out;
}

std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw DomainError("pearson: length mismatch (" + std::to_string(xs.size()) +
                          " vs " + std::to_string(ys.size()) + ")");
    if (xs.size() < 2)
        throw DomainError("pearson needs at least two points");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt; // constant series
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

SensitivityReport window_sensitivity(const CoefficientSeries& series,
                                     const OilSeries& oil,
                                     std::span<const Window> windows) {
    if (windows.empty()) throw DomainError("empty window list");
    if (series.entries.empty()) throw DomainError("empty coefficient series");

    auto find_entry = [&](int year) -> const SeriesEntry* {
        for (const SeriesEntry& e : series.entries)
            if (e.year == year) return &e;
        return nullptr;
    };
    const int series_first = series.entries.front().year;
    const int series_last = series.entries.back().year;

    SensitivityReport report;
    report.sector = series.sector;
    report.estimator = series.estimator;

    for (const Window& w : windows) {
        if (w.start_year >= w.end_year)
            throw DomainError("window " + std::to_string(w.start_year) + ":" +
                              std::to_string(w.end_year) + " must have start < end");
        if (w.start_year < series_first || w.end_year > series_last)
            throw DomainError("window " + std::to_string(w.start_year) + ":" +
                              std::to_string(w.end_year) +
                              " outside series coverage [" +
                              std::to_string(series_first) + ", " +
                              std::to_string(series_last) + "]");
        for (int year = w.start_year; year <= w.end_year; ++year)
            if (!oil.covers(year))
                throw DomainError("oil series has no price for year " +
                                  std::to_string(year));

        WindowResult res;
        res.window = w;

        // Every window year must exist and have a usable estimate; a failed
        // year poisons the window (explicitly, not silently).
        std::vector<double> coefs, oils;
        std::string bad;
        for (int year = w.start_year; year <= w.end_year; ++year) {
            const SeriesEntry* e = find_entry(year);
            if (!e) {
                bad = "year " + std::to_string(year) + " missing from the series";
                break;
            }
            if (!e->ok) {
                bad = "year " + std::to_string(year) + " failed: " + e->failure;
                break;
            }
            coefs.push_back(e->distance_coef);
            oils.push_back(*oil.price(year));
        }
        if (!bad.empty()) {
            res.valid = false;
            res.invalid_reason = bad;
            report.windows.push_back(std::move(res));
            continue;
        }

        res.valid = true;
        res.year_count = static_cast<int>(coefs.size());
        res.delta_coef = coefs.back() - coefs.front();
        res.delta_oil = oils.back() - oils.front();
        if (res.delta_oil != 0.0) {
            res.ratio_defined = true;
            res.ratio = res.delta_coef / res.delta_oil;
        }
        res.pearson_r = pearson(coefs, oils);
        if (!res.pearson_r)
            res.pearson_note = "undefined: constant series within the window";
        report.windows.push_back(std::move(res));
    }
    return report;
}

void write_sensitivity_csv(const SensitivityReport& report, std::ostream& os) {
    os << "start_year,end_year,valid,years,delta_coef,delta_oil,ratio_per_usd,"
          "pearson_r,note\n";
    for (const WindowResult& w : report.windows) {
        std::vector<std::string> row;
        row.push_back(std::to_string(w.window.start_year));
        row.push_back(std::to_string(w.window.end_year));
        row.push_back(w.valid ? "true" : "false");
        if (w.valid) {
            row.push_back(std::to_string(w.year_count));
            row.push_back(csv::fmt_sig7(w.delta_coef));
            row.push_back(csv::fmt_sig7(w.delta_oil));
            row.push_back(w.ratio_defined ? csv::fmt_sig7(w.ratio) : "");
            row.push_back(w.pearson_r ? csv::fmt_sig7(*w.pearson_r) : "");
            row.push_back(w.pearson_r ? "" : w.pearson_note);
        } else {
            row.insert(row.end(), {"", "", "", "", ""});
            row.push_back(w.invalid_reason);
        }
        csv::write_row(os, row);
    }
}

std::string render_sensitivity_report(const SensitivityReport& report) {
    std::ostringstream os;
    os << "sensitivity of the " << to_string(report.sector) << " "
       << to_string(report.estimator) << " distance coefficient to oil prices\n";
    for (const WindowResult& w : report.windows) {
        os << "window " << w.window.start_year << "-" << w.window.end_year << ": ";
        if (!w.valid) {
            os << "invalid (" << w.invalid_reason << ")\n";
            continue;
        }
        os << "delta coef = " << csv::fmt_sig7(w.delta_coef)
           << ", delta oil = " << csv::fmt_sig7(w.delta_oil) << " USD/barrel";
        if (w.ratio_defined)
            os << ", ratio = " << csv::fmt_sig7(w.ratio) << " per USD";
        else
            os << ", ratio undefined (delta oil = 0)";
        if (w.pearson_r)
            os << ", pearson r = " << csv::fmt_sig7(*w.pearson_r);
        else
            os << ", pearson r " << w.pearson_note;
        os << " (" << w.year_count << " years)\n";
    }
    return os.str();
}

} // namespace gravity
