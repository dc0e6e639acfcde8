#include "gravity/harness.hpp"

#include "gravity/csv.hpp"
#include "gravity/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace gravity {

std::size_t CoefficientSeries::usable_count() const {
    return static_cast<std::size_t>(
        std::count_if(entries.begin(), entries.end(),
                      [](const SeriesEntry& e) { return e.ok; }));
}

YearRange parse_year_range(const std::string& text) {
    auto parse_year = [&](const std::string& part) {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw DomainError("bad year '" + part + "' in range '" + text + "'");
        return std::stoi(part);
    };
    YearRange r;
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        r.first = r.last = parse_year(text);
    } else {
        r.first = parse_year(text.substr(0, colon));
        r.last = parse_year(text.substr(colon + 1));
    }
    if (r.first > r.last)
        throw DomainError("year range '" + text + "' runs backwards");
    return r;
}

namespace {

struct YearOutcome {
    SeriesEntry entry;
    FitResult fit; // valid when entry.ok
};

YearOutcome run_one_year(const PanelDataset& panel, const ModelSpec& spec, int year) {
    YearOutcome out;
    out.entry.year = year;
    try {
        auto obs = pair_observations(panel, year, spec.sector);
        DesignMatrix d = build_design(obs, spec);
        FitResult fit = spec.estimator == EstimatorKind::ppml ? ppml_fit(d)
                                                              : ols_fit(d);
        int dist = fit.index_of("log_dis");
        if (dist < 0)
            throw DomainError("fit has no log_dis column"); // both layouts carry it
        out.entry.ok = true;
        out.entry.distance_coef = fit.coef(dist);
        out.entry.distance_se = fit.std_error(dist);
        out.entry.n = fit.n;
        out.entry.dropped_zero_count = fit.dropped_zero_count;
        out.entry.converged = fit.converged;
        out.fit = std::move(fit);
    } catch (const Error& e) {
        out.entry.ok = false;
        out.entry.failure = e.code() + ": " + e.what();
    }
    return out;
}

} // namespace

CrossSectionRun run_cross_sections(const PanelDataset& panel, const ModelSpec& spec,
                                   YearRange years, int workers) {
    spec.validate();
    if (years.first > years.last)
        throw DomainError("empty year range");
    if (panel.years().empty())
        throw DomainError("panel has no flow data");
    if (years.first < panel.years().front() || years.last > panel.years().back())
        throw DomainError("year range [" + std::to_string(years.first) + ", " +
                          std::to_string(years.last) + "] outside panel coverage [" +
                          std::to_string(panel.years().front()) + ", " +
                          std::to_string(panel.years().back()) + "]");

    const int count = years.last - years.first + 1;
    std::vector<YearOutcome> outcomes(static_cast<std::size_t>(count));

    // Position-based work assignment: worker w takes years w, w+W, w+2W, ...
    // Slots are disjoint, so assembly below is scheduling-independent.
    int thread_count = std::clamp(workers, 1, count);
    if (thread_count <= 1) {
        for (int i = 0; i < count; ++i)
            outcomes[static_cast<std::size_t>(i)] =
                run_one_year(panel, spec, years.first + i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int w = 0; w < thread_count; ++w) {
            pool.emplace_back([&, w]() {
                for (int i = w; i < count; i += thread_count)
                    outcomes[static_cast<std::size_t>(i)] =
                        run_one_year(panel, spec, years.first + i);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    CrossSectionRun run;
    run.series.sector = spec.sector;
    run.series.estimator = spec.estimator;
    for (int i = 0; i < count; ++i) {
        YearOutcome& o = outcomes[static_cast<std::size_t>(i)];
        if (o.entry.ok) run.fits.emplace(o.entry.year, std::move(o.fit));
        run.series.entries.push_back(std::move(o.entry));
    }
    return run;
}

SeriesSummary series_summary(const CoefficientSeries& series) {
    std::vector<const SeriesEntry*> usable;
    for (const SeriesEntry& e : series.entries)
        if (e.ok) usable.push_back(&e);
    if (usable.empty())
        throw DomainError("series summary: every year failed");
    if (usable.size() < 2)
        throw DomainError("series summary needs at least two usable years, got " +
                          std::to_string(usable.size()));

    SeriesSummary s;
    s.usable_years = usable.size();
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const SeriesEntry* e : usable) {
        sum += e->distance_coef;
        s.min = std::min(s.min, e->distance_coef);
        s.max = std::max(s.max, e->distance_coef);
    }
    s.mean = sum / static_cast<double>(usable.size());
    for (std::size_t i = 1; i < usable.size(); ++i) {
        double prev = usable[i - 1]->distance_coef;
        double cur = usable[i]->distance_coef;
        s.first_differences.push_back(cur - prev);
        if (prev * cur < 0.0) s.sign_change_years.push_back(usable[i]->year);
    }
    return s;
}

void write_series_csv(const CoefficientSeries& series, std::ostream& os) {
    os << "year,sector,estimator,coef,se,n,dropped_zeros,status\n";
    for (const SeriesEntry& e : series.entries) {
        std::vector<std::string> row;
        row.push_back(std::to_string(e.year));
        row.push_back(to_string(series.sector));
        row.push_back(to_string(series.estimator));
        if (e.ok) {
            row.push_back(csv::fmt_sig7(e.distance_coef));
            row.push_back(csv::fmt_sig7(e.distance_se));
            row.push_back(std::to_string(e.n));
            row.push_back(std::to_string(e.dropped_zero_count));
            row.push_back("ok");
        } else {
            row.insert(row.end(), {"", "", "", ""});
            row.push_back("failed: " + e.failure);
        }
        csv::write_row(os, row);
    }
}

} // namespace gravity
