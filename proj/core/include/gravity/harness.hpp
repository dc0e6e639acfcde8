#pragma once

#include "gravity/design.hpp"
#include "gravity/estimators.hpp"
#include "gravity/panel.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gravity {

// One year of the distance-coefficient series. Failed regressions are kept
// as explicit markers so downstream output shows gaps, never interpolation.
struct SeriesEntry {
    int year = 0;
    bool ok = false;
    std::string failure; // reason when !ok
    double distance_coef = 0.0;
    double distance_se = 0.0;
    int n = 0;
    int dropped_zero_count = 0;
    bool converged = false;
};

struct CoefficientSeries {
    Sector sector = Sector::total;
    EstimatorKind estimator = EstimatorKind::ols;
    std::vector<SeriesEntry> entries; // years strictly increasing
    std::size_t usable_count() const;
};

// Inclusive year range.
struct YearRange {
    int first = 0;
    int last = 0;
};
YearRange parse_year_range(const std::string& text); // "1991:2006" or "1995"

// Per-year fits are the primary record; the series is a projection of them.
struct CrossSectionRun {
    CoefficientSeries series;
    std::map<int, FitResult> fits; // successful years only
};

// One independent regression per year in the range. Years are distributed to
// workers by position, and results assembled by year, so the outcome is
// identical for any worker count. Throws DomainError on an empty or
// uncovered range.
CrossSectionRun run_cross_sections(const PanelDataset& panel, const ModelSpec& spec,
                                   YearRange years, int workers = 1);

struct SeriesSummary {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    // Years t (of the later entry) where consecutive usable coefficients
    // changed sign: coef_{t-1} * coef_t < 0.
    std::vector<int> sign_change_years;
    // Differences between consecutive usable entries.
    std::vector<double> first_differences;
    std::size_t usable_years = 0;
};

// Throws DomainError when fewer than two usable years exist.
SeriesSummary series_summary(const CoefficientSeries& series);

// Schema: year,sector,estimator,coef,se,n,dropped_zeros,status. Failed years
// carry blank numeric cells and the failure reason in the status column.
void write_series_csv(const CoefficientSeries& series, std::ostream& os);

} // namespace gravity
