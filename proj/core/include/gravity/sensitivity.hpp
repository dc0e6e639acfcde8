#pragma once

#include "gravity/harness.hpp"
#include "gravity/records.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gravity {

// One inclusive sub-period, start < end.
struct Window {
    int start_year = 0;
    int end_year = 0;
};

// "1993:1995,1995:1998,1998:2006" -> three windows. Throws DomainError on a
// malformed or non-increasing window.
std::vector<Window> parse_windows(const std::string& text);

struct WindowResult {
    Window window;
    bool valid = false;
    std::string invalid_reason; // set when a window year failed estimation
    int year_count = 0;         // years with usable coefficient inside the window
    double delta_coef = 0.0;    // endpoint difference, end - start
    double delta_oil = 0.0;     // USD/barrel, end - start
    bool ratio_defined = false; // false when delta_oil == 0
    double ratio = 0.0;         // delta_coef per USD/barrel
    std::optional<double> pearson_r; // absent when either series is constant
    std::string pearson_note;        // reason when absent
};

struct SensitivityReport {
    Sector sector = Sector::total;
    EstimatorKind estimator = EstimatorKind::ols;
    std::vector<WindowResult> windows;
};

// Standard Pearson correlation. Throws DomainError on length mismatch or
// fewer than two points; returns nullopt (not a value) when either series is
// constant, since r is undefined there.
std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys);

// Endpoint deltas plus within-window co-movement of the coefficient series
// against the oil price. A failed estimation year inside a window marks that
// window invalid (reported, not skipped); a window outside either series'
// coverage is an error. Throws DomainError.
SensitivityReport window_sensitivity(const CoefficientSeries& series,
                                     const OilSeries& oil,
                                     std::span<const Window> windows);

// CSV schema: start_year,end_year,valid,years,delta_coef,delta_oil,
// ratio_per_usd,pearson_r,note.
void write_sensitivity_csv(const SensitivityReport& report, std::ostream& os);

// Human-readable block, one window per paragraph.
std::string render_sensitivity_report(const SensitivityReport& report);

} // namespace gravity
