#pragma once

#include "gravity/records.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace gravity {

// The two regression layouts. "disaggregated" is the per-sector equation with
// GDP pairs, three pair dummies, and populations; "eq1_blocs" is the
// product-form equation with the three named bloc dummies.
enum class Specification { disaggregated, eq1_blocs };
enum class ResponseTransform { log, level };
enum class PopulationMode { level, log, omit };
enum class ZeroPolicy { drop, keep };
enum class EstimatorKind { ols, ppml };

std::string to_string(Specification s);
std::string to_string(ResponseTransform r);
std::string to_string(PopulationMode p);
std::string to_string(ZeroPolicy z);
std::string to_string(EstimatorKind e);
Specification parse_specification(const std::string& text);
ResponseTransform parse_response(const std::string& text);
PopulationMode parse_population_mode(const std::string& text);
ZeroPolicy parse_zero_policy(const std::string& text);
EstimatorKind parse_estimator(const std::string& text);

struct ModelSpec {
    Specification specification = Specification::disaggregated;
    Sector sector = Sector::total;
    ResponseTransform response = ResponseTransform::log;
    // Populations enter in levels by default; the reference tables show
    // raw-count-scale coefficients (order 1e-5), which only a level column
    // produces. Applies to the disaggregated layout only.
    PopulationMode population_mode = PopulationMode::level;
    ZeroPolicy zero_policy = ZeroPolicy::drop;
    EstimatorKind estimator = EstimatorKind::ols;

    // Forbidden combinations: response=log with zero_policy=keep (log 0 is
    // undefined) and estimator=ppml with response=log (PPML fits the
    // multiplicative form). Throws DomainError.
    void validate() const;

    // Conventional pairing: OLS on logs dropping zeros, PPML on levels
    // keeping them.
    static ModelSpec defaults_for(EstimatorKind estimator);
};

struct PairKey {
    std::string i;
    std::string j;
    int year = 0;
};

struct DesignMatrix {
    std::vector<std::string> column_labels; // leading "_cons"
    Eigen::MatrixXd X; // n x k, finite entries
    Eigen::VectorXd y; // n
    std::string response_label;
    int dropped_zero_count = 0;
    std::vector<PairKey> row_keys; // per-row pair identity

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index k() const { return X.cols(); }
    int column(const std::string& label) const; // -1 when absent
};

// Builds the named design for observations sharing one (year, sector).
// Zero flows are dropped (and counted) under response=log; retained under
// level. Throws DomainError on empty input, non-positive GDP/distance, or a
// zero flow under the forbidden log/keep combination.
DesignMatrix build_design(std::span<const PairObservation> obs, const ModelSpec& spec);

struct ColumnStats {
    std::string label;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    bool zero_variance = false; // constant column
    bool is_intercept = false;  // constant by construction, exempt from warnings
};

// Per-column range/mean plus a zero-variance flag, so rank problems can be
// traced to a concrete column (e.g. a dummy that never fires in one year).
std::vector<ColumnStats> column_summary(const DesignMatrix& d);

// Labels as header, then one row per observation: pair key, response,
// regressors. Shortest round-trip number format.
void write_design_csv(const DesignMatrix& d, std::ostream& os);

} // namespace gravity
