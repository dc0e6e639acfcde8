#pragma once

#include "gravity/design.hpp"
#include "gravity/estimators.hpp"
#include "gravity/panel.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gravity {

// Planted elasticities of the multiplicative flow model
//   F = exp(intercept) * GDP_i^gdp_i * GDP_j^gdp_j * D^-(rho_t * distance) / a_t * eta.
struct GravityCoefficients {
    double intercept = 0.0;
    double gdp_i = 1.0;    // elasticity on the pair's first (canonical) country
    double gdp_j = 1.0;
    double distance = 1.0; // elasticity magnitude, >= 0; enters negatively
};

struct DGPConfig {
    int countries = 10;
    int first_year = 2000;
    int last_year = 2000; // inclusive
    GravityCoefficients beta;
    std::map<int, double> cost_level;      // a_t > 0, default 1 (absolute costs)
    std::map<int, double> cost_elasticity; // rho_t > 0, default 1 (relative costs)
    double sigma = 0.0;      // sd of ln(eta); ln eta ~ N(-sigma^2/2, sigma^2) so E[eta] = 1
    double zero_share = 0.0; // independent censoring probability, in [0,1)
    std::uint64_t seed = 0;

    double cost_level_at(int year) const;
    double cost_elasticity_at(int year) const;
    void validate() const; // throws DomainError
};

// Flat key=value file: countries, years (A:B), seed, beta0, beta_gdp_i,
// beta_gdp_j, beta_distance, sigma, zero_share, cost_level.<year>,
// cost_elasticity.<year>. '#' starts a comment. Unknown keys are errors.
DGPConfig read_dgp_config(const std::filesystem::path& path);

// Generates a full panel (capitals on a seeded low-discrepancy sphere
// sequence, synthetic macro data, bloc memberships, adjacency, a flat oil
// series, and total-sector flows from the planted model). Identical seeds
// give bit-identical panels. Throws via dataset validation on degenerate
// geography.
PanelDataset simulate_panel(const DGPConfig& config);

// The value each design column should recover at `year`, on the estimator's
// own scale: the log-OLS intercept absorbs E[ln eta] = -sigma^2/2 while PPML
// does not; cost level enters the intercept as -ln a_t; the distance column
// recovers -rho_t * beta_distance. Throws DomainError for the product-form
// layout when gdp_i != gdp_j (its single size coefficient would be
// misspecified).
std::vector<double> planted_truth(const DGPConfig& config, const ModelSpec& spec,
                                  std::span<const std::string> labels, int year);

struct CoefficientRecovery {
    std::string label;
    double truth = 0.0;
    double mean = 0.0;
    double bias = 0.0;     // mean - truth
    double rmse = 0.0;
    double coverage = 0.0; // share of replications whose 95% CI contains truth
};

struct RecoveryReport {
    std::vector<CoefficientRecovery> coefficients;
    int replications = 0;
    int failures = 0; // estimation failures, counted and reported, never hidden
    std::string first_failure;
    int year = 0; // evaluation year: the first configured year
    EstimatorKind estimator = EstimatorKind::ols;
};

// simulate -> estimate per replication with position-derived sub-seeds, so
// parallel runs reproduce sequential results exactly. Estimates are taken at
// the first configured year (later years are different estimands whenever
// the cost paths vary). Throws DomainError when every replication fails.
RecoveryReport recovery_experiment(const DGPConfig& config, const ModelSpec& spec,
                                   int replications, int workers = 1);

// CSV schema: label,truth,mean,bias,rmse,coverage95.
void write_recovery_csv(const RecoveryReport& report, std::ostream& os);
std::string render_recovery_report(const RecoveryReport& report);

// Deterministic 64-bit mix used to derive replication sub-seeds by position.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace gravity
