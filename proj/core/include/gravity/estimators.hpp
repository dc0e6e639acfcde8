#pragma once

#include "gravity/design.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace gravity {

struct FitResult {
    std::vector<std::string> labels; // design column order, leading "_cons"
    Eigen::VectorXd coef;
    // OLS: classical sigma2 * (X'X)^-1. PPML: robust sandwich (the
    // pseudo-likelihood default; classical Poisson only behind an explicit
    // option). Symmetric PSD.
    Eigen::MatrixXd covariance;
    double sigma2 = 0.0; // OLS residual variance RSS/(n-k); 0 when df = 0
    int n = 0;
    int k = 0;
    int df = 0; // n - k
    EstimatorKind estimator = EstimatorKind::ols;
    bool converged = true; // IRLS outcome; always true for OLS
    int iterations = 0;
    double deviance = 0.0;               // final Poisson deviance (PPML)
    std::vector<double> deviance_trace;  // accepted IRLS iterates, non-increasing
    int dropped_zero_count = 0;          // carried from the design
    Eigen::VectorXd fitted;    // X*b (OLS) or mu = exp(X*b) (PPML)
    Eigen::VectorXd residuals; // y - fitted

    int index_of(const std::string& label) const; // -1 when absent
    double coefficient(const std::string& label) const; // throws DomainError
    double std_error(int index) const;
};

// Least squares via column-pivoted QR (never an explicit normal-equation
// inverse); the covariance comes from the R factor. Rank deficiency is
// reported with a minimal collinear column set; a zero-variance non-intercept
// column is rejected up front by name. Throws EstimationError / DomainError.
FitResult ols_fit(const DesignMatrix& d);

struct PpmlOptions {
    double tol = 1e-10; // relative deviance change, |dD| / (0.1 + |D|)
    int max_iter = 100;
    int max_halvings = 20;
    // Classical Poisson covariance A^-1 instead of the sandwich. The
    // pseudo-likelihood motivation makes classical SEs wrong by default.
    bool classical_covariance = false;
};

// Poisson pseudo-maximum-likelihood: solves sum_r x_r (y_r - exp(x_r'b)) = 0
// by iteratively reweighted least squares with step-halving, starting from
// intercept = log(mean response) and zero slopes. Requires a level response,
// y >= 0 with at least one positive. Throws EstimationError on separation
// (E_SEPARATION) or iteration exhaustion (E_CONVERGE, message carries the
// deviance trace tail).
FitResult ppml_fit(const DesignMatrix& d, const PpmlOptions& options = {});

struct InferenceRow {
    std::string label;
    double coef = 0.0;
    double std_err = 0.0;
    double t = 0.0;       // coef / std_err
    double p = 1.0;       // two-sided Student-t tail, in (0,1] for finite t
    double ci_low = 0.0;  // coef -/+ t_crit(df, level) * std_err
    double ci_high = 0.0;
    bool degenerate = false; // zero std_err: t infinite (or 0), p pinned
};

struct InferenceTable {
    std::vector<InferenceRow> rows; // design column order
    double level = 0.95;
    int df = 0;
};

// Student-t inference at n-k degrees of freedom. Throws DomainError when
// df < 1 or the level is outside (0,1).
InferenceTable inference(const FitResult& fit, double level = 0.95);

enum class CovarianceKind { hc1, sandwich };

// HC1 heteroskedasticity-robust covariance for an OLS fit, Poisson sandwich
// for a PPML fit (recomputed from the design; kind must match the
// estimator). Throws DomainError on df <= 0 or a kind/estimator mismatch.
Eigen::MatrixXd robust_covariance(const FitResult& fit, const DesignMatrix& d,
                                  CovarianceKind kind);

// Student-t helpers shared by inference and the reporting layer.
double student_t_p_two_sided(double t, int df);
double student_t_critical(int df, double level);

// The reference layout: slope rows first, "_cons" last; header
// "| Coef. | Std. Err. | t | P>|t| | [95% Conf. Interval] |"; coefficients to
// 7 significant digits, t to 2 decimals, p to 3.
std::string render_inference_table(const InferenceTable& table,
                                   const std::string& heading = {});

} // namespace gravity
