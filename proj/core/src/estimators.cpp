#include "gravity/estimators.hpp"

#include "gravity/csv.hpp"
#include "gravity/errors.hpp"

#include <Eigen/Dense>

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gravity {

// ---------------------------------------------------------------------------
// FitResult accessors

int FitResult::index_of(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

double FitResult::coefficient(const std::string& label) const {
    int idx = index_of(label);
    if (idx < 0) throw DomainError("fit has no coefficient labeled '" + label + "'");
    return coef(idx);
}

double FitResult::std_error(int index) const {
    double v = covariance(index, index);
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

// ---------------------------------------------------------------------------
// Shared linear-algebra pieces

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
    std::string out;
    for (const std::string& l : labels) {
        if (!out.empty()) out += ", ";
        out += l;
    }
    return out;
}

// Names a minimal column set involved in an exact linear dependency: grow a
// basis greedily in label order; the first column that fails to raise the
// rank is expressed in terms of the basis, and the columns with non-trivial
// weight plus the dependent column form the set.
std::vector<std::string> collinear_columns(const Eigen::MatrixXd& X,
                                           const std::vector<std::string>& labels) {
    std::vector<Eigen::Index> basis;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        Eigen::MatrixXd sub(X.rows(), static_cast<Eigen::Index>(basis.size()) + 1);
        for (std::size_t b = 0; b < basis.size(); ++b)
            sub.col(static_cast<Eigen::Index>(b)) = X.col(basis[b]);
        sub.col(static_cast<Eigen::Index>(basis.size())) = X.col(j);
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
        if (qr.rank() == sub.cols()) {
            basis.push_back(j);
            continue;
        }
        std::vector<std::string> out;
        if (!basis.empty()) {
            Eigen::MatrixXd B(X.rows(), static_cast<Eigen::Index>(basis.size()));
            for (std::size_t b = 0; b < basis.size(); ++b)
                B.col(static_cast<Eigen::Index>(b)) = X.col(basis[b]);
            Eigen::VectorXd z = B.colPivHouseholderQr().solve(X.col(j));
            double zmax = z.cwiseAbs().maxCoeff();
            for (std::size_t b = 0; b < basis.size(); ++b)
                if (std::fabs(z(static_cast<Eigen::Index>(b))) >
                    1e-8 * std::max(1.0, zmax))
                    out.push_back(labels[static_cast<std::size_t>(basis[b])]);
        }
        out.push_back(labels[static_cast<std::size_t>(j)]);
        return out;
    }
    return {};
}

// (X'X)^-1 from a full-rank pivoted QR (X P = Q R):
// (X'X)^-1 = P (R'R)^-1 P' = P R^-1 R^-T P'. No normal-equation inverse of
// X'X is ever formed.
Eigen::MatrixXd xtx_inverse(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
    const Eigen::Index k = qr.matrixQR().cols();
    Eigen::MatrixXd r_inv = qr.matrixR()
                                .topLeftCorner(k, k)
                                .triangularView<Eigen::Upper>()
                                .solve(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd inv_permuted = r_inv * r_inv.transpose();
    Eigen::MatrixXd inv = qr.colsPermutation() * inv_permuted *
                          qr.colsPermutation().transpose();
    return 0.5 * (inv + inv.transpose());
}

} // namespace

// ---------------------------------------------------------------------------
// OLS

FitResult ols_fit(const DesignMatrix& d) {
    const Eigen::Index n = d.n();
    const Eigen::Index k = d.k();
    if (n < k)
        throw DomainError("need at least as many observations as columns: n = " +
                          std::to_string(n) + ", k = " + std::to_string(k));
    for (const ColumnStats& s : column_summary(d))
        if (s.zero_variance && !s.is_intercept)
            throw EstimationError("E_RANK", "column '" + s.label +
                                                "' has zero variance in this sample");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
    if (qr.rank() < k)
        throw EstimationError("E_RANK",
                              "design is rank deficient; collinear columns: " +
                                  join_labels(collinear_columns(d.X, d.column_labels)));

    FitResult f;
    f.labels = d.column_labels;
    f.estimator = EstimatorKind::ols;
    f.coef = qr.solve(d.y);
    f.fitted = d.X * f.coef;
    f.residuals = d.y - f.fitted;
    f.n = static_cast<int>(n);
    f.k = static_cast<int>(k);
    f.df = static_cast<int>(n - k);
    const double rss = f.residuals.squaredNorm();
    f.sigma2 = f.df > 0 ? rss / f.df : 0.0;
    f.covariance = f.sigma2 * xtx_inverse(qr);
    f.dropped_zero_count = d.dropped_zero_count;
    f.converged = true;
    return f;
}

// ---------------------------------------------------------------------------
// PPML

namespace {

// Log link with a hard ceiling so exp never overflows; 700 is just below
// log(DBL_MAX).
Eigen::VectorXd mean_of(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
    Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd mu(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        mu(i) = std::exp(std::min(eta(i), 700.0));
    return mu;
}

// Poisson deviance 2 * sum[y log(y/mu) - (y - mu)]; the y = 0 term reduces to
// 2 mu. Infinite when some mu underflows against a positive y, which the
// step-halving loop treats as "worse".
double poisson_deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) > 0.0) {
            if (mu(i) <= 0.0) return std::numeric_limits<double>::infinity();
            dev += 2.0 * (y(i) * std::log(y(i) / mu(i)) - (y(i) - mu(i)));
        } else {
            dev += 2.0 * mu(i);
        }
    }
    return dev;
}

std::string trace_tail(const std::vector<double>& trace, std::size_t count) {
    std::ostringstream os;
    std::size_t start = trace.size() > count ? trace.size() - count : 0;
    for (std::size_t i = start; i < trace.size(); ++i) {
        if (i > start) os << ", ";
        os << csv::fmt_sig7(trace[i]);
    }
    return os.str();
}

} // namespace

FitResult ppml_fit(const DesignMatrix& d, const PpmlOptions& options) {
    const Eigen::Index n = d.n();
    const Eigen::Index k = d.k();
    if (n < k)
        throw DomainError("need at least as many observations as columns: n = " +
                          std::to_string(n) + ", k = " + std::to_string(k));
    if (options.tol <= 0.0 || options.max_iter < 1)
        throw DomainError("ppml options require tol > 0 and max_iter >= 1");

    double y_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (d.y(i) < 0.0)
            throw DomainError("negative response at row " + std::to_string(i) +
                              "; the Poisson form needs the level response");
        y_sum += d.y(i);
    }
    if (y_sum <= 0.0)
        throw DomainError("response is identically zero; nothing to fit");

    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
        if (qr.rank() < k)
            throw EstimationError(
                "E_RANK", "design is rank deficient; collinear columns: " +
                              join_labels(collinear_columns(d.X, d.column_labels)));
    }

    FitResult f;
    f.labels = d.column_labels;
    f.estimator = EstimatorKind::ppml;
    f.n = static_cast<int>(n);
    f.k = static_cast<int>(k);
    f.df = static_cast<int>(n - k);
    f.dropped_zero_count = d.dropped_zero_count;

    // Start at the intercept-only optimum: exp(_cons) = mean response.
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    int cons = d.column("_cons");
    if (cons >= 0) beta(cons) = std::log(y_sum / static_cast<double>(n));

    Eigen::VectorXd mu = mean_of(d.X, beta);
    double dev = poisson_deviance(d.y, mu);
    f.deviance_trace.push_back(dev);
    f.converged = false;

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        // Fisher scoring step as a weighted least-squares solve:
        // minimize || sqrt(mu) (z - X b) || with z the working response.
        Eigen::VectorXd sqrt_w = mu.cwiseSqrt();
        Eigen::MatrixXd wx = sqrt_w.asDiagonal() * d.X;
        Eigen::VectorXd eta = d.X * beta;
        Eigen::VectorXd wz(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            double m = mu(i);
            if (m <= 0.0)
                throw EstimationError("E_SEPARATION",
                                      "fitted mean underflowed to zero at row " +
                                          std::to_string(i) +
                                          "; coefficients are diverging");
            wz(i) = sqrt_w(i) * (eta(i) + (d.y(i) - m) / m);
        }
        // The weighted column norms serve two jobs. A norm at machine epsilon
        // of the largest means the weights died on that column's support --
        // the classic separation signature of a dummy predicting the zero
        // responses, whose coefficient is running to -inf. The surviving
        // norms then equilibrate the solve: regressor scales differ by an
        // order of magnitude or more (log-GDP levels vs 0/1 dummies), and
        // the rescaled factorization keeps the located optimum stable under
        // benign rescalings of the data.
        Eigen::VectorXd col_scale(k);
        double max_norm = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            col_scale(j) = wx.col(j).norm();
            max_norm = std::max(max_norm, col_scale(j));
        }
        const double collapse_floor = std::numeric_limits<double>::epsilon() *
                                      std::sqrt(static_cast<double>(n)) * max_norm;
        std::vector<std::string> collapsed;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (col_scale(j) <= collapse_floor)
                collapsed.push_back(d.column_labels[static_cast<std::size_t>(j)]);
            if (col_scale(j) <= 0.0) col_scale(j) = 1.0;
        }
        if (!collapsed.empty())
            throw EstimationError(
                "E_SEPARATION",
                "weights collapsed at iteration " + std::to_string(iter) +
                    "; offending columns: " + join_labels(collapsed));
        Eigen::MatrixXd wx_eq = wx * col_scale.cwiseInverse().asDiagonal();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wx_eq);
        if (qr.rank() < k)
            throw EstimationError(
                "E_SEPARATION",
                "weighted design lost rank (weights collapse); offending columns: " +
                    join_labels(collinear_columns(wx, d.column_labels)));

        Eigen::VectorXd target = qr.solve(wz).cwiseQuotient(col_scale);
        Eigen::VectorXd delta = target - beta;

        // Step halving: accept only a non-increasing deviance, so the logged
        // trace is monotone by construction.
        double step = 1.0;
        Eigen::VectorXd candidate = target;
        Eigen::VectorXd cand_mu = mean_of(d.X, candidate);
        double cand_dev = poisson_deviance(d.y, cand_mu);
        int halvings = 0;
        while (!(cand_dev <= dev) && halvings < options.max_halvings) {
            step *= 0.5;
            ++halvings;
            candidate = beta + step * delta;
            cand_mu = mean_of(d.X, candidate);
            cand_dev = poisson_deviance(d.y, cand_mu);
        }
        if (!(cand_dev <= dev)) {
            // No decrease within the halving budget. At the optimum this is
            // pure rounding: the relative change is already below tol.
            double rel = std::fabs(cand_dev - dev) / (0.1 + std::fabs(dev));
            if (rel < options.tol) {
                f.iterations = iter;
                f.converged = true;
                break;
            }
            throw EstimationError(
                "E_CONVERGE", "step-halving failed to reduce the deviance at iteration " +
                                  std::to_string(iter) +
                                  "; deviance trace: " + trace_tail(f.deviance_trace, 5) +
                                  " -> " + csv::fmt_sig7(cand_dev));
        }

        beta = candidate;
        mu = cand_mu;
        double rel = std::fabs(dev - cand_dev) / (0.1 + std::fabs(cand_dev));
        dev = cand_dev;
        f.deviance_trace.push_back(dev);
        f.iterations = iter;
        if (rel < options.tol) {
            f.converged = true;
            break;
        }
    }
    if (!f.converged)
        throw EstimationError(
            "E_CONVERGE", "no convergence in " + std::to_string(options.max_iter) +
                              " iterations; deviance trace: " +
                              trace_tail(f.deviance_trace, 8));

    // Polish the converged solution with two Fisher-scoring steps in extended
    // precision. Double-precision IRLS locates the optimum only to about
    // kappa * eps, which is visible when the same data is refit under a
    // benign rescaling (dollars vs thousands, km vs miles); the refinement
    // pins the reported coefficients well below double rounding. The
    // iteration count and deviance trace stay those of the double loop.
    {
        using LongMatrix =
            Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
        using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
        const LongMatrix X = d.X.cast<long double>();
        const LongVector y = d.y.cast<long double>();
        LongVector b = beta.cast<long double>();
        bool usable = true;
        for (int step = 0; step < 2 && usable; ++step) {
            LongVector eta = X * b;
            LongVector sw(n), wz_l(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                long double m = std::exp(std::min(eta(i), 700.0L));
                if (!(m > 0.0L)) {
                    usable = false;
                    break;
                }
                sw(i) = std::sqrt(m);
                wz_l(i) = sw(i) * (eta(i) + (y(i) - m) / m);
            }
            if (!usable) break;
            LongMatrix wx_l = sw.asDiagonal() * X;
            LongVector scale(k);
            for (Eigen::Index j = 0; j < k; ++j) {
                long double nrm = wx_l.col(j).norm();
                scale(j) = nrm > 0.0L ? nrm : 1.0L;
            }
            LongMatrix wx_l_eq = wx_l * scale.cwiseInverse().asDiagonal();
            Eigen::ColPivHouseholderQR<LongMatrix> qr_l(wx_l_eq);
            if (qr_l.rank() < k) {
                usable = false;
                break;
            }
            b = qr_l.solve(wz_l).cwiseQuotient(scale);
        }
        if (usable) {
            Eigen::VectorXd polished = b.cast<double>();
            Eigen::VectorXd polished_mu = mean_of(d.X, polished);
            double polished_dev = poisson_deviance(d.y, polished_mu);
            // The refit improves the objective by construction; the slack
            // only covers double rounding in the recomputed deviance, and the
            // rejection branch exists for exotic divergence.
            if (polished_dev <= dev + 1e-9 * (0.1 + std::fabs(dev))) {
                beta = polished;
                mu = polished_mu;
                dev = std::min(dev, polished_dev);
            }
        }
    }

    f.coef = beta;
    f.fitted = mu;
    f.residuals = d.y - mu;
    f.deviance = dev;

    // Information matrix A = X' diag(mu) X via the weighted QR, so the
    // inverse comes from a triangular factor exactly as in the OLS path.
    Eigen::VectorXd sqrt_w = mu.cwiseSqrt();
    Eigen::MatrixXd wx = sqrt_w.asDiagonal() * d.X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wx);
    if (qr.rank() < k)
        throw EstimationError("E_SEPARATION",
                              "weighted design lost rank at the reported optimum");
    Eigen::MatrixXd a_inv = xtx_inverse(qr);
    if (options.classical_covariance) {
        f.covariance = a_inv;
    } else {
        // Sandwich a_inv * B * a_inv with B the score outer product; no
        // small-sample factor (duplicating every row must exactly halve it).
        Eigen::VectorXd r2 = f.residuals.array().square();
        Eigen::MatrixXd meat = d.X.transpose() * r2.asDiagonal() * d.X;
        Eigen::MatrixXd cov = a_inv * meat * a_inv;
        f.covariance = 0.5 * (cov + cov.transpose());
    }
    return f;
}

// ---------------------------------------------------------------------------
// Inference

double student_t_p_two_sided(double t, int df) {
    if (df < 1) throw DomainError("Student-t needs df >= 1");
    boost::math::students_t_distribution<double> dist(static_cast<double>(df));
    double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
    return std::clamp(p, 1e-300, 1.0);
}

double student_t_critical(int df, double level) {
    if (df < 1) throw DomainError("Student-t needs df >= 1");
    if (!(level > 0.0 && level < 1.0))
        throw DomainError("confidence level must lie in (0,1)");
    boost::math::students_t_distribution<double> dist(static_cast<double>(df));
    return boost::math::quantile(dist, 0.5 + level / 2.0);
}

InferenceTable inference(const FitResult& fit, double level) {
    if (fit.df < 1)
        throw DomainError("inference needs df >= 1, got df = " +
                          std::to_string(fit.df));
    if (!(level > 0.0 && level < 1.0))
        throw DomainError("confidence level must lie in (0,1)");

    const double t_crit = student_t_critical(fit.df, level);
    InferenceTable table;
    table.level = level;
    table.df = fit.df;
    for (std::size_t idx = 0; idx < fit.labels.size(); ++idx) {
        InferenceRow row;
        row.label = fit.labels[idx];
        row.coef = fit.coef(static_cast<Eigen::Index>(idx));
        row.std_err = fit.std_error(static_cast<int>(idx));
        if (row.std_err == 0.0) {
            row.degenerate = true;
            if (row.coef == 0.0) {
                row.t = 0.0;
                row.p = 1.0;
            } else {
                row.t = std::copysign(std::numeric_limits<double>::infinity(),
                                      row.coef);
                row.p = 0.0;
            }
            row.ci_low = row.ci_high = row.coef;
        } else {
            row.t = row.coef / row.std_err;
            row.p = student_t_p_two_sided(row.t, fit.df);
            row.ci_low = row.coef - t_crit * row.std_err;
            row.ci_high = row.coef + t_crit * row.std_err;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Robust covariance

Eigen::MatrixXd robust_covariance(const FitResult& fit, const DesignMatrix& d,
                                  CovarianceKind kind) {
    if (fit.df <= 0)
        throw DomainError("robust covariance needs residual degrees of freedom "
                          "(n > k)");
    if (d.k() != fit.k || d.n() != fit.n)
        throw DomainError("design does not match the fit (n or k differ)");

    if (kind == CovarianceKind::hc1) {
        if (fit.estimator != EstimatorKind::ols)
            throw DomainError("HC1 applies to OLS fits; use the sandwich for PPML");
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d.X);
        if (qr.rank() < d.k())
            throw EstimationError("E_RANK", "design is rank deficient");
        Eigen::MatrixXd bread = xtx_inverse(qr);
        Eigen::VectorXd r2 = fit.residuals.array().square();
        Eigen::MatrixXd meat = d.X.transpose() * r2.asDiagonal() * d.X;
        double factor = static_cast<double>(fit.n) / static_cast<double>(fit.df);
        Eigen::MatrixXd cov = factor * bread * meat * bread;
        return 0.5 * (cov + cov.transpose());
    }

    if (fit.estimator != EstimatorKind::ppml)
        throw DomainError("the Poisson sandwich applies to PPML fits; use HC1 for OLS");
    Eigen::VectorXd sqrt_w = fit.fitted.cwiseSqrt();
    Eigen::MatrixXd wx = sqrt_w.asDiagonal() * d.X;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(wx);
    if (qr.rank() < d.k())
        throw EstimationError("E_SEPARATION", "weighted design is rank deficient");
    Eigen::MatrixXd a_inv = xtx_inverse(qr);
    Eigen::VectorXd r2 = fit.residuals.array().square();
    Eigen::MatrixXd meat = d.X.transpose() * r2.asDiagonal() * d.X;
    Eigen::MatrixXd cov = a_inv * meat * a_inv;
    return 0.5 * (cov + cov.transpose());
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_inference_table(const InferenceTable& table,
                                   const std::string& heading) {
    std::ostringstream os;
    if (!heading.empty()) os << heading << '\n';
    char level_buf[32];
    std::snprintf(level_buf, sizeof level_buf, "%g", table.level * 100.0);
    os << "| Coef. | Std. Err. | t | P>|t| | [" << level_buf
       << "% Conf. Interval] |\n";

    auto emit = [&os](const InferenceRow& row) {
        os << "| " << row.label << " | " << csv::fmt_sig7(row.coef) << " | "
           << csv::fmt_sig7(row.std_err) << " | " << csv::fmt_fixed(row.t, 2)
           << " | " << csv::fmt_fixed(row.p, 3) << " | "
           << csv::fmt_sig7(row.ci_low) << "  " << csv::fmt_sig7(row.ci_high)
           << " |\n";
    };
    // Slope rows in design order, the intercept last, as in the reference
    // tables.
    for (const InferenceRow& row : table.rows)
        if (row.label != "_cons") emit(row);
    for (const InferenceRow& row : table.rows)
        if (row.label == "_cons") emit(row);
    return os.str();
}

} // namespace gravity
