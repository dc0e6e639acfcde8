#pragma once

// Independent reference implementations used only by tests. Every routine
// here deliberately takes a different algorithmic route from the library —
// normal equations instead of QR, numeric integration instead of closed-form
// distribution calls, the spherical law of cosines in atan2 form instead of
// haversine — so agreement is evidence, not tautology. Internals run in long
// double to keep oracle error well below the tolerances under test.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

// ---------------------------------------------------------------------------
// Least squares by explicit normal equations, long double throughout.

struct LeastSquares {
    std::vector<double> coef;
    std::vector<double> covariance; // sigma2 * (X'X)^-1, row-major k x k
    double sigma2 = 0.0;            // RSS / (n - k); 0 when n == k
};

// Gauss-Jordan solve of A * X = B for square A (long double, partial
// pivoting). Throws std::runtime_error on a singular pivot.
inline std::vector<long double> solve_gauss(std::vector<long double> a,
                                            std::vector<long double> b,
                                            std::size_t n, std::size_t nrhs) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
        if (a[pivot * n + col] == 0.0L)
            throw std::runtime_error("oracle: singular system");
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c)
                std::swap(a[pivot * n + c], a[col * n + c]);
            for (std::size_t c = 0; c < nrhs; ++c)
                std::swap(b[pivot * nrhs + c], b[col * nrhs + c]);
        }
        const long double inv = 1.0L / a[col * n + col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const long double f = a[r * n + col] * inv;
            if (f == 0.0L) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            for (std::size_t c = 0; c < nrhs; ++c)
                b[r * nrhs + c] -= f * b[col * nrhs + c];
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        const long double inv = 1.0L / a[r * n + r];
        for (std::size_t c = 0; c < nrhs; ++c) b[r * nrhs + c] *= inv;
    }
    return b;
}

inline LeastSquares normal_equations_fit(const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& y) {
    const std::size_t n = static_cast<std::size_t>(X.rows());
    const std::size_t k = static_cast<std::size_t>(X.cols());

    std::vector<long double> xtx(k * k, 0.0L);
    std::vector<long double> xty(k, 0.0L);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t a = 0; a < k; ++a) {
            const long double xa = X(static_cast<Eigen::Index>(r),
                                     static_cast<Eigen::Index>(a));
            xty[a] += xa * static_cast<long double>(y(static_cast<Eigen::Index>(r)));
            for (std::size_t b = 0; b < k; ++b)
                xtx[a * k + b] += xa * static_cast<long double>(
                                           X(static_cast<Eigen::Index>(r),
                                             static_cast<Eigen::Index>(b)));
        }
    }

    std::vector<long double> beta = solve_gauss(xtx, xty, k, 1);

    // Rebuild X'X (solve_gauss consumed its copy) and invert it column by
    // column for the covariance factor.
    std::vector<long double> xtx2(k * k, 0.0L);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b)
                xtx2[a * k + b] +=
                    static_cast<long double>(X(static_cast<Eigen::Index>(r),
                                               static_cast<Eigen::Index>(a))) *
                    static_cast<long double>(X(static_cast<Eigen::Index>(r),
                                               static_cast<Eigen::Index>(b)));
    std::vector<long double> eye(k * k, 0.0L);
    for (std::size_t i = 0; i < k; ++i) eye[i * k + i] = 1.0L;
    std::vector<long double> inv = solve_gauss(std::move(xtx2), std::move(eye), k, k);

    long double rss = 0.0L;
    for (std::size_t r = 0; r < n; ++r) {
        long double fit = 0.0L;
        for (std::size_t c = 0; c < k; ++c)
            fit += static_cast<long double>(X(static_cast<Eigen::Index>(r),
                                              static_cast<Eigen::Index>(c))) *
                   beta[c];
        const long double e = static_cast<long double>(
                                  y(static_cast<Eigen::Index>(r))) -
                              fit;
        rss += e * e;
    }
    const long double sigma2 = n > k ? rss / static_cast<long double>(n - k) : 0.0L;

    LeastSquares out;
    out.coef.assign(beta.begin(), beta.end());
    out.sigma2 = static_cast<double>(sigma2);
    out.covariance.resize(k * k);
    for (std::size_t i = 0; i < k * k; ++i)
        out.covariance[i] = static_cast<double>(sigma2 * inv[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Student-t distribution by numeric integration of the density.

inline long double student_t_pdf(long double x, int df) {
    const long double nu = df;
    const long double log_norm = std::lgamma((nu + 1.0L) / 2.0L) -
                                 std::lgamma(nu / 2.0L) -
                                 0.5L * std::log(nu * 3.14159265358979323846264338327950288L);
    return std::exp(log_norm -
                     (nu + 1.0L) / 2.0L * std::log1p(x * x / nu));
}

namespace detail {
inline long double simpson(long double fa, long double fm, long double fb,
                           long double a, long double b) {
    return (b - a) / 6.0L * (fa + 4.0L * fm + fb);
}

inline long double adaptive_simpson(int df, long double a, long double b,
                                    long double fa, long double fm, long double fb,
                                    long double whole, long double tol, int depth) {
    const long double m = (a + b) / 2.0L;
    const long double lm = (a + m) / 2.0L;
    const long double rm = (m + b) / 2.0L;
    const long double flm = student_t_pdf(lm, df);
    const long double frm = student_t_pdf(rm, df);
    const long double left = simpson(fa, flm, fm, a, m);
    const long double right = simpson(fm, frm, fb, m, b);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0L * tol)
        return left + right + (left + right - whole) / 15.0L;
    return adaptive_simpson(df, a, m, fa, flm, fm, left, tol / 2.0L, depth - 1) +
           adaptive_simpson(df, m, b, fm, frm, fb, right, tol / 2.0L, depth - 1);
}
} // namespace detail

// Integral of the t density over [a, b]. The default tolerance is far below
// any tolerance under test; time-budgeted callers may relax it explicitly.
inline long double student_t_integral(int df, long double a, long double b,
                                      long double tol = 1e-18L) {
    const long double fa = student_t_pdf(a, df);
    const long double fb = student_t_pdf(b, df);
    const long double fm = student_t_pdf((a + b) / 2.0L, df);
    const long double whole = detail::simpson(fa, fm, fb, a, b);
    return detail::adaptive_simpson(df, a, b, fa, fm, fb, whole, tol, 60);
}

inline double student_t_cdf(double t, int df, long double tol = 1e-18L) {
    if (t == 0.0) return 0.5;
    const long double body = student_t_integral(df, 0.0L, std::fabs(t), tol);
    const long double c = t > 0 ? 0.5L + body : 0.5L - body;
    return static_cast<double>(c);
}

inline double student_t_p_two_sided(double t, int df, long double tol = 1e-18L) {
    // 1 - 2 * integral(0, |t|): evaluated directly so the tail keeps absolute
    // precision instead of cancelling against 1.
    const long double body = student_t_integral(df, 0.0L, std::fabs(t), tol);
    long double p = 1.0L - 2.0L * body;
    if (p < 0.0L) p = 0.0L;
    if (p > 1.0L) p = 1.0L;
    return static_cast<double>(p);
}

// Quantile by bisection on the integrated density.
inline double student_t_quantile(double p, int df, long double tol = 1e-18L,
                                 int iterations = 200) {
    if (!(p > 0.0 && p < 1.0))
        throw std::runtime_error("oracle: quantile needs p in (0,1)");
    long double lo = -1000.0L, hi = 1000.0L;
    for (int i = 0; i < iterations; ++i) {
        const long double mid = (lo + hi) / 2.0L;
        if (student_t_cdf(static_cast<double>(mid), df, tol) < p)
            lo = mid;
        else
            hi = mid;
    }
    return static_cast<double>((lo + hi) / 2.0L);
}

// ---------------------------------------------------------------------------
// Great-circle distance via the spherical law of cosines in atan2 form
// (the numerically stable variant), not haversine.

inline double sphere_distance_km(double lat1_deg, double lon1_deg,
                                 double lat2_deg, double lon2_deg,
                                 double radius_km) {
    const long double deg = 3.14159265358979323846264338327950288L / 180.0L;
    const long double phi1 = lat1_deg * deg, phi2 = lat2_deg * deg;
    const long double dl = (lon2_deg - lon1_deg) * deg;
    const long double num =
        std::hypot(std::cos(phi2) * std::sin(dl),
                    std::cos(phi1) * std::sin(phi2) -
                        std::sin(phi1) * std::cos(phi2) * std::cos(dl));
    const long double den = std::sin(phi1) * std::sin(phi2) +
                            std::cos(phi1) * std::cos(phi2) * std::cos(dl);
    return static_cast<double>(radius_km * std::atan2(num, den));
}

// ---------------------------------------------------------------------------
// Pearson correlation, direct definition in long double.

inline double pearson_brute(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    long double sx = 0.0L, sy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const long double mx = sx / n, my = sy / n;
    long double sxy = 0.0L, sxx = 0.0L, syy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

} // namespace oracle
