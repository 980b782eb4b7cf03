#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fraclab::specfun {

/// log Gamma for x > 0.
inline double ln_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("ln_gamma: requires x > 0, got " + std::to_string(x));
    return std::lgamma(x);
}

/// (log|Gamma(x)|, sign of Gamma(x)) for any non-pole real x.
inline std::pair<double, double> lgamma_signed(double x) {
    if (x > 0.0) return {std::lgamma(x), 1.0};
    const double fl = std::floor(x);
    if (x == fl)
        throw std::domain_error("lgamma_signed: pole at nonpositive integer " + std::to_string(x));
    // Gamma alternates sign on (-k-1,-k): negative on (-1,0), positive on (-2,-1), ...
    const double sign = (static_cast<long long>(fl) % 2 == 0) ? 1.0 : -1.0;
    return {std::lgamma(x), sign};
}

inline double ln_beta(double a, double b) {
    return ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b);
}

/// Digamma via recurrence into the asymptotic region.
inline double digamma(double x) {
    if (x == std::floor(x) && x <= 0.0)
        throw std::domain_error("digamma: pole at nonpositive integer");
    double r = 0.0;
    while (x < 8.0) {
        r -= 1.0 / x;
        x += 1.0;
    }
    const double x2 = 1.0 / (x * x);
    const double asym =
        std::log(x) - 0.5 / x -
        x2 * (1.0 / 12.0 -
              x2 * (1.0 / 120.0 -
                    x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 * (1.0 / 132.0)))));
    return r + asym;
}

/// Surface measure of the unit sphere S^{N-1} in R^N.  |S^0| = 2.
inline double sphere_area(int N) {
    if (N < 1) throw std::domain_error("sphere_area: N >= 1 required");
    return 2.0 * std::pow(M_PI, 0.5 * N) / std::exp(ln_gamma(0.5 * N));
}

/// Volume of the unit ball in R^N.
inline double ball_volume(int N) { return sphere_area(N) / N; }

namespace detail {

inline bool nonpositive_integer(double v) {
    return v <= 1e-12 && std::abs(v - std::round(v)) < 1e-12;
}

inline double hyp_series(double a, double b, double c, double x, int max_terms = 4000) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < max_terms; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) return sum;
    }
    if (std::abs(term) > 1e-12 * std::abs(sum))
        throw std::runtime_error("hyp2f1: series failed to converge");
    return sum;
}

inline double hyp_finite_series(double a, double b, double c, double x, int m) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < m; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
    }
    return sum;
}

// 1-x connection for non-integer d = c-a-b (Abramowitz & Stegun 15.3.6).
inline double hyp_connection(double a, double b, double c, double x) {
    const double y = 1.0 - x;
    const double d = c - a - b;
    const auto [lc, sc] = lgamma_signed(c);
    const auto [ld, sd] = lgamma_signed(d);
    const auto [lca, sca] = lgamma_signed(c - a);
    const auto [lcb, scb] = lgamma_signed(c - b);
    const auto [lmd, smd] = lgamma_signed(-d);
    const auto [la, sa] = lgamma_signed(a);
    const auto [lb, sb] = lgamma_signed(b);
    const double C1 = sc * sd / (sca * scb) * std::exp(lc + ld - lca - lcb);
    const double C2 = sc * smd / (sa * sb) * std::exp(lc + lmd - la - lb) * std::pow(y, d);
    return C1 * hyp_series(a, b, a + b - c + 1.0, y) +
           C2 * hyp_series(c - a, c - b, d + 1.0, y);
}

// 1-x expansion with logarithms for c = a+b+m, integer m >= 0 (A&S 15.3.10/15.3.11).
// Digamma values advance incrementally via psi(x+1) = psi(x) + 1/x.
inline double hyp_log_case(double a, double b, double c, int m, double x) {
    const double y = 1.0 - x;
    const double ln_y = std::log(y);
    const auto [la, sa] = lgamma_signed(a);
    const auto [lb, sb] = lgamma_signed(b);
    const auto [lc, sc] = lgamma_signed(c);
    if (m > 0) {
        const auto [lam, sam] = lgamma_signed(a + m);
        const auto [lbm, sbm] = lgamma_signed(b + m);
        double S1 = 0.0, t = 1.0;
        for (int n = 0; n < m; ++n) {
            if (n > 0) t *= (a + n - 1.0) * (b + n - 1.0) / ((n - static_cast<double>(m)) * n) * y;
            S1 += t;
        }
        const double C1 = sc / (sam * sbm) *
                          std::exp(std::lgamma(static_cast<double>(m)) + lc - lam - lbm);
        double S2 = 0.0;
        t = std::exp(-std::lgamma(m + 1.0));
        double ps1 = digamma(1.0), ps1m = digamma(m + 1.0);
        double psa = digamma(a + m), psb = digamma(b + m);
        for (int n = 0; n < 4000; ++n) {
            if (n > 0) {
                t *= (a + m + n - 1.0) * (b + m + n - 1.0) /
                     (n * (n + static_cast<double>(m))) * y;
                ps1 += 1.0 / n;
                ps1m += 1.0 / (m + n);
                psa += 1.0 / (a + m + n - 1.0);
                psb += 1.0 / (b + m + n - 1.0);
            }
            const double dS = t * (ln_y - ps1 - ps1m + psa + psb);
            S2 += dS;
            if (n > 4 && std::abs(dS) <= 1e-17 * std::abs(S2)) break;
        }
        const double sign_m = (m % 2 == 0) ? 1.0 : -1.0;
        const double C2 = sign_m * sc / (sa * sb) * std::exp(lc - la - lb) * std::pow(y, m);
        return C1 * S1 - C2 * S2;
    }
    double S2 = 0.0, t = 1.0;
    double ps1 = digamma(1.0), psa = digamma(a), psb = digamma(b);
    for (int n = 0; n < 4000; ++n) {
        if (n > 0) {
            t *= (a + n - 1.0) * (b + n - 1.0) / (static_cast<double>(n) * n) * y;
            ps1 += 1.0 / n;
            psa += 1.0 / (a + n - 1.0);
            psb += 1.0 / (b + n - 1.0);
        }
        const double dS = t * (2.0 * ps1 - psa - psb - ln_y);
        S2 += dS;
        if (n > 4 && std::abs(dS) <= 1e-17 * std::abs(S2)) break;
    }
    return sc / (sa * sb) * std::exp(lc - la - lb) * S2;
}

inline double hyp2f1_core(double a, double b, double c, double x) {
    if (nonpositive_integer(a))
        return hyp_finite_series(a, b, c, x, static_cast<int>(-std::round(a)));
    if (nonpositive_integer(b))
        return hyp_finite_series(b, a, c, x, static_cast<int>(-std::round(b)));
    if (x <= 0.75) return hyp_series(a, b, c, x);
    const double d = c - a - b;
    const double m = std::round(d);
    if (std::abs(d - m) < 1e-9 && m >= 0.0)
        return hyp_log_case(a, b, c, static_cast<int>(m), x);
    return hyp_connection(a, b, c, x);
}

}  // namespace detail

/// Gauss hypergeometric 2F1(a,b;c;x) on 0 <= x < 1, c not a nonpositive integer.
/// Above x = 0.75 the evaluation switches to the 1-x connection formulas.
inline double hyp2f1(double a, double b, double c, double x) {
    if (detail::nonpositive_integer(c))
        throw std::domain_error("hyp2f1: c must not be a nonpositive integer");
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("hyp2f1: requires 0 <= x < 1, got x = " + std::to_string(x));
    if (x == 0.0) return 1.0;
    if (detail::nonpositive_integer(a) || detail::nonpositive_integer(b))
        return detail::hyp2f1_core(a, b, c, x);
    const double d = c - a - b;
    if (d < 0.0)  // Euler transform makes the transformed parameter difference positive
        return std::pow(1.0 - x, d) * detail::hyp2f1_core(c - a, c - b, c, x);
    return detail::hyp2f1_core(a, b, c, x);
}

/// Gauss-Jacobi rule on (-1,1) for the weight (1-z)^alpha (1+z)^beta.
struct QuadRule {
    std::vector<double> nodes;    // strictly increasing, inside (-1,1)
    std::vector<double> weights;  // strictly positive
    double alpha = 0.0;
    double beta = 0.0;
    int order = 0;

    double integrate(const std::vector<double>& f_at_nodes) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f_at_nodes[i];
        return s;
    }
};

namespace detail {
QuadRule gauss_jacobi_uncached(int order, double alpha, double beta);
}

/// Golub-Welsch rule, memoized on (order, alpha, beta); rules are small and
/// requested repeatedly from quadrature panel loops.
inline QuadRule gauss_jacobi(int order, double alpha, double beta) {
    static std::mutex mtx;
    static std::map<std::tuple<int, long long, long long>, QuadRule> cache;
    const std::tuple<int, long long, long long> key{
        order, static_cast<long long>(std::llround(alpha * 1e12)),
        static_cast<long long>(std::llround(beta * 1e12))};
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    QuadRule rule = detail::gauss_jacobi_uncached(order, alpha, beta);
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(key, rule);
    return rule;
}

inline QuadRule detail::gauss_jacobi_uncached(int order, double alpha, double beta) {
    if (order < 1) throw std::domain_error("gauss_jacobi: order >= 1 required");
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw std::domain_error("gauss_jacobi: weight exponents must exceed -1");

    Eigen::VectorXd diag(order), subdiag(order > 1 ? order - 1 : 1);
    const double ab = alpha + beta;
    diag[0] = (beta - alpha) / (ab + 2.0);
    for (int k = 1; k < order; ++k) {
        const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
        diag[k] = (beta * beta - alpha * alpha) / den;
    }
    if (order > 1) {
        // k = 1 uses the cancelled form, valid also when alpha + beta -> -1
        subdiag[0] = std::sqrt(4.0 * (1.0 + alpha) * (1.0 + beta) /
                               ((ab + 2.0) * (ab + 2.0) * (ab + 3.0)));
        for (int k = 2; k < order; ++k) {
            const double t = 2.0 * k + ab;
            subdiag[k - 1] = std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                                       (t * t * (t + 1.0) * (t - 1.0)));
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, subdiag.head(std::max(order - 1, 0)));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("gauss_jacobi: tridiagonal eigensolve failed");

    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + ln_beta(alpha + 1.0, beta + 1.0));
    QuadRule rule;
    rule.alpha = alpha;
    rule.beta = beta;
    rule.order = order;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        rule.nodes[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

/// Gauss-Legendre nodes/weights mapped onto (lo, hi); the reference rule on
/// (-1,1) comes from the gauss_jacobi cache.
inline QuadRule gauss_legendre(int order, double lo, double hi) {
    QuadRule r = gauss_jacobi(order, 0.0, 0.0);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < order; ++i) {
        r.nodes[i] = mid + half * r.nodes[i];
        r.weights[i] *= half;
    }
    return r;
}

/// k-th positive zero of J_nu, nu >= 0.
inline double bessel_j_zero(double nu, int k) {
    if (nu < 0.0) throw std::domain_error("bessel_j_zero: nu >= 0 required");
    if (k < 1) throw std::domain_error("bessel_j_zero: k >= 1 required");

    // McMahon expansion seeds Newton
    const double betak = (k + 0.5 * nu - 0.25) * M_PI;
    const double mu = 4.0 * nu * nu;
    double x = betak - (mu - 1.0) / (8.0 * betak) -
               4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * std::pow(8.0 * betak, 3));
    if (x < 0.5) x = 0.5;

    double lo = std::max(0.1, x - 0.6 * M_PI), hi = x + 0.6 * M_PI;
    auto f = [nu](double t) { return std::cyl_bessel_j(nu, t); };
    // establish a sign-changing bracket around the seed
    while (f(lo) * f(hi) > 0.0) {
        lo = std::max(0.05, lo - 0.3);
        hi += 0.3;
        if (hi > betak + 4.0 * M_PI)
            throw std::runtime_error("bessel_j_zero: bracketing failed");
    }
    for (int it = 0; it < 100; ++it) {
        const double fx = f(x);
        const double dfx = (nu / x) * fx - std::cyl_bessel_j(nu + 1.0, x);
        double step = fx / dfx;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);  // bisection fallback
        if (f(xn) * f(lo) < 0.0) hi = xn; else lo = xn;
        if (std::abs(xn - x) < 1e-14 * (1.0 + std::abs(xn))) { x = xn; break; }
        x = xn;
    }
    return x;
}

/// Constants entering the fractional Laplacian, the Poisson kernel and the
/// extension normal-derivative limit.
struct FracConstants {
    double c_Ns = 0.0;          // singular-integral normalization
    double p_Ns = 0.0;          // Poisson kernel normalization
    double a_s = 0.0;           // weighted normal-derivative constant
    double gamma_1ps_sq = 0.0;  // Gamma(1+s)^2
};

inline FracConstants frac_constants(int N, double s) {
    if (N < 1) throw std::domain_error("frac_constants: N >= 1 required");
    if (!(s > 0.0 && s < 1.0)) throw std::domain_error("frac_constants: s in (0,1) required");
    FracConstants fc;
    fc.c_Ns = std::exp(2.0 * s * std::log(2.0) - 0.5 * N * std::log(M_PI) +
                       ln_gamma(0.5 * (N + 2.0 * s)) - ln_gamma(1.0 - s)) * s;
    fc.p_Ns = std::exp(ln_gamma(0.5 * (N + 2.0 * s)) - 0.5 * N * std::log(M_PI) - ln_gamma(s));
    fc.a_s = std::exp((1.0 - 2.0 * s) * std::log(2.0) + ln_gamma(1.0 - s) - ln_gamma(s));
    const double g = ln_gamma(1.0 + s);
    fc.gamma_1ps_sq = std::exp(2.0 * g);
    return fc;
}

}  // namespace fraclab::specfun
