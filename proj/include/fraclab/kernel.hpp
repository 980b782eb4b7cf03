#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "fraclab/specfun.hpp"

namespace fraclab::kernel {

/// Radial function on [0,inf) vanishing identically for r >= 1.
struct RadialProfile {
    enum class Smoothness { grid, analytic };
    std::function<double(double)> eval;
    Smoothness tag = Smoothness::analytic;

    double operator()(double r) const { return eval(r); }
};

namespace detail {

/// Precomputed evaluation of F((N+2s)/2, s+1; N/2; x) for fixed (N,s).
/// After the Euler transform F = (1-x)^{-1-2s} G(x) with
/// G = 2F1(-s, N/2-s-1; N/2; x), whose series coefficients are cached; the
/// x > 3/4 regime uses the 1-x connection (or its logarithmic variant at
/// s = 1/2) with cached coefficient arrays, so a call is a short fused loop.
class ThetaHyp {
public:
    ThetaHyp(int N, double s) : s_(s) {
        const double a = 0.5 * N - s - 1.0;  // transformed numerator pair (-s, a)
        const double b = -s;
        const double c = 0.5 * N;
        fill_series(g_, b, a, c);
        // a nonpositive-integer numerator parameter terminates the series,
        // which is then exact on all of [0,1)
        terminating_ = (a <= 1e-12 && std::abs(a - std::round(a)) < 1e-12) ||
                       (b <= 1e-12 && std::abs(b - std::round(b)) < 1e-12);
        if (terminating_) return;
        const double d = 1.0 + 2.0 * s;  // c - b - a
        const double m = std::round(d);
        log_case_ = std::abs(d - m) < 1e-9;
        if (!log_case_) {
            const auto [lc, sc] = specfun::lgamma_signed(c);
            const auto [ld, sd] = specfun::lgamma_signed(d);
            const auto [lca, sca] = specfun::lgamma_signed(c - b);
            const auto [lcb, scb] = specfun::lgamma_signed(c - a);
            const auto [lmd, smd] = specfun::lgamma_signed(-d);
            const auto [la, sa] = specfun::lgamma_signed(b);
            const auto [lb, sb] = specfun::lgamma_signed(a);
            C1_ = sc * sd / (sca * scb) * std::exp(lc + ld - lca - lcb);
            C2_ = sc * smd / (sa * sb) * std::exp(lc + lmd - la - lb);
            d_ = d;
            fill_series(p_, b, a, b + a - c + 1.0);
            fill_series(q_, c - b, c - a, d + 1.0);
        } else {
            m_ = static_cast<int>(m);
            const auto [la, sa] = specfun::lgamma_signed(b);
            const auto [lb, sb] = specfun::lgamma_signed(a);
            const auto [lc, sc] = specfun::lgamma_signed(c);
            const auto [lam, sam] = specfun::lgamma_signed(b + m_);
            const auto [lbm, sbm] = specfun::lgamma_signed(a + m_);
            C1_ = sc / (sam * sbm) *
                  std::exp(std::lgamma(static_cast<double>(m_)) + lc - lam - lbm);
            const double sign_m = (m_ % 2 == 0) ? 1.0 : -1.0;
            C2_ = sign_m * sc / (sa * sb) * std::exp(lc - la - lb);
            // finite part
            fin_.resize(m_);
            double t = 1.0;
            for (int n = 0; n < m_; ++n) {
                if (n > 0)
                    t *= (b + n - 1.0) * (a + n - 1.0) /
                         ((n - static_cast<double>(m_)) * n);
                fin_[n] = t;
            }
            // log series terms and digamma brackets
            tlog_.resize(kTerms);
            hlog_.resize(kTerms);
            double t2 = std::exp(-std::lgamma(m_ + 1.0));
            double ps1 = specfun::digamma(1.0), ps1m = specfun::digamma(m_ + 1.0);
            double psa = specfun::digamma(b + m_), psb = specfun::digamma(a + m_);
            for (int n = 0; n < kTerms; ++n) {
                if (n > 0) {
                    t2 *= (b + m_ + n - 1.0) * (a + m_ + n - 1.0) /
                          (n * (n + static_cast<double>(m_)));
                    ps1 += 1.0 / n;
                    ps1m += 1.0 / (m_ + n);
                    psa += 1.0 / (b + m_ + n - 1.0);
                    psb += 1.0 / (a + m_ + n - 1.0);
                }
                tlog_[n] = t2;
                hlog_[n] = -ps1 - ps1m + psa + psb;
            }
        }
    }

    double operator()(double x) const {
        const double euler = std::pow(1.0 - x, -1.0 - 2.0 * s_);
        if (terminating_ || x <= 0.75) return euler * eval_series(g_, x);
        const double y = 1.0 - x;
        if (!log_case_)
            return euler * (C1_ * eval_series(p_, y) +
                            C2_ * std::pow(y, d_) * eval_series(q_, y));
        const double ln_y = std::log(y);
        double S1 = 0.0, yk = 1.0;
        for (int n = 0; n < m_; ++n) {
            S1 += fin_[n] * yk;
            yk *= y;
        }
        double S2 = 0.0;
        yk = 1.0;
        for (int n = 0; n < kTerms; ++n) {
            const double dS = tlog_[n] * (ln_y + hlog_[n]) * yk;
            S2 += dS;
            if (n > 4 && std::abs(dS) <= 1e-17 * std::abs(S2)) break;
            yk *= y;
        }
        return euler * (C1_ * S1 - C2_ * std::pow(y, m_) * S2);
    }

private:
    static constexpr int kTerms = 420;
    double s_;
    bool terminating_ = false;
    bool log_case_ = false;
    int m_ = 0;
    double C1_ = 0.0, C2_ = 0.0, d_ = 0.0;
    std::vector<double> g_, p_, q_, fin_, tlog_, hlog_;

    static void fill_series(std::vector<double>& coeffs, double a, double b, double c) {
        coeffs.resize(kTerms);
        double t = 1.0;
        for (int n = 0; n < kTerms; ++n) {
            coeffs[n] = t;
            t *= (a + n) * (b + n) / ((c + n) * (n + 1.0));
        }
    }
    static double eval_series(const std::vector<double>& coeffs, double x) {
        double sum = 0.0, xk = 1.0;
        for (std::size_t n = 0; n < coeffs.size(); ++n) {
            const double dS = coeffs[n] * xk;
            sum += dS;
            if (n > 4 && std::abs(dS) <= 1e-17 * std::abs(sum)) break;
            xk *= x;
        }
        return sum;
    }
};

inline std::shared_ptr<const ThetaHyp> theta_hyp(int N, double s) {
    static std::mutex mtx;
    static std::map<std::pair<int, long long>, std::shared_ptr<const ThetaHyp>> cache;
    const std::pair<int, long long> key{N, static_cast<long long>(std::llround(s * 1e12))};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto ev = std::make_shared<const ThetaHyp>(N, s);
    cache.emplace(key, ev);
    return ev;
}

}  // namespace detail

/// Spherical average of the Riesz kernel: Theta_N(r,rho) =
/// int_{S^{N-1}} |r e_1 - rho y|^{-N-2s} dsigma(y), for 0 <= r < rho.
/// For N = 1 this is the two-point sum; for N > 1 it reduces to
/// |S^{N-1}| rho^{-N-2s} 2F1((N+2s)/2, s+1; N/2; r^2/rho^2).
inline double theta(int N, double s, double r, double rho) {
    if (!(r >= 0.0) || !(r < rho))
        throw std::domain_error("theta: requires 0 <= r < rho");
    if (N == 1) {
        const double e = -1.0 - 2.0 * s;
        return std::pow(rho - r, e) + std::pow(rho + r, e);
    }
    const double t2 = (r / rho) * (r / rho);
    thread_local std::shared_ptr<const detail::ThetaHyp> ev;
    thread_local int ev_N = 0;
    thread_local double ev_s = -1.0;
    if (ev_N != N || ev_s != s) {
        ev = detail::theta_hyp(N, s);
        ev_N = N;
        ev_s = s;
    }
    return specfun::sphere_area(N) * std::pow(rho, -(N + 2.0 * s)) * (*ev)(t2);
}

namespace detail {

// sum_k ((N+2s)/2)_k (s+1)_k / (k! (N/2)_k) r^{2k} T^{-2s-2k} / (2s+2k),
// the termwise-integrated hypergeometric tail of int_T^inf Theta rho^{N-1} drho
inline double theta_tail_integral(int N, double s, double r, double T) {
    const double a = 0.5 * (N + 2.0 * s), b = s + 1.0, c = 0.5 * N;
    const double q = (r / T) * (r / T);
    double coeff = 1.0, sum = 0.0;
    double Tp = std::pow(T, -2.0 * s);
    for (int k = 0; k < 200; ++k) {
        const double term = coeff * Tp / (2.0 * s + 2.0 * k);
        sum += term;
        if (k > 2 && std::abs(term) < 1e-18 * std::abs(sum)) break;
        coeff *= (a + k) * (b + k) / ((c + k) * (k + 1.0));
        Tp *= q;  // advances r^{2k} T^{-2s-2k}
    }
    return specfun::sphere_area(N) * sum;
}

}  // namespace detail

/// Exterior contribution of the Gagliardo form for the unit ball:
/// kappa(r) = c_{N,s} int_{rho > 1} Theta_N(r,rho) rho^{N-1} drho, 0 <= r < 1.
inline double killing_potential(int N, double s, double r) {
    if (!(r >= 0.0 && r < 1.0))
        throw std::domain_error("killing_potential: requires 0 <= r < 1");
    const double cNs = specfun::frac_constants(N, s).c_Ns;

    double integral = 0.0;
    auto add_panel = [&](double lo, double hi, int g) {
        const auto rule = specfun::gauss_legendre(g, lo, hi);
        for (int i = 0; i < g; ++i) {
            const double rho = rule.nodes[i];
            integral += rule.weights[i] * theta(N, s, r, rho) * std::pow(rho, N - 1);
        }
    };

    // near panels resolve the (rho - r)^{-1-2s} peak at scale 1-r,
    // then panels doubling in distance from r out to the series tail
    const double d = 1.0 - r;
    add_panel(1.0, 1.0 + 0.5 * d, 16);
    add_panel(1.0 + 0.5 * d, 1.0 + d, 16);
    double lo = 1.0 + d;
    const double T = 16.0;
    while (lo < T) {
        const double hi = std::min(r + 2.0 * (lo - r), T);
        add_panel(lo, hi, 16);
        lo = hi;
    }
    integral += detail::theta_tail_integral(N, s, r, T);
    return cNs * integral;
}

/// Precomputed quadrature mesh for the radial Gagliardo form on (0,1)^2.
/// The diagonal |r-rho|^{1-2s} product singularity is handled by dyadically
/// graded panels toward rho = r; boundary kinks by grading toward 1.
/// Normalization: [v,w]_s = (c_{N,s}/2) * double integral, the convention
/// consistent with the Fourier representation and with int v (-Lap)^s w.
class OracleGrid {
public:
    OracleGrid(int N, double s, int resolution) : N_(N), s_(s) {
        if (resolution < 1) throw std::domain_error("OracleGrid: resolution >= 1");
        const double half_cNs = 0.5 * specfun::frac_constants(N, s).c_Ns;
        const double SN = specfun::sphere_area(N);
        const int g_out = std::max(4, resolution / 2);
        const int g_in = std::max(6, resolution / 2);
        const int levels_bdry = 26;
        // relative diagonal truncation ~ 2^{-L(2-2s)}
        const int levels_diag =
            std::min(300, std::max(24, static_cast<int>(std::ceil(26.0 / (2.0 - 2.0 * s))) + 6));

        std::vector<double> edges{0.0, 0.5};
        for (int j = 1; j <= levels_bdry; ++j) edges.push_back(1.0 - std::pow(0.5, j + 1));

        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            const auto outer = specfun::gauss_legendre(g_out, edges[p], edges[p + 1]);
            for (int i = 0; i < g_out; ++i) {
                const double r = outer.nodes[i];
                const double wr = outer.weights[i];
                outer_r_.push_back(r);
                kill_w_.push_back(SN * wr * killing_potential(N, s, r) * std::pow(r, N - 1));
                row_ptr_.push_back(static_cast<int>(inner_rho_.size()));

                auto add_inner = [&](double lo, double hi) {
                    if (!(hi > lo) || !(lo > r)) return;
                    const auto in = specfun::gauss_legendre(g_in, lo, hi);
                    for (int q = 0; q < g_in; ++q) {
                        const double rho = in.nodes[q];
                        if (!(rho > r)) continue;
                        const double J = half_cNs * SN * std::pow(r, N - 1) *
                                         std::pow(rho, N - 1) * theta(N, s, r, rho);
                        inner_rho_.push_back(rho);
                        inner_w_.push_back(wr * in.weights[q] * J);
                    }
                };
                const double mid = 0.5 * (r + 1.0);
                double width = (mid - r);
                // graded toward the diagonal; sliver below double resolution dropped
                for (int l = 0; l < levels_diag && width > 4e-16 * (r + 0.25); ++l) {
                    add_inner(r + 0.5 * width, r + width);
                    width *= 0.5;
                }
                // graded toward the exterior boundary
                width = 1.0 - mid;
                for (int l = 0; l < levels_bdry; ++l) {
                    add_inner(1.0 - width, 1.0 - 0.5 * width);
                    width *= 0.5;
                }
            }
        }
        row_ptr_.push_back(static_cast<int>(inner_rho_.size()));
    }

    int N_dim() const { return N_; }
    double order() const { return s_; }

    double form(const RadialProfile& v, const RadialProfile& w) const {
        double interior = 0.0, exterior = 0.0;
        for (std::size_t i = 0; i < outer_r_.size(); ++i) {
            const double r = outer_r_[i];
            const double vr = v(r), wr = w(r);
            double row = 0.0;
            for (int j = row_ptr_[i]; j < row_ptr_[i + 1]; ++j) {
                const double rho = inner_rho_[j];
                row += inner_w_[j] * (vr - v(rho)) * (wr - w(rho));
            }
            interior += row;
            exterior += kill_w_[i] * vr * wr;
        }
        return 2.0 * interior + exterior;
    }

private:
    int N_;
    double s_;
    std::vector<double> outer_r_, kill_w_;
    std::vector<double> inner_rho_, inner_w_;
    std::vector<int> row_ptr_;
};

inline std::shared_ptr<const OracleGrid> oracle_grid(int N, double s, int resolution = 16) {
    static std::mutex mtx;
    static std::map<std::tuple<int, std::int64_t, int>, std::shared_ptr<const OracleGrid>> cache;
    const std::tuple<int, std::int64_t, int> key{
        N, static_cast<std::int64_t>(std::llround(s * 1e12)), resolution};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto grid = std::make_shared<const OracleGrid>(N, s, resolution);
    cache.emplace(key, grid);
    return grid;
}

/// Slow trusted evaluation of [v,w]_s for radial profiles supported in the
/// unit ball, via the Theta_N reduction.  Independent of the spectral path.
inline double oracle_form(const RadialProfile& v, const RadialProfile& w, int N, double s,
                          int resolution = 16) {
    for (double r : {1.0, 1.0 + 1e-9, 1.5, 10.0}) {
        if (v(r) != 0.0 || w(r) != 0.0)
            throw std::invalid_argument("oracle_form: profiles must vanish for r >= 1");
    }
    return oracle_grid(N, s, resolution)->form(v, w);
}

}  // namespace fraclab::kernel
