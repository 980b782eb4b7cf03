#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fraclab/kernel.hpp"
#include "fraclab/specfun.hpp"

namespace fraclab::disc {

/// Problem parameters.  s = 1 is admitted only for the classical Bessel
/// reference path, never for fractional assembly.
struct Params {
    int N = 1;
    double s = 0.5;
    int n_basis = 48;
    int quad_order = 0;        // 0: derived as n_basis + 16
    double sign_eps = 1e-8;    // relative threshold for sign decisions

    Params() = default;
    Params(int N_, double s_, int n_basis_ = 48, int quad_order_ = 0, double sign_eps_ = 1e-8)
        : N(N_), s(s_), n_basis(n_basis_), quad_order(quad_order_), sign_eps(sign_eps_) {
        validate();
    }

    static constexpr int kMaxBasis = 512;

    void validate() {
        if (N < 1) throw std::domain_error("Params: N >= 1 required");
        if (!(s > 0.0 && s <= 1.0)) throw std::domain_error("Params: s in (0,1] required");
        if (n_basis < 1 || n_basis > kMaxBasis)
            throw std::domain_error("Params: n_basis must lie in [1, 512]");
        if (quad_order == 0) quad_order = n_basis + 16;
        if (quad_order < n_basis + 4)
            throw std::domain_error("Params: quad_order >= n_basis + 4 required");
        if (!(sign_eps > 0.0 && sign_eps < 1.0))
            throw std::domain_error("Params: sign_eps in (0,1) required");
    }

    double jacobi_beta() const { return 0.5 * N - 1.0; }
    void require_fractional() const {
        if (s >= 1.0)
            throw std::domain_error("s = 1 is reserved for the classical reference path");
    }
};

/// Critical fractional Sobolev exponent 2*_s (infinity encoded as +inf).
inline double critical_exponent(int N, double s) {
    if (2.0 * s < N) return 2.0 * N / (N - 2.0 * s);
    return std::numeric_limits<double>::infinity();
}

namespace detail {

/// Values of Jacobi polynomials P_0..P_{n-1}^{(alpha,beta)} at z.
inline void jacobi_values(double alpha, double beta, double z, int n, double* out) {
    if (n <= 0) return;
    out[0] = 1.0;
    if (n == 1) return;
    out[1] = 0.5 * (alpha - beta + (alpha + beta + 2.0) * z);
    for (int k = 2; k < n; ++k) {
        const double a = 2.0 * k * (k + alpha + beta) * (2.0 * k + alpha + beta - 2.0);
        const double b = (2.0 * k + alpha + beta - 1.0) *
                         (alpha * alpha - beta * beta +
                          z * (2.0 * k + alpha + beta) * (2.0 * k + alpha + beta - 2.0));
        const double c =
            2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + alpha + beta);
        out[k] = (b * out[k - 1] - c * out[k - 2]) / a;
    }
}

inline std::vector<double> jacobi_values(double alpha, double beta, double z, int n) {
    std::vector<double> v(n);
    jacobi_values(alpha, beta, z, n, v.data());
    return v;
}

/// P_n^{(alpha,beta)}(1) = binom(n+alpha, n)
inline double jacobi_at_one(double alpha, int n) {
    return std::exp(specfun::ln_gamma(n + alpha + 1.0) - specfun::ln_gamma(alpha + 1.0) -
                    std::lgamma(n + 1.0));
}

/// Squared weighted L2 norm of P_n^{(alpha,beta)} on (-1,1).
inline double jacobi_norm_sq(double alpha, double beta, int n) {
    return std::exp((alpha + beta + 1.0) * std::log(2.0) + specfun::ln_gamma(n + alpha + 1.0) +
                    specfun::ln_gamma(n + beta + 1.0) - specfun::ln_gamma(n + alpha + beta + 1.0) -
                    std::lgamma(n + 1.0)) /
           (2.0 * n + alpha + beta + 1.0);
}

}  // namespace detail

/// Radial element of the Dirichlet space, represented in the basis
/// phi_n(r) = (1-r^2)_+^s P_n^{(s, N/2-1)}(2r^2-1).
struct RadialFunction {
    Eigen::VectorXd coeffs;
    Params params;
};

/// phi_n(r); identically zero for r >= 1.
inline double basis_eval(int n, double r, const Params& params) {
    if (n < 0 || n >= params.n_basis) throw std::domain_error("basis_eval: index out of range");
    if (r >= 1.0) return 0.0;
    const double z = 2.0 * r * r - 1.0;
    std::vector<double> P(n + 1);
    detail::jacobi_values(params.s, params.jacobi_beta(), z, n + 1, P.data());
    return std::pow(1.0 - r * r, params.s) * P[n];
}

/// u(r) from spectral coefficients; exactly zero for r >= 1.
inline double evaluate(const RadialFunction& u, double r) {
    if (r >= 1.0) return 0.0;
    const double z = 2.0 * r * r - 1.0;
    const int n = static_cast<int>(u.coeffs.size());
    double P[Params::kMaxBasis];
    detail::jacobi_values(u.params.s, u.params.jacobi_beta(), z, n, P);
    double g = 0.0;
    for (int k = 0; k < n; ++k) g += u.coeffs[k] * P[k];
    return std::pow(1.0 - r * r, u.params.s) * g;
}

inline kernel::RadialProfile to_profile(const RadialFunction& u) {
    return {[u](double r) { return evaluate(u, r); },
            kernel::RadialProfile::Smoothness::analytic};
}

/// Pointwise (-Lap)^s u inside B, from the diagonal eigenrelation:
/// (-Lap)^s phi_n = mu_n P_n^{(s,N/2-1)}(2r^2-1) on B.
inline double frac_laplacian_eval(const RadialFunction& u, double r);

/// mu_n = 2^{2s} Gamma(1+s+n) Gamma(N/2+s+n) / (n! Gamma(N/2+n))
inline double mu_coefficient(int n, const Params& params) {
    const double s = params.s;
    const double hN = 0.5 * params.N;
    return std::exp(2.0 * s * std::log(2.0) + specfun::ln_gamma(1.0 + s + n) +
                    specfun::ln_gamma(hN + s + n) - std::lgamma(n + 1.0) -
                    specfun::ln_gamma(hN + n));
}

/// A_nn = [phi_n, phi_n]_s = mu_n h_n; the basis is exactly orthogonal in
/// the fractional form, [phi_m, phi_n]_s = 0 for m != n.
inline double stiffness_coefficient(int n, const Params& params) {
    params.require_fractional();
    if (n < 0 || n >= params.n_basis)
        throw std::domain_error("stiffness_coefficient: index out of range");
    const double h_n = specfun::sphere_area(params.N) *
                       std::pow(2.0, -params.s - 0.5 * params.N - 1.0) *
                       detail::jacobi_norm_sq(params.s, params.jacobi_beta(), n);
    return mu_coefficient(n, params) * h_n;
}

inline double frac_laplacian_eval(const RadialFunction& u, double r) {
    if (r >= 1.0)
        throw std::domain_error("frac_laplacian_eval: closed form valid inside B only");
    const double z = 2.0 * r * r - 1.0;
    const int n = static_cast<int>(u.coeffs.size());
    std::vector<double> P(n);
    detail::jacobi_values(u.params.s, u.params.jacobi_beta(), z, n, P.data());
    double g = 0.0;
    for (int k = 0; k < n; ++k) g += u.coeffs[k] * mu_coefficient(k, u.params) * P[k];
    return g;
}

/// Radial potential with a monotonicity certificate.  When the structured
/// form V(r) = (1-r^2)^weight_exp * smooth(r) is supplied, assembly absorbs
/// the boundary factor into the quadrature weight exactly.
struct PotentialProfile {
    std::function<double(double)> eval;
    bool monotone_nondecreasing = false;
    bool bounded = true;
    std::vector<double> breakpoints;  // interior discontinuities, ascending
    double weight_exp = 0.0;
    std::function<double(double)> smooth_eval;  // set iff weight_exp path is used

    double operator()(double r) const { return eval(r); }

    static PotentialProfile zero() {
        return {[](double) { return 0.0; }, true, true, {}, 0.0, nullptr};
    }
    static PotentialProfile constant(double c) {
        return {[c](double) { return c; }, true, true, {}, 0.0, nullptr};
    }
};

/// Assembled Galerkin operator: diagonal fractional stiffness, mass matrix,
/// optional potential matrix.
struct SpectralOperator {
    Eigen::VectorXd stiffness_diag;
    Eigen::MatrixXd mass;
    std::optional<Eigen::MatrixXd> potential;
    Params params;

    Eigen::MatrixXd lhs() const {
        Eigen::MatrixXd A = stiffness_diag.asDiagonal();
        if (potential) A += *potential;
        return A;
    }
};

namespace detail {

/// int_{-1}^1 (1-z)^{a} (1+z)^{b} g(z) dz with panel splits at the images of
/// interior breakpoints; endpoint panels keep the singular weight exact.
inline double weighted_z_integral(double a, double b, const std::function<double(double)>& g,
                                  const std::vector<double>& z_breaks, int order) {
    std::vector<double> edges{-1.0};
    for (double zb : z_breaks)
        if (zb > -1.0 + 1e-14 && zb < 1.0 - 1e-14) edges.push_back(zb);
    edges.push_back(1.0);

    double total = 0.0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double lo = edges[p], hi = edges[p + 1];
        const bool at_left = (p == 0), at_right = (p + 2 == edges.size());
        if (at_left && at_right) {
            const auto rule = specfun::gauss_jacobi(order, a, b);
            for (int i = 0; i < order; ++i) total += rule.weights[i] * g(rule.nodes[i]);
        } else if (at_right) {
            // map (lo,1): 1-z = (1-u)(1-lo)/2 keeps the (1-z)^a factor exact
            const auto rule = specfun::gauss_jacobi(order, a, 0.0);
            const double half = 0.5 * (1.0 - lo);
            const double scale = std::pow(half, a + 1.0);
            for (int i = 0; i < order; ++i) {
                const double z = 1.0 - (1.0 - rule.nodes[i]) * half;
                total += scale * rule.weights[i] * std::pow(1.0 + z, b) * g(z);
            }
        } else if (at_left) {
            const auto rule = specfun::gauss_jacobi(order, 0.0, b);
            const double half = 0.5 * (hi + 1.0);
            const double scale = std::pow(half, b + 1.0);
            for (int i = 0; i < order; ++i) {
                const double z = -1.0 + (1.0 + rule.nodes[i]) * half;
                total += scale * rule.weights[i] * std::pow(1.0 - z, a) * g(z);
            }
        } else {
            const auto rule = specfun::gauss_legendre(order, lo, hi);
            for (int i = 0; i < order; ++i) {
                const double z = rule.nodes[i];
                total += rule.weights[i] * std::pow(1.0 - z, a) * std::pow(1.0 + z, b) * g(z);
            }
        }
    }
    return total;
}

}  // namespace detail

/// int_B f dx for radial f given as f(r) = (1-r^2)^{wexp} g(2r^2-1):
/// |S^{N-1}| 2^{-wexp-N/2-1} int (1-z)^{wexp} (1+z)^{N/2-1} g dz.
inline double radial_integral(const Params& params, double wexp,
                              const std::function<double(double)>& g_of_z, int order = 0) {
    if (order == 0) order = params.quad_order;
    const double pref = specfun::sphere_area(params.N) *
                        std::pow(2.0, -wexp - 0.5 * params.N - 1.0);
    return pref * detail::weighted_z_integral(wexp, params.jacobi_beta(), g_of_z, {}, order);
}

/// int_B u dx in closed form (only the P_0 coefficient survives).
inline double integral(const RadialFunction& u) {
    return u.coeffs[0] * specfun::sphere_area(u.params.N) *
           std::exp(specfun::ln_beta(u.params.s + 1.0, 0.5 * u.params.N)) / 2.0;
}

/// Galerkin matrices.  Mass uses the Gauss-Jacobi rule with weight exponent
/// 2s (exact for the polynomial part); potentials route through the same
/// rule, with breakpoint splitting and the structured boundary-weight path.
inline SpectralOperator assemble(const Params& params_in,
                                 const std::optional<PotentialProfile>& V = std::nullopt) {
    Params params = params_in;
    params.validate();
    params.require_fractional();
    const int nb = params.n_basis;
    const double s = params.s;
    const double beta = params.jacobi_beta();
    const double SN = specfun::sphere_area(params.N);

    SpectralOperator op;
    op.params = params;
    op.stiffness_diag.resize(nb);
    for (int n = 0; n < nb; ++n) op.stiffness_diag[n] = stiffness_coefficient(n, params);

    const int q = params.quad_order;
    const auto mass_rule = specfun::gauss_jacobi(q, 2.0 * s, beta);
    Eigen::MatrixXd Pv(q, nb);
    for (int i = 0; i < q; ++i) {
        std::vector<double> vals(nb);
        detail::jacobi_values(s, beta, mass_rule.nodes[i], nb, vals.data());
        for (int n = 0; n < nb; ++n) Pv(i, n) = vals[n];
    }

    const double mass_pref = SN * std::pow(2.0, -2.0 * s - 0.5 * params.N - 1.0);
    Eigen::VectorXd wq(q);
    for (int i = 0; i < q; ++i) wq[i] = mass_rule.weights[i];
    op.mass = mass_pref * Pv.transpose() * wq.asDiagonal() * Pv;
    op.mass = 0.5 * (op.mass + op.mass.transpose()).eval();

    if (V) {
        const double wexp = V->smooth_eval ? V->weight_exp : 0.0;
        const auto& feval = V->smooth_eval ? V->smooth_eval : V->eval;
        std::vector<double> z_breaks;
        for (double rb : V->breakpoints) z_breaks.push_back(2.0 * rb * rb - 1.0);

        const double total_exp = 2.0 * s + wexp;
        const double pot_pref = SN * std::pow(2.0, -total_exp - 0.5 * params.N - 1.0);
        Eigen::MatrixXd Pm(nb, nb);
        Pm.setZero();
        std::vector<double> edges{-1.0};
        for (double zb : z_breaks)
            if (zb > -1.0 + 1e-14 && zb < 1.0 - 1e-14) edges.push_back(zb);
        edges.push_back(1.0);
        auto accumulate = [&](double z, double wz) {
            const double r = std::sqrt(0.5 * (1.0 + z));
            const double v = feval(r);
            if (!std::isfinite(v))
                throw std::runtime_error("assemble: potential not finite at node r = " +
                                         std::to_string(r));
            std::vector<double> vals(nb);
            detail::jacobi_values(s, beta, z, nb, vals.data());
            for (int m = 0; m < nb; ++m)
                for (int n = m; n < nb; ++n) Pm(m, n) += wz * v * vals[m] * vals[n];
        };
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            const double lo = edges[p], hi = edges[p + 1];
            const bool at_left = (p == 0), at_right = (p + 2 == edges.size());
            if (at_left && at_right) {
                const auto rule = specfun::gauss_jacobi(q, total_exp, beta);
                for (int i = 0; i < q; ++i) accumulate(rule.nodes[i], rule.weights[i]);
            } else if (at_right) {
                const auto rule = specfun::gauss_jacobi(q, total_exp, 0.0);
                const double half = 0.5 * (1.0 - lo);
                const double scale = std::pow(half, total_exp + 1.0);
                for (int i = 0; i < q; ++i) {
                    const double z = 1.0 - (1.0 - rule.nodes[i]) * half;
                    accumulate(z, scale * rule.weights[i] * std::pow(1.0 + z, beta));
                }
            } else if (at_left) {
                const auto rule = specfun::gauss_jacobi(q, 0.0, beta);
                const double half = 0.5 * (hi + 1.0);
                const double scale = std::pow(half, beta + 1.0);
                for (int i = 0; i < q; ++i) {
                    const double z = -1.0 + (1.0 + rule.nodes[i]) * half;
                    accumulate(z, scale * rule.weights[i] * std::pow(1.0 - z, total_exp));
                }
            } else {
                const auto rule = specfun::gauss_legendre(q, lo, hi);
                for (int i = 0; i < q; ++i) {
                    const double z = rule.nodes[i];
                    accumulate(z, rule.weights[i] * std::pow(1.0 - z, total_exp) *
                                      std::pow(1.0 + z, beta));
                }
            }
        }
        Pm *= pot_pref;
        for (int m = 0; m < nb; ++m)
            for (int n = 0; n < m; ++n) Pm(m, n) = Pm(n, m);
        op.potential = Pm;
    }
    return op;
}

/// Closed-form boundary trace quotient psi_u(1) = lim u(r)/(1-r)^s
///                                            = 2^s sum_n c_n binom(n+s, n).
inline double trace_psi(const RadialFunction& u) {
    double acc = 0.0;
    for (int n = 0; n < static_cast<int>(u.coeffs.size()); ++n)
        acc += u.coeffs[n] * detail::jacobi_at_one(u.params.s, n);
    return std::pow(2.0, u.params.s) * acc;
}

/// Residual of the bilinear boundary identity on a basis pair (m,n):
///   int_B (x.grad phi_m)(-Lap)^s phi_n + int_B (x.grad phi_n)(-Lap)^s phi_m
///   = -Gamma(1+s)^2 int_{dB} psi_m psi_n dsigma - (N-2s) [phi_m, phi_n]_s
/// returned as |LHS - RHS| / (1 + |RHS|).
inline double pohozaev_bilinear_check(int m, int n, const Params& params) {
    params.require_fractional();
    const double s = params.s;
    const double beta = params.jacobi_beta();
    const double SN = specfun::sphere_area(params.N);
    const int q = params.quad_order;
    const int nb = std::max(m, n) + 1;

    // x.grad phi_m = r d/dr [ (1-r^2)^s P_m(2r^2-1) ]
    //             = -2s r^2 (1-r^2)^{s-1} P_m + 4 r^2 (1-r^2)^s P_m'
    // against mu_n P_n and the r^{N-1} measure; both pieces are exact
    // Gauss-Jacobi integrals after z = 2r^2-1.
    auto lhs_half = [&](int mm, int nn) {
        const double mu = mu_coefficient(nn, params);
        // piece 1: -2s int (1-r^2)^{s-1} P_m P_n r^{N+1} dr
        const auto rule1 = specfun::gauss_jacobi(q, s - 1.0, beta + 1.0);
        double I1 = 0.0;
        for (int i = 0; i < q; ++i) {
            std::vector<double> vals(nb);
            detail::jacobi_values(s, beta, rule1.nodes[i], nb, vals.data());
            I1 += rule1.weights[i] * vals[mm] * vals[nn];
        }
        I1 *= std::pow(2.0, -(s - 1.0) - 0.5 * params.N - 2.0);
        // piece 2: 4 int (1-r^2)^s P_m' P_n r^{N+1} dr, with
        // d/dz P_m^{(a,b)} = (m+a+b+1)/2 P_{m-1}^{(a+1,b+1)}
        double I2 = 0.0;
        if (mm >= 1) {
            const auto rule2 = specfun::gauss_jacobi(q, s, beta + 1.0);
            const double dcoef = 0.5 * (mm + s + beta + 1.0);
            for (int i = 0; i < q; ++i) {
                std::vector<double> dvals(mm), vals(nb);
                detail::jacobi_values(s + 1.0, beta + 1.0, rule2.nodes[i], mm, dvals.data());
                detail::jacobi_values(s, beta, rule2.nodes[i], nb, vals.data());
                I2 += rule2.weights[i] * dcoef * dvals[mm - 1] * vals[nn];
            }
            I2 *= 4.0 * std::pow(2.0, -s - 0.5 * params.N - 2.0);
        }
        return SN * mu * (-2.0 * s * I1 + I2);
    };

    const double lhs = lhs_half(m, n) + lhs_half(n, m);

    const double g1s = specfun::frac_constants(params.N, s).gamma_1ps_sq;
    const double psi_m = std::pow(2.0, s) * detail::jacobi_at_one(s, m);
    const double psi_n = std::pow(2.0, s) * detail::jacobi_at_one(s, n);
    const double boundary = g1s * SN * psi_m * psi_n;
    const double form_mn = (m == n) ? stiffness_coefficient(m, params) : 0.0;
    const double rhs = -boundary - (params.N - 2.0 * s) * form_mn;

    return std::abs(lhs - rhs) / (1.0 + std::abs(rhs));
}

/// Classical (s = 1) radial Dirichlet eigenvalue of -Lap on B: j_{N/2-1,k}^2.
inline double classical_radial_eigenvalue(int N, int k) {
    if (N == 1) {
        const double z = (k - 0.5) * M_PI;  // j_{-1/2,k}
        return z * z;
    }
    const double z = specfun::bessel_j_zero(0.5 * N - 1.0, k);
    return z * z;
}

}  // namespace fraclab::disc
