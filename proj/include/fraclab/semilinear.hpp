#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fraclab/discretization.hpp"
#include "fraclab/eigensolver.hpp"

namespace fraclab::semi {

/// Ground state of (-Lap)^s u + lambda u = u^p on B with diagnostics.
struct GroundState {
    disc::RadialFunction u;
    double lambda = 0.0;
    double p = 2.0;
    double energy_level = 0.0;
    double psi_u1 = 0.0;
    double sigma1 = std::numeric_limits<double>::quiet_NaN();
    double sigma2 = std::numeric_limits<double>::quiet_NaN();
    double pohozaev_residual = std::numeric_limits<double>::quiet_NaN();
    double nondeg_margin = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::infinity();  // relative PDE residual
    bool converged = false;
};

namespace detail {

/// Quadrature order for the non-polynomial u^p integrands.
inline int nonlinear_order(const disc::Params& params) {
    return std::max(params.quad_order, 2 * params.n_basis + 16);
}

/// g(z) = sum_k c_k P_k^{(s,beta)}(z) at the nodes of a (s(p+1), beta) rule,
/// cached together with the basis values.
struct NonlinearQuad {
    specfun::QuadRule rule;
    Eigen::MatrixXd basis;  // (node, k)
    double pref = 0.0;      // |S^{N-1}| 2^{-s(p+1)-N/2-1}

    NonlinearQuad(const disc::Params& params, double p) {
        const int q = nonlinear_order(params);
        const double wexp = params.s * (p + 1.0);
        rule = specfun::gauss_jacobi(q, wexp, params.jacobi_beta());
        basis.resize(q, params.n_basis);
        for (int i = 0; i < q; ++i) {
            std::vector<double> vals(params.n_basis);
            disc::detail::jacobi_values(params.s, params.jacobi_beta(), rule.nodes[i],
                                        params.n_basis, vals.data());
            for (int k = 0; k < params.n_basis; ++k) basis(i, k) = vals[k];
        }
        pref = specfun::sphere_area(params.N) *
               std::pow(2.0, -wexp - 0.5 * params.N - 1.0);
    }

    Eigen::VectorXd g_at_nodes(const Eigen::VectorXd& c) const { return basis * c; }

    /// int_B |u|^{p+1} dx
    double norm_powp1(const Eigen::VectorXd& c, double p) const {
        const Eigen::VectorXd g = g_at_nodes(c);
        double acc = 0.0;
        for (int i = 0; i < g.size(); ++i)
            acc += rule.weights[i] * std::pow(std::abs(g[i]), p + 1.0);
        return pref * acc;
    }

    /// b_m = int_B |u|^{p-1} u phi_m dx
    Eigen::VectorXd rhs(const Eigen::VectorXd& c, double p) const {
        const Eigen::VectorXd g = g_at_nodes(c);
        Eigen::VectorXd wg(g.size());
        for (int i = 0; i < g.size(); ++i)
            wg[i] = rule.weights[i] * std::pow(std::abs(g[i]), p - 1.0) * g[i];
        return pref * basis.transpose() * wg;
    }

    /// L_mn = int_B |u|^{p-1} phi_m phi_n dx
    Eigen::MatrixXd linearized(const Eigen::VectorXd& c, double p) const {
        const Eigen::VectorXd g = g_at_nodes(c);
        Eigen::VectorXd wg(g.size());
        for (int i = 0; i < g.size(); ++i)
            wg[i] = rule.weights[i] * std::pow(std::abs(g[i]), p - 1.0);
        return pref * basis.transpose() * wg.asDiagonal() * basis;
    }
};

}  // namespace detail

/// Admissible exponent range: 1 < p < 2*_s - 1.
inline void check_exponent(int N, double s, double p) {
    const double pmax = disc::critical_exponent(N, s) - 1.0;
    if (!(p > 1.0) || !(p < pmax))
        throw std::invalid_argument("ground_state: p must lie in (1, " + std::to_string(pmax) +
                                    "), got " + std::to_string(p));
}

/// Structured linearized potential V = -p u^{p-1}, certified nondecreasing
/// when u is positive and radially decreasing.
inline disc::PotentialProfile linearized_potential(const GroundState& gs) {
    const auto u = gs.u;
    const double p = gs.p;
    const double s = u.params.s;
    auto smooth = [u, p](double r) {
        // u^{p-1} = (1-r^2)^{s(p-1)} g^{p-1}; this is the smooth factor
        const double z = 2.0 * r * r - 1.0;
        std::vector<double> vals(u.coeffs.size());
        disc::detail::jacobi_values(u.params.s, u.params.jacobi_beta(), z,
                                    static_cast<int>(u.coeffs.size()), vals.data());
        double g = 0.0;
        for (int k = 0; k < static_cast<int>(u.coeffs.size()); ++k) g += u.coeffs[k] * vals[k];
        return -p * std::pow(std::abs(g), p - 1.0);
    };
    disc::PotentialProfile V;
    V.weight_exp = s * (p - 1.0);
    V.smooth_eval = smooth;
    V.eval = [u, p, s, smooth](double r) {
        if (r >= 1.0) return 0.0;
        return std::pow(1.0 - r * r, s * (p - 1.0)) * smooth(r);
    };
    V.bounded = true;
    // certificate: -p u^{p-1} nondecreasing iff u nonincreasing
    bool dec = true;
    double prev = disc::evaluate(u, 0.0);
    for (int i = 1; i <= 256; ++i) {
        const double cur = disc::evaluate(u, static_cast<double>(i) / 257.0);
        if (cur > prev + 1e-12) dec = false;
        prev = cur;
    }
    V.monotone_nondecreasing = dec;
    return V;
}

/// Constrained minimization of c^T (A + lambda M) c on ||u_c||_{L^{p+1}} = 1
/// (projected gradient), rescaled to solve the PDE, then Newton-polished on
/// the discrete weak form K c = b(c).
inline GroundState ground_state(int N, double s, double p, double lambda,
                                const disc::Params& params_in,
                                const std::optional<Eigen::VectorXd>& init = std::nullopt) {
    disc::Params params = params_in;
    params.N = N;
    params.s = s;
    params.validate();
    params.require_fractional();
    check_exponent(N, s, p);
    if (lambda < 0.0) throw std::invalid_argument("ground_state: lambda >= 0 required");

    const auto op = disc::assemble(params);
    const Eigen::MatrixXd K =
        Eigen::MatrixXd(op.stiffness_diag.asDiagonal()) + lambda * op.mass;
    const detail::NonlinearQuad nq(params, p);
    const int nb = params.n_basis;

    Eigen::VectorXd c = init.value_or(Eigen::VectorXd::Unit(nb, 0));
    if (init && init->size() != nb)
        throw std::invalid_argument("ground_state: init has wrong dimension");
    c /= std::pow(nq.norm_powp1(c, p), 1.0 / (p + 1.0));

    // phase 1: projected gradient descent on the constraint manifold
    double eta = 0.5 / (op.stiffness_diag.maxCoeff() + lambda + 1.0);
    double Q = c.dot(K * c);
    for (int it = 0; it < 2000; ++it) {
        const Eigen::VectorXd Kc = K * c;
        const Eigen::VectorXd b = nq.rhs(c, p);
        const double m = c.dot(Kc);
        const Eigen::VectorXd grad = Kc - m * b;  // stationarity direction
        if (grad.norm() <= 1e-10 * (1.0 + Kc.norm())) break;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            Eigen::VectorXd cn = c - eta * grad;
            cn /= std::pow(nq.norm_powp1(cn, p), 1.0 / (p + 1.0));
            const double Qn = cn.dot(K * cn);
            if (Qn < Q - 1e-16 * std::abs(Q)) {
                c = cn;
                Q = Qn;
                eta *= 1.25;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;
    }

    // the functional is even in c; pick the positive representative
    if (c[0] < 0.0) c = -c;

    // scale so the Euler-Lagrange equation becomes the PDE itself
    const double m_star = c.dot(K * c);
    Eigen::VectorXd cu = std::pow(m_star, 1.0 / (p - 1.0)) * c;

    // phase 2: Newton on F(c) = K c - b(c)
    double relres = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 80; ++it) {
        const Eigen::VectorXd b = nq.rhs(cu, p);
        const Eigen::VectorXd F = K * cu - b;
        relres = F.norm() / std::max(b.norm(), 1e-300);
        if (relres <= 1e-13) break;
        const Eigen::MatrixXd J = K - p * nq.linearized(cu, p);
        const Eigen::VectorXd dc = J.partialPivLu().solve(F);
        double tau = 1.0;
        bool ok = false;
        for (int bt = 0; bt < 30; ++bt) {
            const Eigen::VectorXd cn = cu - tau * dc;
            const double rn =
                (K * cn - nq.rhs(cn, p)).norm() / std::max(nq.rhs(cn, p).norm(), 1e-300);
            if (rn < relres) {
                cu = cn;
                relres = rn;
                ok = true;
                break;
            }
            tau *= 0.5;
        }
        if (!ok) break;
    }

    GroundState gs;
    gs.u.params = params;
    // c and -c solve the same discrete equation; report the positive one
    if (cu.size() > 0 && cu[0] < 0.0) cu = -cu;
    gs.u.coeffs = cu;
    gs.lambda = lambda;
    gs.p = p;
    gs.residual = relres;
    gs.psi_u1 = disc::trace_psi(gs.u);
    const double upp1 = nq.norm_powp1(cu, p);
    gs.energy_level = 0.5 * cu.dot(K * cu) - upp1 / (p + 1.0);

    bool positive = true;
    for (int i = 0; i <= 512; ++i) {
        if (disc::evaluate(gs.u, static_cast<double>(i) / 513.0) <= 0.0) {
            positive = false;
            break;
        }
    }
    gs.converged = (relres <= 1e-9) && positive && (gs.psi_u1 > 0.0);
    return gs;
}

/// Relative residual of the scalar boundary identity
/// (2N/(p+1) - (N-2s)) int u^{p+1} - 2 s lambda int u^2
///   - Gamma(1+s)^2 |dB| psi_u(1)^2 = 0.
inline double pohozaev_residual(const GroundState& gs) {
    if (!gs.converged) throw std::invalid_argument("pohozaev_residual: needs a converged state");
    const auto& params = gs.u.params;
    const double s = params.s;
    const double coeff = 2.0 * params.N / (gs.p + 1.0) - (params.N - 2.0 * s);
    const detail::NonlinearQuad nq(params, gs.p);
    const double I_pp1 = nq.norm_powp1(gs.u.coeffs, gs.p);
    const auto op = disc::assemble(params);
    const double I_2 = gs.u.coeffs.dot(op.mass * gs.u.coeffs);
    const double g1s = specfun::frac_constants(params.N, s).gamma_1ps_sq;
    const double boundary = g1s * specfun::sphere_area(params.N) * gs.psi_u1 * gs.psi_u1;
    const double lhs = coeff * I_pp1 - 2.0 * s * gs.lambda * I_2 - boundary;
    return std::abs(lhs) / (coeff * I_pp1);
}

/// Completes sigma_1, sigma_2, the radial nondegeneracy margin and the
/// Pohozaev residual from the linearized potential V = -p u^{p-1}.
inline GroundState diagnostics(GroundState gs, int k_eig = 8) {
    if (!gs.converged) throw std::invalid_argument("diagnostics: needs a converged state");
    const auto V = linearized_potential(gs);
    const int k = std::min(k_eig, gs.u.params.n_basis);
    const auto es = eig::solve(V, k, gs.u.params);
    gs.sigma1 = es.sigmas[0];
    gs.sigma2 = es.sigmas[1];
    gs.nondeg_margin = std::numeric_limits<double>::infinity();
    for (double sig : es.sigmas)
        gs.nondeg_margin = std::min(gs.nondeg_margin, std::abs(sig + gs.lambda));
    gs.pohozaev_residual = pohozaev_residual(gs);
    return gs;
}

enum class Axis { p, s, lambda };

struct BranchResult {
    std::vector<GroundState> states;
    std::vector<double> parameters;
    bool completed = false;
    double max_step_distance = 0.0;  // max successive coefficient distance
};

/// Sequential warm-started continuation along one parameter axis, with one
/// midpoint bisection retry per failing step.
inline BranchResult continuation_branch(Axis axis, double start, double end, int steps,
                                        int N, double s, double p, double lambda,
                                        const disc::Params& params) {
    if (steps < 1) throw std::invalid_argument("continuation_branch: steps >= 1");
    BranchResult br;
    std::optional<Eigen::VectorXd> warm;

    auto solve_at = [&](double value) {
        double ss = s, pp = p, ll = lambda;
        if (axis == Axis::s) ss = value;
        if (axis == Axis::p) pp = value;
        if (axis == Axis::lambda) ll = value;
        GroundState gs = ground_state(N, ss, pp, ll, params, warm);
        return gs;
    };

    for (int i = 0; i <= steps; ++i) {
        const double value = start + (end - start) * i / steps;
        GroundState gs = solve_at(value);
        if (!gs.converged && i > 0) {
            const double prev = start + (end - start) * (i - 1) / steps;
            const GroundState mid = solve_at(0.5 * (prev + value));
            if (mid.converged) {
                warm = mid.u.coeffs;
                gs = solve_at(value);
            }
        }
        if (!gs.converged) {
            br.states.push_back(gs);  // partial results end with the failure
            br.parameters.push_back(value);
            return br;
        }
        gs = diagnostics(gs);
        if (!br.states.empty()) {
            const double dist = (gs.u.coeffs - br.states.back().u.coeffs).norm();
            br.max_step_distance = std::max(br.max_step_distance, dist);
        }
        warm = gs.u.coeffs;
        br.states.push_back(std::move(gs));
        br.parameters.push_back(value);
    }
    br.completed = true;
    return br;
}

}  // namespace fraclab::semi
