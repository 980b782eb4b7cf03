#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fraclab/discretization.hpp"

namespace fraclab::eig {

/// Solved radial eigenpairs, ascending, L2(B)-orthonormal, sign-fixed so the
/// first significant value near r = 0 is positive.
struct EigenSet {
    std::vector<double> sigmas;
    std::vector<disc::RadialFunction> functions;
    disc::PotentialProfile potential;
    disc::Params params;
    disc::SpectralOperator op;  // retained for Rayleigh re-checks
};

/// Checks a monotone-nondecreasing certificate on a sample grid.
inline bool certificate_holds(const disc::PotentialProfile& V, int grid = 512) {
    if (!V.monotone_nondecreasing) return false;
    double prev = V(0.0);
    for (int i = 1; i <= grid; ++i) {
        const double r = static_cast<double>(i) / (grid + 1);
        const double cur = V(r);
        if (prev > cur + 1e-12) return false;
        prev = cur;
    }
    return true;
}

/// Generalized symmetric-definite eigensolve of (A + P) c = sigma M c.
/// Galerkin upper bounds of the min-max values over the basis subspace.
inline EigenSet solve(const disc::PotentialProfile& V, int k_max, const disc::Params& params) {
    if (k_max < 1 || k_max > params.n_basis)
        throw std::invalid_argument("solve: k_max must lie in [1, n_basis]");
    EigenSet es;
    es.params = params;
    es.potential = V;
    es.op = disc::assemble(params, V);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(es.op.lhs(), es.op.mass,
                                                                  Eigen::ComputeEigenvectors |
                                                                      Eigen::Ax_lBx);
    if (ges.info() != Eigen::Success)
        throw std::runtime_error("solve: generalized eigensolve failed (mass matrix not SPD?)");

    es.sigmas.resize(k_max);
    es.functions.reserve(k_max);
    for (int k = 0; k < k_max; ++k) {
        es.sigmas[k] = ges.eigenvalues()[k];
        disc::RadialFunction w;
        w.params = params;
        w.coeffs = ges.eigenvectors().col(k);  // M-orthonormal
        // sign convention: first above-threshold value from r = 0 is positive
        const int g = 512;
        double maxabs = 0.0;
        std::vector<double> vals(g);
        for (int i = 0; i < g; ++i) {
            vals[i] = disc::evaluate(w, static_cast<double>(i) / g);
            maxabs = std::max(maxabs, std::abs(vals[i]));
        }
        for (int i = 0; i < g; ++i) {
            if (std::abs(vals[i]) > params.sign_eps * maxabs) {
                if (vals[i] < 0.0) w.coeffs = -w.coeffs;
                break;
            }
        }
        es.functions.push_back(std::move(w));
    }
    return es;
}

/// Largest L such that w strictly alternates sign L times on a uniform grid
/// in (0,1), after zeroing values below sign_eps * max|w|.
inline int sign_change_count(const disc::RadialFunction& w, int grid_size = 512) {
    if (grid_size < 256) throw std::invalid_argument("sign_change_count: grid_size >= 256");
    std::vector<double> vals(grid_size);
    double maxabs = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        const double r = static_cast<double>(i + 1) / (grid_size + 1);
        vals[i] = disc::evaluate(w, r);
        maxabs = std::max(maxabs, std::abs(vals[i]));
    }
    if (maxabs == 0.0) throw std::runtime_error("sign_change_count: degenerate function");
    const double thr = w.params.sign_eps * maxabs;
    int count = 0, prev = 0;
    for (int i = 0; i < grid_size; ++i) {
        const int sg = (vals[i] > thr) ? 1 : (vals[i] < -thr ? -1 : 0);
        if (sg == 0) continue;
        if (prev != 0 && sg != prev) ++count;
        prev = sg;
    }
    return count;
}

/// Qualitative second-eigenfunction diagnostics.
struct QualitativeReport {
    double simplicity_gap = 0.0;       // (sigma_3 - sigma_2)/(1 + |sigma_2|)
    int sign_changes_w2 = -1;
    double r0 = 0.0;                   // grid sign-flip radius (error bar: grid spacing)
    double r0_error = 0.0;
    bool w2_monotone_on_core = false;  // nonincreasing on (0, r0)
    double hopf_value = 0.0;           // psi_{w_2}(1)
    double integral_sign_product = 0.0;  // w_2(0) * int_B w_2
};

inline QualitativeReport qualitative_report(const EigenSet& es, int grid_size = 512) {
    if (es.sigmas.size() < 3)
        throw std::invalid_argument("qualitative_report: needs at least 3 eigenpairs");
    const auto& w2 = es.functions[1];
    QualitativeReport rep;
    rep.simplicity_gap = (es.sigmas[2] - es.sigmas[1]) / (1.0 + std::abs(es.sigmas[1]));
    rep.sign_changes_w2 = sign_change_count(w2, grid_size);

    std::vector<double> vals(grid_size);
    double maxabs = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        vals[i] = disc::evaluate(w2, static_cast<double>(i + 1) / (grid_size + 1));
        maxabs = std::max(maxabs, std::abs(vals[i]));
    }
    const double thr = es.params.sign_eps * maxabs;
    int prev = 0;
    int flip_at = -1;
    double prev_r = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        const double r = static_cast<double>(i + 1) / (grid_size + 1);
        const int sg = (vals[i] > thr) ? 1 : (vals[i] < -thr ? -1 : 0);
        if (sg != 0) {
            if (prev != 0 && sg != prev && flip_at < 0) {
                rep.r0 = 0.5 * (prev_r + r);
                rep.r0_error = r - prev_r;
                flip_at = i;
            }
            prev = sg;
            prev_r = r;
        }
    }
    rep.w2_monotone_on_core = true;
    if (flip_at > 0) {
        for (int i = 1; i < flip_at; ++i)
            if (vals[i] > vals[i - 1] + thr) rep.w2_monotone_on_core = false;
    }
    rep.hopf_value = disc::trace_psi(w2);
    rep.integral_sign_product = disc::evaluate(w2, 0.0) * disc::integral(w2);
    return rep;
}

/// Rayleigh-quotient recomputation of sigma_k from the assembled operator.
inline double rayleigh(const EigenSet& es, int k) {
    const auto& c = es.functions[k].coeffs;
    return c.dot(es.op.lhs() * c) / c.dot(es.op.mass * c);
}

}  // namespace fraclab::eig
