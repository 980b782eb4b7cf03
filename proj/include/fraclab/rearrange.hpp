#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fraclab/discretization.hpp"
#include "fraclab/kernel.hpp"
#include "fraclab/specfun.hpp"

namespace fraclab::rearrange {

/// Radial cell function on an equal-measure partition of the unit ball:
/// cell edges e_i = (i/n)^{1/N}, every cell has measure |B|/n, so the
/// decreasing rearrangement is an exact permutation of cell values.
struct GridFunction {
    std::vector<double> edges;   // n+1 ascending edges, edges[0]=0, edges[n]=1
    std::vector<double> radii;   // cell midpoints
    std::vector<double> values;  // one value per cell
    int N = 1;

    static GridFunction equal_measure(int n, int N) {
        if (n < 2) throw std::domain_error("GridFunction: need at least 2 cells");
        GridFunction g;
        g.N = N;
        g.edges.resize(n + 1);
        g.radii.resize(n);
        g.values.assign(n, 0.0);
        for (int i = 0; i <= n; ++i) g.edges[i] = std::pow(static_cast<double>(i) / n, 1.0 / N);
        for (int i = 0; i < n; ++i) g.radii[i] = 0.5 * (g.edges[i] + g.edges[i + 1]);
        return g;
    }

    template <typename F>
    static GridFunction sample(F&& f, int n, int N) {
        GridFunction g = equal_measure(n, N);
        for (int i = 0; i < n; ++i) g.values[i] = f(g.radii[i]);
        return g;
    }

    int cells() const { return static_cast<int>(values.size()); }
    double cell_measure() const { return specfun::ball_volume(N) / cells(); }
    double total_measure() const { return specfun::ball_volume(N); }

    GridFunction positive_part() const {
        GridFunction g = *this;
        for (double& v : g.values) v = std::max(v, 0.0);
        return g;
    }
    GridFunction negative_part() const {  // magnitude of the negative part
        GridFunction g = *this;
        for (double& v : g.values) v = std::max(-v, 0.0);
        return g;
    }

    double lq_norm(double q) const {
        double acc = 0.0;
        for (double v : values) acc += std::pow(std::abs(v), q);
        return std::pow(acc * cell_measure(), 1.0 / q);
    }

    /// measure of {v > t}
    double distribution(double t) const {
        int count = 0;
        for (double v : values) count += (v > t) ? 1 : 0;
        return count * cell_measure();
    }

    double support_measure() const { return distribution(0.0); }

    /// continuous piecewise-linear interpolant through the cell midpoints,
    /// constant inside the first midpoint, decaying to 0 at r = 1
    kernel::RadialProfile to_profile() const {
        auto copy = *this;
        return {[g = std::move(copy)](double r) -> double {
                    if (r >= 1.0) return 0.0;
                    const auto& R = g.radii;
                    const auto& V = g.values;
                    if (r <= R.front()) return V.front();
                    if (r >= R.back()) {
                        const double t = (r - R.back()) / (1.0 - R.back());
                        return V.back() * (1.0 - t);
                    }
                    const auto it = std::upper_bound(R.begin(), R.end(), r);
                    const std::size_t j = static_cast<std::size_t>(it - R.begin());
                    const double t = (r - R[j - 1]) / (R[j] - R[j - 1]);
                    return V[j - 1] * (1.0 - t) + V[j] * t;
                },
                kernel::RadialProfile::Smoothness::grid};
    }
};

/// Decreasing rearrangement with respect to the radial measure: sorted cell
/// values refilled from r = 0 outward.  Exact on the equal-measure grid.
inline GridFunction schwarz(const GridFunction& v) {
    for (double val : v.values)
        if (val < 0.0) throw std::invalid_argument("schwarz: input must be nonnegative");
    GridFunction out = v;
    std::stable_sort(out.values.begin(), out.values.end(), std::greater<double>());
    return out;
}

namespace detail {

/// Rearrangement of the continuous interpolant, resolved on a refined
/// equal-measure grid: energies of near-equality cases then carry a
/// discretization error well below the inequality tolerances.
inline GridFunction refined_rearrangement(const GridFunction& v, int refine = 16) {
    const auto prof = v.to_profile();
    auto fine = GridFunction::sample([&](double r) { return std::max(prof(r), 0.0); },
                                     v.cells() * refine, v.N);
    return schwarz(fine);
}

}  // namespace detail

struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = false;
};

/// Rearrangement lowers the Gagliardo energy: [v_*]^2_s <= [v^+]^2_s.
inline InequalityCheck almgren_lieb_check(const GridFunction& v, int N, double s,
                                          int resolution = 16) {
    const GridFunction vp = v.positive_part();
    const GridFunction vs = detail::refined_rearrangement(vp);
    InequalityCheck chk;
    chk.lhs = kernel::oracle_form(vs.to_profile(), vs.to_profile(), N, s, resolution);
    chk.rhs = kernel::oracle_form(vp.to_profile(), vp.to_profile(), N, s, resolution);
    chk.ok = chk.lhs <= chk.rhs + 1e-3 * std::abs(chk.rhs);
    return chk;
}

/// Hardy-Littlewood step: int (sigma - V)(v_*)^2 >= int (sigma - V)(v^+)^2
/// for nonincreasing weight sigma - V (V certified nondecreasing).
inline InequalityCheck hardy_littlewood_check(const GridFunction& v,
                                              const disc::PotentialProfile& V, double sigma) {
    if (!V.monotone_nondecreasing)
        throw std::invalid_argument("hardy_littlewood_check: potential certificate required");
    const GridFunction vp = v.positive_part();
    const GridFunction vs = schwarz(vp);
    InequalityCheck chk;
    const double m = v.cell_measure();
    for (int i = 0; i < v.cells(); ++i) {
        const double w = sigma - V(v.radii[i]);
        chk.lhs += w * vs.values[i] * vs.values[i] * m;
        chk.rhs += w * vp.values[i] * vp.values[i] * m;
    }
    chk.ok = chk.lhs >= chk.rhs - 1e-12 * (1.0 + std::abs(chk.rhs));
    return chk;
}

namespace detail {

/// - [a, b]_s restricted to disjoint radial supports [0, r0] x [r0, 1]:
///   (c_{N,s}/2) * 2 * |S^{N-1}| * iint a(r) b(rho) Theta(r,rho) r^{N-1} rho^{N-1}
/// with dyadic grading toward the shared interface.
inline double cross_form(const kernel::RadialProfile& core, const kernel::RadialProfile& annulus,
                         double r0, int N, double s) {
    const double pref = specfun::frac_constants(N, s).c_Ns * specfun::sphere_area(N);
    const int g = 6, levels = 18;

    // dyadic grading toward the shared interface r0 from both sides
    std::vector<double> redges, pedges;
    redges.push_back(0.0);
    for (int l = levels; l >= 1; --l) redges.push_back(r0 * (1.0 - std::pow(0.5, levels - l + 1)));
    redges.push_back(r0);
    pedges.push_back(r0);
    for (int l = 1; l <= levels; ++l) pedges.push_back(r0 + (1.0 - r0) * std::pow(0.5, levels - l + 1));
    pedges.push_back(1.0);

    double total = 0.0;
    for (std::size_t a = 0; a + 1 < redges.size(); ++a) {
        if (!(redges[a + 1] > redges[a])) continue;
        const auto rr = specfun::gauss_legendre(g, redges[a], redges[a + 1]);
        for (int i = 0; i < g; ++i) {
            const double r = rr.nodes[i];
            const double cv = core(r);
            if (cv == 0.0) continue;
            double inner = 0.0;
            for (std::size_t b = 0; b + 1 < pedges.size(); ++b) {
                if (!(pedges[b + 1] > pedges[b])) continue;
                const auto pr = specfun::gauss_legendre(g, pedges[b], pedges[b + 1]);
                for (int j = 0; j < g; ++j) {
                    const double rho = pr.nodes[j];
                    inner += pr.weights[j] * annulus(rho) * kernel::theta(N, s, r, rho) *
                             std::pow(rho, N - 1);
                }
            }
            total += rr.weights[i] * cv * std::pow(r, N - 1) * inner;
        }
    }
    return pref * total;
}

}  // namespace detail

/// Cross-term inequality: -[v_*, v^-]_s <= -[v^+, v^-]_s when v^+ lives in
/// B_{r0} and v^- in the complementary annulus.
inline InequalityCheck cross_term_check(const GridFunction& v, int N, double s) {
    const GridFunction vp = v.positive_part();
    const GridFunction vm = v.negative_part();
    int last_pos = -1, first_neg = v.cells();
    for (int i = 0; i < v.cells(); ++i) {
        if (vp.values[i] > 0.0) last_pos = i;
        if (vm.values[i] > 0.0) first_neg = std::min(first_neg, i);
    }
    if (last_pos < 0 || first_neg == v.cells())
        throw std::invalid_argument("cross_term_check: both signs must be present");
    if (first_neg <= last_pos)
        throw std::invalid_argument("cross_term_check: overlapping supports");
    const double r0 = v.edges[last_pos + 1];

    const GridFunction vs = detail::refined_rearrangement(vp);
    InequalityCheck chk;
    chk.lhs = detail::cross_form(vs.to_profile(), vm.to_profile(), r0, N, s);
    chk.rhs = detail::cross_form(vp.to_profile(), vm.to_profile(), r0, N, s);
    chk.ok = chk.lhs <= chk.rhs + 1e-3 * std::abs(chk.rhs);
    return chk;
}

}  // namespace fraclab::rearrange
