#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "fraclab/discretization.hpp"
#include "fraclab/kernel.hpp"

namespace fraclab::ext {

/// Angular average of the Poisson kernel:
///   K(r,rho,t) = int_{S^{N-1}} (t^2 + r^2 + rho^2 - 2 r rho y_1)^{-(N+2s)/2} dsigma(y).
/// With A = t^2+r^2+rho^2, B = 2 r rho this is Theta_N at the effective radii
/// rt^2 = B^2/(2(A+sqrt(A^2-B^2))), pt^2 = (A+sqrt(A^2-B^2))/2, since
/// (pt -+ rt)^2 = A -+ B reproduces the t = 0 case exactly.
inline double poisson_angular_kernel(int N, double s, double r, double rho, double t) {
    const double A = t * t + r * r + rho * rho;
    const double B = 2.0 * r * rho;
    const double disc = std::sqrt(std::max((A - B) * (A + B), 0.0));
    const double pt2 = 0.5 * (A + disc);
    const double rt2 = (B == 0.0) ? 0.0 : B * B / (2.0 * (A + disc));
    return kernel::theta(N, s, std::sqrt(rt2), std::sqrt(pt2));
}

namespace detail {

/// rho-quadrature edges on (0,1): dyadic toward the boundary kink at 1, and
/// geometric doubling away from the kernel peak at rho = r across all scales
/// between t and 1 (the kernel tail decays only like |rho - r|^{-1-2s}).
inline std::vector<double> rho_edges(double r, double t) {
    std::vector<double> e{0.0, 0.5};
    double w = 0.5;
    for (int l = 0; l < 14; ++l) {
        w *= 0.5;
        e.push_back(1.0 - w);
    }
    e.push_back(1.0);
    if (t < 0.5 && r < 1.5) {
        for (double d = t; d < 2.0; d *= 2.0) {
            for (double c : {r - d, r + d})
                if (c > 1e-12 && c < 1.0 - 1e-12) e.push_back(c);
        }
        if (r > 1e-12 && r < 1.0 - 1e-12) e.push_back(r);
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end(),
                        [](double a, double b) { return std::abs(a - b) < 1e-13; }),
            e.end());
    return e;
}

inline int worker_budget() {
    if (const char* env = std::getenv("FRACLAB_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

template <typename F>
void parallel_rows(int rows, F&& body) {
    const int workers = std::min(worker_budget(), rows);
    if (workers <= 1) {
        for (int i = 0; i < rows; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < rows; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Pointwise s-harmonic extension W(r,t) of a spectral radial function,
/// by quadrature of the Poisson formula (exact at t = 0 by continuity).
inline double field_value(const disc::RadialFunction& w, double r, double t) {
    if (t < 0.0) throw std::domain_error("field_value: t >= 0 required");
    if (t == 0.0) return disc::evaluate(w, r);
    const int N = w.params.N;
    const double s = w.params.s;
    const double pNs = specfun::frac_constants(N, s).p_Ns;

    const auto edges = detail::rho_edges(r, t);
    static const specfun::QuadRule ref = specfun::gauss_jacobi(8, 0.0, 0.0);
    double integral = 0.0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double half = 0.5 * (edges[p + 1] - edges[p]);
        for (int i = 0; i < 8; ++i) {
            const double rho = mid + half * ref.nodes[i];
            integral += half * ref.weights[i] * disc::evaluate(w, rho) * std::pow(rho, N - 1) *
                        poisson_angular_kernel(N, s, r, rho, t);
        }
    }
    return pNs * std::pow(t, 2.0 * s) * integral;
}

/// Sampled extension field on a tensor grid; row t = 0 is the trace itself.
struct ExtensionField {
    std::vector<double> r_grid, t_grid;  // ascending; t_grid[0] == 0
    Eigen::MatrixXd values;              // (i,j) -> W(r_i, t_j)
    disc::RadialFunction source;
    double sign_eps = 1e-8;
};

inline ExtensionField poisson_extend(const disc::RadialFunction& w,
                                     const std::vector<double>& r_grid,
                                     const std::vector<double>& t_grid) {
    if (t_grid.empty() || t_grid.front() < 0.0)
        throw std::domain_error("poisson_extend: t grid must start at t >= 0");
    ExtensionField f;
    f.r_grid = r_grid;
    f.t_grid = t_grid;
    f.source = w;
    f.sign_eps = w.params.sign_eps;
    f.values.resize(r_grid.size(), t_grid.size());
    detail::parallel_rows(static_cast<int>(r_grid.size()), [&](int i) {
        for (std::size_t j = 0; j < t_grid.size(); ++j)
            f.values(i, j) = field_value(w, r_grid[i], t_grid[j]);
    });
    return f;
}

/// Uniform grid with given extent (cells + 1 points per axis, t starts at 0).
inline std::vector<double> uniform_grid(double extent, int cells) {
    std::vector<double> g(cells + 1);
    for (int i = 0; i <= cells; ++i) g[i] = extent * i / cells;
    return g;
}

/// t^N W(0,t); tends to p_{N,s} int_B w as t -> infinity.
inline double tail_moment(const disc::RadialFunction& w, double t) {
    if (!(t > 0.0)) throw std::domain_error("tail_moment: t > 0 required");
    const int N = w.params.N;
    const double s = w.params.s;
    const double pNs = specfun::frac_constants(N, s).p_Ns;
    const double q = 0.5 * (N + 2.0 * s);
    // K(0,rho,t) = |S^{N-1}| (t^2+rho^2)^{-q}; radial_integral already carries
    // the |S^{N-1}| volume factor, so the kernel enters without it
    const double integral = disc::radial_integral(
        w.params, s,
        [&](double z) {
            const double rho2 = 0.5 * (1.0 + z);
            std::vector<double> vals(w.coeffs.size());
            disc::detail::jacobi_values(s, w.params.jacobi_beta(), z,
                                        static_cast<int>(w.coeffs.size()), vals.data());
            double g = 0.0;
            for (int k = 0; k < static_cast<int>(w.coeffs.size()); ++k)
                g += w.coeffs[k] * vals[k];
            return g * std::pow(t * t + rho2, -q);
        },
        std::max(48, w.params.quad_order));
    return std::pow(t, static_cast<double>(N)) * pNs * std::pow(t, 2.0 * s) * integral;
}

namespace detail {

struct Components {
    int count = 0;
    std::vector<int> labels;  // flattened (i * nt + j), -1 for zeroed cells
    std::vector<bool> touches_trace_inside_ball;
};

inline Components label_components(const ExtensionField& f, double eps) {
    const int nr = static_cast<int>(f.r_grid.size());
    const int nt = static_cast<int>(f.t_grid.size());
    const double maxabs = f.values.cwiseAbs().maxCoeff();
    if (maxabs == 0.0) throw std::runtime_error("nodal_count: field vanishes identically");
    const double thr = eps * maxabs;

    auto sgn = [&](int i, int j) -> int {
        const double v = f.values(i, j);
        return v > thr ? 1 : (v < -thr ? -1 : 0);
    };
    Components comp;
    comp.labels.assign(static_cast<std::size_t>(nr) * nt, -1);
    std::vector<std::pair<int, int>> stack;
    for (int i = 0; i < nr; ++i) {
        for (int j = 0; j < nt; ++j) {
            if (sgn(i, j) == 0 || comp.labels[i * nt + j] >= 0) continue;
            const int label = comp.count++;
            const int s0 = sgn(i, j);
            bool touches = false;
            stack.push_back({i, j});
            comp.labels[i * nt + j] = label;
            while (!stack.empty()) {
                auto [a, b] = stack.back();
                stack.pop_back();
                if (b == 0 && f.r_grid[a] < 1.0) touches = true;
                const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int na = a + di[k], nb = b + dj[k];
                    if (na < 0 || na >= nr || nb < 0 || nb >= nt) continue;
                    if (comp.labels[na * nt + nb] >= 0 || sgn(na, nb) != s0) continue;
                    comp.labels[na * nt + nb] = label;
                    stack.push_back({na, nb});
                }
            }
            comp.touches_trace_inside_ball.push_back(touches);
        }
    }
    return comp;
}

}  // namespace detail

/// Number of connected nonzero-sign components of the (r,t) field after
/// thresholding |W| <= eps * max|W| to zero (4-neighbor flood fill).
inline int nodal_count(const ExtensionField& f, double sign_eps = 0.0) {
    if (f.r_grid.back() < 2.0 || f.t_grid.back() < 2.0)
        throw std::invalid_argument("nodal_count: field must cover r, t up to at least 2");
    const double eps = sign_eps > 0.0 ? sign_eps : f.sign_eps;
    return detail::label_components(f, eps).count;
}

/// True if every nonzero-sign component contains a cell of the trace row
/// t = 0 with r < 1.
inline bool components_touch_trace(const ExtensionField& f, double sign_eps = 0.0) {
    const double eps = sign_eps > 0.0 ? sign_eps : f.sign_eps;
    const auto comp = detail::label_components(f, eps);
    for (bool t : comp.touches_trace_inside_ball)
        if (!t) return false;
    return comp.count > 0;
}

/// Consistency of the adopted a_s: fit W(x,t) ~ w(x) + b t^{2s} + c t^2 + ...
/// on small t and compare -2s b against a_s (-Lap)^s w(x).
inline double extension_consistency(const disc::RadialFunction& w, double x_probe,
                                    int n_samples = 12) {
    if (!(x_probe > 0.0 && x_probe < 1.0))
        throw std::domain_error("extension_consistency: probe must lie inside (0,1)");
    if (n_samples < 4)
        throw std::invalid_argument("extension_consistency: need at least 4 small-t samples");
    const double s = w.params.s;

    const double t_lo = 3e-3, t_hi = 0.25;
    Eigen::MatrixXd X(n_samples, 5);
    Eigen::VectorXd y(n_samples);
    for (int k = 0; k < n_samples; ++k) {
        const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(k) / (n_samples - 1));
        y[k] = field_value(w, x_probe, t);
        X(k, 0) = 1.0;
        X(k, 1) = std::pow(t, 2.0 * s);
        X(k, 2) = t * t;
        X(k, 3) = std::pow(t, 2.0 * s + 2.0);
        X(k, 4) = t * t * t * t;
    }
    const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
    const double b = coef[1];

    const double a_s = specfun::frac_constants(w.params.N, s).a_s;
    const double lap = disc::frac_laplacian_eval(w, x_probe);
    return std::abs((-2.0 * s * b) - a_s * lap) / (1.0 + std::abs(a_s * lap));
}

}  // namespace fraclab::ext
