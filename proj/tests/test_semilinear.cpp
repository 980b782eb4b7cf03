#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fraclab/semilinear.hpp"

using namespace fraclab;
using disc::Params;

TEST_CASE("exponent validation") {
    Params p(1, 0.5, 16);
    CHECK_THROWS_AS(semi::ground_state(1, 0.5, 1.0, 0.0, p), std::invalid_argument);
    CHECK_THROWS_AS(semi::ground_state(3, 0.5, 2.1, 0.0, p), std::invalid_argument);  // 2*_s-1 = 2
    CHECK_THROWS_AS(semi::ground_state(1, 0.5, 2.0, -1.0, p), std::invalid_argument);
    CHECK_NOTHROW(semi::ground_state(1, 0.5, 5.0, 0.0, Params(1, 0.5, 12)));  // 2*_s = inf
}

TEST_CASE("ground state: convergence, positivity, weak-form sanity") {
    Params p(1, 0.5, 32);
    auto gs = semi::ground_state(1, 0.5, 2.0, 0.0, p);
    REQUIRE(gs.converged);
    CHECK(gs.residual <= 1e-9);
    CHECK(gs.psi_u1 > 0.0);

    // weak form tested with v = u: [u]^2_s + lambda ||u||^2 = int u^{p+1}
    const auto op = disc::assemble(p);
    double energy = 0.0;
    for (int n = 0; n < p.n_basis; ++n)
        energy += gs.u.coeffs[n] * gs.u.coeffs[n] * disc::stiffness_coefficient(n, p);
    const semi::detail::NonlinearQuad nq(p, gs.p);
    const double upp1 = nq.norm_powp1(gs.u.coeffs, gs.p);
    CHECK_THAT(energy, Catch::Matchers::WithinRel(upp1, 1e-8));

    // u is radially strictly decreasing
    double prev = disc::evaluate(gs.u, 0.0);
    for (int i = 1; i < 256; ++i) {
        const double cur = disc::evaluate(gs.u, static_cast<double>(i) / 256.0);
        CHECK(cur < prev + p.sign_eps * disc::evaluate(gs.u, 0.0));
        prev = cur;
    }
}

TEST_CASE("multistart uniqueness probe") {
    Params p(1, 0.5, 24);
    auto ref = semi::ground_state(1, 0.5, 2.0, 0.0, p);
    REQUIRE(ref.converged);
    std::mt19937_64 rng(1357);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd init(p.n_basis);
        for (int i = 0; i < p.n_basis; ++i)
            init[i] = gauss(rng) / ((1.0 + i) * (1.0 + i)) + (i == 0 ? 2.0 : 0.0);
        auto gs = semi::ground_state(1, 0.5, 2.0, 0.0, p, init);
        REQUIRE(gs.converged);
        CHECK((gs.u.coeffs - ref.u.coeffs).norm() <= 1e-8);
    }
}

TEST_CASE("diagnostics: spectral trapping and nondegeneracy margin") {
    for (auto [N, s, pexp, lam] :
         {std::tuple{1, 0.5, 2.0, 0.0}, {1, 0.5, 2.0, 1.0}, {2, 0.5, 2.0, 1.0}}) {
        Params p(N, s, 40);
        auto gs = semi::diagnostics(semi::ground_state(N, s, pexp, lam, p));
        INFO("N=" << N << " s=" << s << " p=" << pexp << " lambda=" << lam);
        REQUIRE(gs.converged);
        CHECK(gs.sigma1 < -gs.lambda);
        CHECK(gs.sigma2 > -gs.lambda);
        CHECK(gs.nondeg_margin > 0.0);
        CHECK(gs.pohozaev_residual <= 1e-4);

        // linearized potential satisfies the nondecreasing hypothesis
        const auto V = semi::linearized_potential(gs);
        CHECK(V.monotone_nondecreasing);
        CHECK(eig::certificate_holds(V));

        // the second eigenfunction of the linearized problem carries the
        // full sign structure
        const auto es = eig::solve(V, 3, p);
        const auto rep = eig::qualitative_report(es);
        CHECK(rep.sign_changes_w2 == 1);
        CHECK(rep.hopf_value < 0.0);
        CHECK(rep.integral_sign_product < 0.0);
    }
}

TEST_CASE("orthogonality of near-degenerate linearized eigenfunctions") {
    // at an eigenvalue sigma_k near -lambda, int u^p w vanishes; away from it
    // the weak identities still force the relation via the solved equation
    Params p(1, 0.5, 24);
    auto gs = semi::diagnostics(semi::ground_state(1, 0.5, 2.0, 1.0, p));
    REQUIRE(gs.converged);
    const auto V = semi::linearized_potential(gs);
    const auto es = eig::solve(V, 4, p);
    const semi::detail::NonlinearQuad nq(p, gs.p);
    const Eigen::VectorXd b = nq.rhs(gs.u.coeffs, gs.p);  // b_m = int u^p phi_m
    // subtracting the two weak forms gives
    // (sigma_k + lambda) int u w_k = -(p-1) int u^p w_k for every eigenpair;
    // at sigma_k = -lambda this is exactly the vanishing pairing int u^p w = 0
    const auto op = disc::assemble(p);
    for (std::size_t k = 0; k < es.sigmas.size(); ++k) {
        const auto& w = es.functions[k].coeffs;
        const double upw = b.dot(w);
        const double uw = gs.u.coeffs.dot(op.mass * w);
        CHECK_THAT((es.sigmas[k] + gs.lambda) * uw,
                   Catch::Matchers::WithinAbs(-(gs.p - 1.0) * upw, 1e-6));
    }
}

TEST_CASE("pohozaev residual at the spec operating point and under refinement") {
    auto gs24 = semi::diagnostics(semi::ground_state(1, 0.75, 2.0, 0.0, Params(1, 0.75, 24)));
    auto gs48 = semi::diagnostics(semi::ground_state(1, 0.75, 2.0, 0.0, Params(1, 0.75, 48)));
    REQUIRE(gs24.converged);
    REQUIRE(gs48.converged);
    CHECK(gs24.pohozaev_residual <= 1e-4);
    CHECK(gs48.pohozaev_residual <= 0.5 * gs24.pohozaev_residual);

    // subcriticality coefficient positivity
    for (auto [N, s, pexp] : {std::tuple{1, 0.5, 2.0}, {2, 0.5, 2.0}, {3, 0.75, 2.0}}) {
        CHECK(2.0 * N / (pexp + 1.0) - (N - 2.0 * s) > 0.0);
    }
}

TEST_CASE("continuation branches with reversal") {
    Params p(1, 0.5, 24);

    auto fwd = semi::continuation_branch(semi::Axis::p, 1.2, 2.5, 14, 1, 0.5, 2.0, 1.0, p);
    REQUIRE(fwd.completed);
    for (const auto& st : fwd.states) {
        CHECK(st.converged);
        CHECK(st.nondeg_margin > 0.0);
    }

    auto bwd = semi::continuation_branch(semi::Axis::p, 2.5, 1.2, 14, 1, 0.5, 2.0, 1.0, p);
    REQUIRE(bwd.completed);
    CHECK((fwd.states.front().u.coeffs - bwd.states.back().u.coeffs).norm() <= 1e-6);

    auto sbr = semi::continuation_branch(semi::Axis::s, 0.9, 0.5, 8, 1, 0.5, 2.0, 0.0, p);
    REQUIRE(sbr.completed);
    for (const auto& st : sbr.states) CHECK(st.psi_u1 > 0.0);
}
