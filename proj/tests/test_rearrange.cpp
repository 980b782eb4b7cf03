#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fraclab/rearrange.hpp"

using namespace fraclab;
using rearrange::GridFunction;

namespace {

std::function<double(double)> random_smooth_profile(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double a1 = u(rng), a2 = u(rng), a3 = u(rng), b = 0.5 + 0.5 * std::abs(u(rng));
    return [=](double r) {
        return (1.0 - r) * (a1 * std::cos(M_PI * r) + a2 * std::sin(2.0 * M_PI * r) +
                            a3 * std::cos(3.0 * M_PI * r + b));
    };
}

}  // namespace

TEST_CASE("grid measures are exact") {
    for (int N : {1, 2, 3}) {
        const auto g = GridFunction::equal_measure(256, N);
        CHECK_THAT(g.total_measure(), Catch::Matchers::WithinRel(specfun::ball_volume(N), 1e-14));
        // edges reproduce the equal-measure law exactly
        for (int i = 1; i < 256; ++i) {
            const double vol_inside = specfun::ball_volume(N) * std::pow(g.edges[i], N);
            CHECK_THAT(vol_inside, Catch::Matchers::WithinRel(
                                       i * g.cell_measure(), 1e-10));
        }
    }
}

TEST_CASE("schwarz fixes nonincreasing profiles and rejects negative input") {
    auto g = GridFunction::sample([](double r) { return std::exp(-3.0 * r); }, 128, 2);
    const auto gs = rearrange::schwarz(g);
    for (int i = 0; i < g.cells(); ++i)
        CHECK(gs.values[i] == g.values[i]);

    auto neg = GridFunction::sample([](double r) { return r - 0.5; }, 128, 2);
    CHECK_THROWS_AS(rearrange::schwarz(neg), std::invalid_argument);
}

TEST_CASE("schwarz maps an annulus indicator to the ball of equal measure") {
    const int n = 200;
    auto g = GridFunction::equal_measure(n, 3);
    int count = 0;
    for (int i = 0; i < n; ++i) {
        if (g.radii[i] > 0.4 && g.radii[i] < 0.7) {
            g.values[i] = 1.0;
            ++count;
        }
    }
    const auto gs = rearrange::schwarz(g);
    for (int i = 0; i < n; ++i) CHECK(gs.values[i] == (i < count ? 1.0 : 0.0));
    CHECK_THAT(gs.support_measure(), Catch::Matchers::WithinRel(g.support_measure(), 1e-14));
}

TEST_CASE("schwarz preserves the distribution function at sampled levels") {
    std::mt19937_64 rng(5150);
    auto f = random_smooth_profile(rng);
    auto g = GridFunction::sample([&](double r) { return std::abs(f(r)); }, 300, 2);
    const auto gs = rearrange::schwarz(g);
    const double vmax = *std::max_element(g.values.begin(), g.values.end());
    for (int k = 0; k < 50; ++k) {
        const double t = vmax * (k + 0.5) / 50.0;
        CHECK(gs.distribution(t) == g.distribution(t));  // exact: same multiset
    }
    // output nonincreasing
    for (int i = 1; i < gs.cells(); ++i) CHECK(gs.values[i] <= gs.values[i - 1]);
}

TEST_CASE("equimeasurability and norm preservation") {
    std::mt19937_64 rng(31);
    for (int N : {1, 2, 3}) {
        auto f = random_smooth_profile(rng);
        auto g = GridFunction::sample(f, 256, N);
        const auto vp = g.positive_part();
        const auto vs = rearrange::schwarz(vp);
        for (double q : {1.0, 2.0, 4.0})
            CHECK_THAT(vs.lq_norm(q), Catch::Matchers::WithinAbs(vp.lq_norm(q), 1e-10));
        CHECK_THAT(vs.support_measure(),
                   Catch::Matchers::WithinAbs(vp.support_measure(), 1.5 * g.cell_measure()));
    }
}

TEST_CASE("almgren-lieb: equality for nonincreasing, strict for annulus bump") {
    const int N = 2;
    const double s = 0.5;
    auto mono = GridFunction::sample([](double r) { return (1.0 - r) * (2.0 - r); }, 128, N);
    const auto eq = rearrange::almgren_lieb_check(mono, N, s);
    CHECK(eq.ok);
    CHECK_THAT(eq.lhs, Catch::Matchers::WithinRel(eq.rhs, 1e-6));

    auto bump = GridFunction::sample(
        [](double r) { return std::exp(-80.0 * (r - 0.6) * (r - 0.6)); }, 128, N);
    const auto strict = rearrange::almgren_lieb_check(bump, N, s);
    CHECK(strict.ok);
    CHECK(strict.lhs < strict.rhs * (1.0 - 1e-3));
}

TEST_CASE("almgren-lieb random sweep") {
    std::mt19937_64 rng(404);
    for (int N : {1, 2, 3}) {
        for (double s : {0.25, 0.5, 0.75}) {
            for (int trial = 0; trial < 10; ++trial) {
                auto f = random_smooth_profile(rng);
                auto g = GridFunction::sample(f, 192, N);
                const auto chk = rearrange::almgren_lieb_check(g, N, s);
                INFO("N=" << N << " s=" << s << " trial=" << trial);
                CHECK(chk.ok);
            }
        }
    }
}

TEST_CASE("hardy-littlewood: constant weight equality, r^2 strict, random sweep") {
    const int N = 2;
    auto bump = GridFunction::sample(
        [](double r) { return std::exp(-60.0 * (r - 0.55) * (r - 0.55)); }, 200, N);

    const auto eq = rearrange::hardy_littlewood_check(bump, disc::PotentialProfile::constant(3.0),
                                                      7.0);
    CHECK(eq.ok);
    CHECK_THAT(eq.lhs, Catch::Matchers::WithinAbs(eq.rhs, 1e-12 * (1.0 + std::abs(eq.rhs))));

    disc::PotentialProfile Vr2{[](double r) { return r * r; }, true, true, {}, 0.0, nullptr};
    const auto strict = rearrange::hardy_littlewood_check(bump, Vr2, 7.0);
    CHECK(strict.ok);
    CHECK(strict.lhs > strict.rhs + 1e-6);

    disc::PotentialProfile uncertified{[](double r) { return r; }, false, true, {}, 0.0, nullptr};
    CHECK_THROWS_AS(rearrange::hardy_littlewood_check(bump, uncertified, 1.0),
                    std::invalid_argument);

    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> ustep(0.2, 0.8), uh(0.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = ustep(rng), h = uh(rng);
        disc::PotentialProfile Vstep{[=](double r) { return r < a ? 0.0 : h; }, true, true,
                                     {a}, 0.0, nullptr};
        auto f = random_smooth_profile(rng);
        auto g = GridFunction::sample(f, 160, N);
        CHECK(rearrange::hardy_littlewood_check(g, Vstep, 3.0).ok);
    }
}

TEST_CASE("cross-term inequality") {
    const int N = 2;
    const double s = 0.5;
    const double r0 = 0.6;
    // v^+ nonincreasing inside B_{r0}: equality case (schwarz is the identity)
    auto mono = GridFunction::sample(
        [=](double r) {
            if (r < r0) return (r0 - r) * 2.0;
            return -std::sin(M_PI * (r - r0) / (1.0 - r0));
        },
        240, N);
    const auto eq = rearrange::cross_term_check(mono, N, s);
    CHECK(eq.ok);
    CHECK_THAT(eq.lhs, Catch::Matchers::WithinRel(eq.rhs, 1e-9));

    // bump concentrated near the interface: strictly rearranged
    auto bump = GridFunction::sample(
        [=](double r) {
            if (r < r0) return std::exp(-200.0 * (r - 0.5) * (r - 0.5)) * (r0 - r);
            return -std::sin(M_PI * (r - r0) / (1.0 - r0));
        },
        240, N);
    const auto strict = rearrange::cross_term_check(bump, N, s);
    CHECK(strict.ok);
    CHECK(strict.lhs < strict.rhs * (1.0 - 1e-3));

    // overlapping supports rejected
    auto overlap = GridFunction::sample([](double r) { return std::sin(5.0 * M_PI * r); }, 240, N);
    CHECK_THROWS_AS(rearrange::cross_term_check(overlap, N, s), std::invalid_argument);
}

TEST_CASE("cross-term random sweep") {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> ur0(0.35, 0.75), u(0.2, 1.0);
    for (int N : {1, 2, 3}) {
        for (double s : {0.25, 0.5, 0.75}) {
            for (int trial = 0; trial < 6; ++trial) {
                const double r0 = ur0(rng);
                const double a = u(rng), b = u(rng), c = u(rng);
                auto g = GridFunction::sample(
                    [=](double r) {
                        if (r < r0) {
                            const double osc = std::cos(4.0 * r / r0 + c);
                            return (r0 - r) * (a + b * osc * osc);
                        }
                        return -(r - r0) * (1.0 - r) * (0.5 + 0.5 * std::sin(3.0 * r));
                    },
                    200, N);
                // clamp tiny positive leakage in the annulus region
                for (int i = 0; i < g.cells(); ++i)
                    if (g.radii[i] >= r0 && g.values[i] > 0.0) g.values[i] = 0.0;
                INFO("N=" << N << " s=" << s << " trial=" << trial);
                CHECK(rearrange::cross_term_check(g, N, s).ok);
            }
        }
    }
}
