#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "freeconv/errors.hpp"
#include "freeconv/measure.hpp"
#include "freeconv/moments.hpp"
#include "freeconv/transforms.hpp"
#include "reference.hpp"

using namespace freeconv;
using Catch::Matchers::WithinAbs;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidParameter;
}

Measure tabulated_triangle() {
    Tabulated t;
    for (int i = 0; i <= 200; ++i) {
        double x = -1.0 + i / 100.0;
        t.grid.push_back(x);
        t.density.push_back(1.0 - std::abs(x));
    }
    return build_measure({{}, {{1.0, t}}});
}

std::vector<Measure> zoo() {
    return {dirac(0.3),
            bernoulli(),
            semicircle(0.0, 1.0),
            semicircle(1.0, 0.5),
            arcsine(-2.0, 2.0),
            marchenko_pastur(0.5, 1.0),
            marchenko_pastur(2.0, 1.0),
            cauchy(0.0, 1.0),
            build_measure({{{-1.0, 0.3}}, {{0.7, Semicircle{1.0, 0.25}}}}),
            tabulated_triangle()};
}

}  // namespace

TEST_CASE("build_measure accepts point masses and Bernoulli") {
    Measure d = build_measure({{{0.0, 1.0}}, {}});
    REQUIRE(d.point_mass_location() == 0.0);
    Measure b = build_measure({{{-1.0, 0.5}, {1.0, 0.5}}, {}});
    REQUIRE(b.atoms().size() == 2);
}

TEST_CASE("build_measure rejects bad input") {
    CHECK(code_of([] { build_measure({{{0.0, 0.6}}, {{0.3, Semicircle{}}}}); }) == ErrorCode::NonUnitMass);
    CHECK(code_of([] { build_measure({{{0.0, 0.5}, {0.0, 0.5}}, {}}); }) == ErrorCode::DuplicateAtom);
    CHECK(code_of([] { build_measure({{}, {{1.0, Tabulated{{0.0, 1.0, 0.5}, {1.0, 1.0, 1.0}}}}}); }) ==
          ErrorCode::NonMonotoneGrid);
    CHECK_THROWS_AS(build_measure({}), Error);
}

TEST_CASE("build_measure renormalizes within 1e-9 only") {
    Measure m = build_measure({{{-1.0, 0.5 + 4e-10}, {1.0, 0.5}}, {}});
    double s = m.atoms()[0].mass + m.atoms()[1].mass;
    CHECK_THAT(s, WithinAbs(1.0, 1e-15));
    CHECK(code_of([] { build_measure({{{-1.0, 0.5 + 1e-8}, {1.0, 0.5}}, {}}); }) == ErrorCode::NonUnitMass);
}

TEST_CASE("G at the listed points") {
    cplx g = eval_G(dirac(0.0), cplx(0, 1));
    CHECK_THAT(g.real(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(g.imag(), WithinAbs(-1.0, 1e-15));
    g = eval_G(bernoulli(), cplx(0, 2));
    CHECK_THAT(g.imag(), WithinAbs(-0.4, 1e-15));
    g = eval_G(semicircle(0, 1), cplx(0, 2));
    CHECK_THAT(g.real(), WithinAbs(0.0, 1e-14));
    CHECK_THAT(g.imag(), WithinAbs(1.0 - std::sqrt(2.0), 1e-14));
}

TEST_CASE("closed-form G agrees with independent formulas") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-4, 4), uy(0.01, 4);
    for (int i = 0; i < 200; ++i) {
        cplx z(ux(rng), uy(rng));
        CHECK(std::abs(eval_G(semicircle(0, 2), z) - ref::semicircle_G(z, 2.0)) < 1e-13);
        CHECK(std::abs(eval_G(bernoulli(), z) - ref::bernoulli_G(z)) < 1e-13);
        // arcsine(-2,2) = Bernoulli^{boxplus 2}: G = 1/sqrt(z^2-4) with Im < 0
        cplx s = std::sqrt(z * z - 4.0), ga = 1.0 / (s.imag() > 0 ? s : -s);
        CHECK(std::abs(eval_G(arcsine(-2, 2), z) - ga) < 1e-12);
        cplx gc = 1.0 / (z + cplx(0, 1));
        CHECK(std::abs(eval_G(cauchy(0, 1), z) - gc) < 1e-13);
    }
}

TEST_CASE("F and E of Bernoulli and point masses") {
    cplx e = eval_E(bernoulli(), cplx(0, 1));
    CHECK_THAT(e.imag(), WithinAbs(-1.0, 1e-15));
    cplx z(0.4, 0.7);
    CHECK(std::abs(eval_F(bernoulli(), z) - (z - 1.0 / z)) < 1e-14);
    CHECK(std::abs(eval_F(dirac(2.5), z) - (z - 2.5)) < 1e-14);
    CHECK(std::abs(eval_E(dirac(2.5), z) - 2.5) < 1e-14);
    CHECK(eval_F(semicircle(0, 1), cplx(0, 3)).imag() >= 3.0);
}

TEST_CASE("real arguments on a singularity are refused") {
    CHECK(code_of([] { eval_G(bernoulli(), cplx(1.0, 0.0)); }) == ErrorCode::EvaluationOnSingularity);
    CHECK(code_of([] { eval_G(tabulated_triangle(), cplx(0.2, 0.0)); }) == ErrorCode::EvaluationOnSingularity);
    CHECK(code_of([] { eval_F(bernoulli(), cplx(0.0, 0.0)); }) == ErrorCode::ZeroCauchyTransform);
    // boundary values of closed forms from above are fine
    cplx g = eval_G(semicircle(0, 1), cplx(0.0, 0.0));
    CHECK_THAT(g.imag(), WithinAbs(-1.0, 1e-14));
}

TEST_CASE("Pick-function signs hold for every family") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(-5, 5), ly(-6, 1);
    for (const auto& mu : zoo()) {
        for (int i = 0; i < 100; ++i) {
            cplx z(ux(rng), std::pow(10.0, ly(rng)));
            cplx g = eval_G(mu, z);
            CHECK(g.imag() < 0.0);
            cplx f = eval_F(mu, z);
            CHECK(f.imag() >= z.imag() * (1.0 - 1e-12));
            CHECK(eval_E(mu, z).imag() <= 1e-12 * std::abs(z));
        }
    }
}

TEST_CASE("iy G(iy) tends to 1") {
    for (const auto& mu : zoo()) {
        double prev = std::numeric_limits<double>::infinity();
        for (double y : {10.0, 100.0, 1000.0}) {
            double r = std::abs(cplx(0, y) * eval_G(mu, cplx(0, y)) - 1.0);
            CHECK((r < prev || r < 1e-12));
            prev = r;
        }
    }
    // with mean 0 and finite variance the residual is O(1/y^2), so y r -> 0
    for (const auto& mu : {bernoulli(), semicircle(0, 1), arcsine(-2, 2)}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double y : {10.0, 100.0, 1000.0}) {
            double r = y * std::abs(cplx(0, y) * eval_G(mu, cplx(0, y)) - 1.0);
            CHECK(r < prev);
            prev = r;
        }
        CHECK(prev < 2e-3);
    }
}

TEST_CASE("tabulated Cauchy transform matches direct quadrature") {
    Measure t = tabulated_triangle();
    for (cplx z : {cplx(0.1, 0.5), cplx(2.0, 0.01), cplx(-0.9, 1e-3)}) {
        // midpoint rule on a fine grid as the oracle
        cplx g = 0.0;
        const int n = 400000;
        for (int i = 0; i < n; ++i) {
            double x = -1.0 + 2.0 * (i + 0.5) / n;
            g += (1.0 - std::abs(x)) / (z - x) * (2.0 / n);
        }
        CHECK(std::abs(eval_G(t, z) - g) < 1e-7);
    }
}

TEST_CASE("moments of the listed measures") {
    MomentVector b = moments(bernoulli(), 6);
    for (int k = 0; k <= 6; ++k) CHECK_THAT(b[k], WithinAbs(k % 2 == 0 ? 1.0 : 0.0, 1e-15));
    MomentVector s = moments(semicircle(0, 1), 12);
    for (int k = 0; k <= 12; ++k)
        CHECK_THAT(s[k], WithinAbs(k % 2 ? 0.0 : static_cast<double>(ref::catalan(k / 2)), 1e-9));
    CHECK(code_of([] { moments(cauchy(0, 1), 1); }) == ErrorCode::HeavyTail);
    CHECK(code_of([] { moments(bernoulli(), 13); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("mean and variance") {
    auto [m, v] = mean_variance(bernoulli());
    CHECK_THAT(m, WithinAbs(0.0, 1e-15));
    CHECK_THAT(v, WithinAbs(1.0, 1e-15));
    auto [a, va] = mean_variance(dirac(1.7));
    CHECK_THAT(a, WithinAbs(1.7, 1e-15));
    CHECK_THAT(va, WithinAbs(0.0, 1e-15));
    for (double lam : {0.5, 1.0, 3.0}) {
        auto [mm, vv] = mean_variance(marchenko_pastur(lam, 1.0));
        CHECK_THAT(mm, WithinAbs(lam, 1e-9));
        CHECK_THAT(vv, WithinAbs(lam, 1e-9));
    }
}

TEST_CASE("arcsine and MP moments agree with closed forms") {
    // arcsine(-2,2): m_2k = binom(2k, k)
    MomentVector a = moments(arcsine(-2, 2), 8);
    CHECK_THAT(a[2], WithinAbs(2.0, 1e-9));
    CHECK_THAT(a[4], WithinAbs(6.0, 1e-9));
    CHECK_THAT(a[6], WithinAbs(20.0, 1e-9));
    CHECK_THAT(a[8], WithinAbs(70.0, 1e-9));
    // MP(rate 1): Catalan numbers m_n = C_n
    MomentVector mp = moments(marchenko_pastur(1.0, 1.0), 6);
    for (int k = 1; k <= 6; ++k) CHECK_THAT(mp[k], WithinAbs(static_cast<double>(ref::catalan(k)), 1e-8));
}

TEST_CASE("Hankel test separates moment sequences") {
    CHECK(hankel_psd(moments(semicircle(0, 1), 8)));
    CHECK(hankel_psd(moments(bernoulli(), 8)));
    MomentVector bad{{1.0, 0.0, 1.0, 0.0, 0.5}};  // m4 < m2^2
    CHECK_FALSE(hankel_psd(bad));
}

TEST_CASE("Stieltjes inversion of closed forms") {
    auto gs = [](cplx z) { return eval_G(semicircle(0, 1), z); };
    DensityTable t = stieltjes_invert(gs, {-2.5, 2.5}, 501);
    for (std::size_t i = 0; i < t.size(); ++i) {
        double x = t.x[i];
        if (std::abs(std::abs(x) - 2.0) < 0.05) continue;
        CHECK_THAT(t.density[i], WithinAbs(ref::semicircle_density(x, 0, 1), 1e-6));
    }
    auto g0 = [](cplx z) { return eval_G(dirac(0.0), z); };
    DensityTable z = stieltjes_invert(g0, {0.5, 1.0}, 51);
    for (double d : z.density) CHECK(d == 0.0);
    auto ga = [](cplx z) { return eval_G(arcsine(-2, 2), z); };
    StieltjesPoint p = stieltjes_point(ga, 0.0, StieltjesOptions::defaults());
    CHECK_THAT(p.density, WithinAbs(1.0 / (2.0 * std::numbers::pi), 1e-9));
}

TEST_CASE("Stieltjes inversion off the edges for each family") {
    struct Case {
        Measure mu;
        std::function<double(double)> dens;
        Interval win;
    };
    std::vector<Case> cases = {
        {semicircle(1.0, 0.5), [](double x) { return ref::semicircle_density(x, 1.0, 0.5); }, {-1.0, 3.0}},
        {arcsine(-1.0, 3.0), [](double x) { return ref::arcsine_density(x, -1.0, 3.0); }, {-1.5, 3.5}},
        {marchenko_pastur(2.0, 1.0), [](double x) { return ref::mp_density(x, 2.0); }, {0.0, 6.5}},
        {cauchy(0.5, 2.0),
         [](double x) { return 2.0 / (std::numbers::pi * ((x - 0.5) * (x - 0.5) + 4.0)); },
         {-5.0, 5.0}},
    };
    for (const auto& c : cases) {
        auto G = [&](cplx z) { return eval_G(c.mu, z); };
        DensityTable t = stieltjes_invert(G, c.win, 401);
        auto edges = c.mu.ac_support();
        for (std::size_t i = 0; i < t.size(); ++i) {
            double x = t.x[i];
            bool near = false;
            for (const auto& e : edges) near = near || std::abs(x - e.left) < 0.05 || std::abs(x - e.right) < 0.05;
            if (near) continue;
            CHECK_THAT(t.density[i], WithinAbs(c.dens(x), 1e-6));
        }
    }
}

TEST_CASE("Stieltjes inversion flags an atom") {
    auto G = [](cplx z) { return eval_G(bernoulli(), z); };
    CHECK(code_of([&] { stieltjes_point(G, 1.0, StieltjesOptions::defaults()); }) == ErrorCode::NonConvergent);
}

TEST_CASE("moments of an inverted density match direct moments") {
    Measure mu = semicircle(0.5, 1.0);
    auto G = [&](cplx z) { return eval_G(mu, z); };
    // nodes clustered at the edges so the trapezoid rule copes with the square root
    std::vector<double> grid;
    const int n = 4001;
    for (int i = 0; i < n; ++i) {
        double t = static_cast<double>(i) / (n - 1);
        grid.push_back(0.5 - 2.0 * std::cos(std::numbers::pi * t));
    }
    DensityTable t = stieltjes_invert(G, grid);
    MomentVector m = moments(mu, 6);
    for (int k = 0; k <= 6; ++k) CHECK_THAT(t.trapezoid_moment(k), WithinAbs(m[k], 1e-5 * std::max(1.0, m[k])));
}
