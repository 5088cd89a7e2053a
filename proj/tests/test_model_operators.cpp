#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "skl/domain.hpp"
#include "skl/operator_spec.hpp"
#include "skl/symbol.hpp"

using namespace skl;

namespace {

// Smooth wavy operator with analytic coefficient partials, positive definite
// (eigenvalues >= 1 - 0.2 - 0.1 > 0 everywhere).
OperatorSpec make_wavy_op() {
    CoefficientField g00;
    g00.eval = [](const Point& x) { return 1.0 + 0.2 * std::sin(x[0] + 0.5 * x[1]); };
    g00.partials = {[](const Point& x) { return 0.2 * std::cos(x[0] + 0.5 * x[1]); },
                    [](const Point& x) { return 0.1 * std::cos(x[0] + 0.5 * x[1]); }};
    CoefficientField g01;
    g01.eval = [](const Point& x) { return 0.1 * std::cos(x[1]); };
    g01.partials = {[](const Point&) { return 0.0; },
                    [](const Point& x) { return -0.1 * std::sin(x[1]); }};
    CoefficientField g11;
    g11.eval = [](const Point& x) { return 1.0 + 0.2 * std::cos(x[0]); };
    g11.partials = {[](const Point& x) { return -0.2 * std::sin(x[0]); },
                    [](const Point&) { return 0.0; }};
    CoefficientField v0;
    v0.eval = [](const Point& x) { return 0.3 * std::sin(x[1]); };
    v0.partials = {[](const Point&) { return 0.0; },
                   [](const Point& x) { return 0.3 * std::cos(x[1]); }};
    CoefficientField v1;
    v1.eval = [](const Point& x) { return 0.2 * std::cos(x[0]); };
    v1.partials = {[](const Point& x) { return -0.2 * std::sin(x[0]); },
                   [](const Point&) { return 0.0; }};
    CoefficientField V;
    V.eval = [](const Point& x) { return 0.4 * std::sin(x[0]) * std::cos(x[1]); };
    V.partials = {[](const Point& x) { return 0.4 * std::cos(x[0]) * std::cos(x[1]); },
                  [](const Point& x) { return -0.4 * std::sin(x[0]) * std::sin(x[1]); }};
    return OperatorSpec(2, {g00, g01, g11}, {v0, v1}, V);
}

}  // namespace

TEST_CASE("principal symbol closed cases") {
    auto free2 = OperatorSpec::free_symbol(2);
    CHECK(principal_symbol(free2, {0.0, 0.0}, {1.0, 0.0}) == doctest::Approx(1.0));

    OperatorSpec shifted(2,
                         {CoefficientField::constant(1.0), CoefficientField::constant(0.0),
                          CoefficientField::constant(1.0)},
                         {CoefficientField::constant(0.0), CoefficientField::constant(0.0)},
                         CoefficientField::constant(0.5));
    CHECK(principal_symbol(shifted, {0.3, -0.2}, {1.0, 1.0}) == doctest::Approx(2.5));

    CHECK_THROWS_AS(principal_symbol(free2, {0.0}, {1.0, 0.0}), DimensionError);
}

TEST_CASE("principal symbol matches term-by-term resummation") {
    auto op = make_wavy_op();
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int rep = 0; rep < 40; ++rep) {
        Point x = {u(rng), u(rng)};
        Covector xi = {u(rng), u(rng)};
        // Oracle: explicit double loop over all (j,k) with both off-diagonal
        // mirror terms spelled out.
        double acc = op.potential()(x);
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) {
                acc += op.metric(j, k)(x) * (xi[j] - op.magnetic(j)(x)) *
                       (xi[k] - op.magnetic(k)(x));
            }
        }
        CHECK(principal_symbol(op, x, xi) == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("symbol gradient closed cases") {
    auto free2 = OperatorSpec::free_symbol(2);
    auto g = symbol_gradient(free2, {0.2, 0.1}, {1.0, 0.0});
    CHECK(g.d_xi[0] == doctest::Approx(2.0));
    CHECK(g.d_xi[1] == doctest::Approx(0.0));
    CHECK(g.d_x[0] == doctest::Approx(0.0));
    CHECK(g.d_x[1] == doctest::Approx(0.0));

    auto lin = OperatorSpec::linear_potential(2, 1.0);
    auto gl = symbol_gradient(lin, {0.5, 0.5}, {0.0, 0.0});
    CHECK(gl.d_x[0] == doctest::Approx(1.0));
    CHECK(gl.d_x[1] == doctest::Approx(0.0));
}

TEST_CASE("symbol gradient matches central differences") {
    auto op = make_wavy_op();
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    const double step = 1e-4;
    for (int rep = 0; rep < 100; ++rep) {
        Point x = {u(rng), u(rng)};
        Covector xi = {u(rng), u(rng)};
        auto g = symbol_gradient(op, x, xi);
        for (int m = 0; m < 2; ++m) {
            Point xp = x, xm = x;
            xp[m] += step;
            xm[m] -= step;
            double fd = (principal_symbol(op, xp, xi) - principal_symbol(op, xm, xi)) /
                        (2.0 * step);
            CHECK(g.d_x[m] == doctest::Approx(fd).epsilon(1e-5));
            Covector xip = xi, xim = xi;
            xip[m] += step;
            xim[m] -= step;
            fd = (principal_symbol(op, x, xip) - principal_symbol(op, x, xim)) /
                 (2.0 * step);
            CHECK(g.d_xi[m] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("microhyperbolicity margin") {
    auto free2 = OperatorSpec::free_symbol(2);
    std::vector<Point> xs = {{0.0, 0.0}, {0.5, -0.3}};
    // On the energy sphere |grad_xi a| = 2 sqrt(tau) = 2.
    CHECK(microhyperbolicity_margin(free2, xs, 1.0) >= 2.0 - 1e-9);

    // Degenerate level: V == tau collapses the level set to a point.
    OperatorSpec degen(2,
                       {CoefficientField::constant(1.0), CoefficientField::constant(0.0),
                        CoefficientField::constant(1.0)},
                       {CoefficientField::constant(0.0), CoefficientField::constant(0.0)},
                       CoefficientField::constant(1.0));
    CHECK(microhyperbolicity_margin(degen, xs, 1.0) <= 1e-12);

    // Smooth V with |V - tau| >= 0.3.
    CoefficientField V;
    V.eval = [](const Point& x) { return 0.5 + 0.1 * std::sin(x[0] + x[1]); };
    V.partials = {[](const Point& x) { return 0.1 * std::cos(x[0] + x[1]); },
                  [](const Point& x) { return 0.1 * std::cos(x[0] + x[1]); }};
    OperatorSpec schrod(2,
                        {CoefficientField::constant(1.0), CoefficientField::constant(0.0),
                         CoefficientField::constant(1.0)},
                        {CoefficientField::constant(0.0), CoefficientField::constant(0.0)},
                        V);
    double pgap = 0.0;
    double margin = microhyperbolicity_margin(schrod, xs, 1.0, &pgap);
    CHECK(margin >= 0.3);
    CHECK(pgap >= 0.3);

    // Grid-minimization oracle: brute force over a fine xi-grid restricted to
    // a thin shell around the level set.
    double oracle = std::numeric_limits<double>::infinity();
    for (const auto& x : xs) {
        for (int i = -60; i <= 60; ++i) {
            for (int j = -60; j <= 60; ++j) {
                Covector xi = {i / 40.0, j / 40.0};
                double a = principal_symbol(schrod, x, xi);
                if (std::abs(a - 1.0) > 0.02) continue;
                auto g = symbol_gradient(schrod, x, xi);
                double gn = std::hypot(g.d_xi[0], g.d_xi[1]);
                oracle = std::min(oracle, std::abs(a - 1.0) + gn);
            }
        }
    }
    CHECK(margin == doctest::Approx(oracle).epsilon(0.05));
}

TEST_CASE("strong convexity: sphere and ellipse") {
    auto free2 = OperatorSpec::free_symbol(2);
    CHECK(strong_convexity_check(free2, {0.0, 0.0}, 1.0, 64) == doctest::Approx(1.0).epsilon(1e-6));
    // Curvature of the radius-sqrt(tau) sphere is 1/sqrt(tau).
    CHECK(strong_convexity_check(free2, {0.0, 0.0}, 4.0, 64) == doctest::Approx(0.5).epsilon(1e-6));

    auto free3 = OperatorSpec::free_symbol(3);
    CHECK(strong_convexity_check(free3, {0.0, 0.0, 0.0}, 1.0, 256) ==
          doctest::Approx(1.0).epsilon(1e-6));

    // Anisotropic metric diag(1,4): level curve is the ellipse with semi-axes
    // (1, 1/2); parametric-curvature oracle for x^2/A^2 + y^2/B^2 = 1 gives
    // min curvature B/A^2 at the major-axis ends of the parameterization.
    OperatorSpec aniso(2,
                       {CoefficientField::constant(1.0), CoefficientField::constant(0.0),
                        CoefficientField::constant(4.0)},
                       {CoefficientField::constant(0.0), CoefficientField::constant(0.0)},
                       CoefficientField::constant(0.0));
    const double A = 1.0, B = 0.5;
    double oracle = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4000; ++i) {
        double t = 2.0 * M_PI * i / 4000;
        double num = A * B;
        double den = std::pow(A * A * std::sin(t) * std::sin(t) +
                              B * B * std::cos(t) * std::cos(t), 1.5);
        oracle = std::min(oracle, num / den);
    }
    CHECK(oracle == doctest::Approx(B / (A * A)).epsilon(1e-6));
    CHECK(strong_convexity_check(aniso, {0.0, 0.0}, 1.0, 64) ==
          doctest::Approx(oracle).epsilon(1e-6));

    // tau below the symbol minimum: no level set.
    OperatorSpec lifted(2,
                        {CoefficientField::constant(1.0), CoefficientField::constant(0.0),
                         CoefficientField::constant(1.0)},
                        {CoefficientField::constant(0.0), CoefficientField::constant(0.0)},
                        CoefficientField::constant(2.0));
    CHECK_THROWS_AS(strong_convexity_check(lifted, {0.0, 0.0}, 1.0, 16), EmptyLevelSetError);
}

TEST_CASE("distances") {
    auto half = DomainGeometry::half_space(BoundaryCondition::dirichlet);
    auto dist = distances({{0.1, 0.0}, {0.2, 0.3}}, half);
    CHECK(dist.l0 == doctest::Approx(0.31623).epsilon(1e-4));
    CHECK(dist.l == doctest::Approx(0.61623).epsilon(1e-4));
    CHECK(dist.nu_x == doctest::Approx(0.1));
    CHECK(dist.nu_y == doctest::Approx(0.2));

    auto on_wall = distances({{0.0, 0.7}, {0.0, 0.7}}, half);
    CHECK(on_wall.l0 == 0.0);
    CHECK(on_wall.l == 0.0);
    CHECK(on_wall.nu_x == 0.0);
    CHECK(on_wall.nu_y == 0.0);

    auto full = DomainGeometry::full_space();
    auto df = distances({{0.0, 0.0}, {3.0, 4.0}}, full);
    CHECK(df.l0 == doctest::Approx(5.0));
    CHECK(df.l == doctest::Approx(5.0));

    // Symmetry under swapping x and y.
    auto ab = distances({{0.3, 1.0}, {0.1, 2.0}}, half);
    auto ba = distances({{0.1, 2.0}, {0.3, 1.0}}, half);
    CHECK(ab.l0 == ba.l0);
    CHECK(ab.l == ba.l);
}

TEST_CASE("reflect point") {
    auto half = DomainGeometry::half_space(BoundaryCondition::dirichlet);
    auto r = reflect_point({0.2, 0.3}, half);
    CHECK(r[0] == doctest::Approx(-0.2));
    CHECK(r[1] == doctest::Approx(0.3));

    auto fixed = reflect_point({0.0, 0.8}, half);
    CHECK(fixed[0] == 0.0);
    CHECK(fixed[1] == 0.8);

    auto twice = reflect_point(reflect_point({0.4, -1.0}, half), half);
    CHECK(twice[0] == doctest::Approx(0.4));
    CHECK(twice[1] == doctest::Approx(-1.0));

    CHECK_THROWS_AS(reflect_point({0.1, 0.1}, DomainGeometry::full_space()), Error);
}

TEST_CASE("boundary symbol") {
    auto free2 = OperatorSpec::free_symbol(2);
    CHECK(boundary_symbol(free2, {0.7}, {0.5}) == doctest::Approx(0.25));

    // V restricted to the wall is 0.3; the x_1-dependent part drops out.
    OperatorSpec op = OperatorSpec::free_symbol(2);
    OperatorSpec custom(2,
                        {CoefficientField::constant(1.0), CoefficientField::constant(0.0),
                         CoefficientField::constant(1.0)},
                        {CoefficientField::constant(0.0), CoefficientField::constant(0.0)},
                        CoefficientField::sum(CoefficientField::constant(0.3),
                                              CoefficientField::linear(0, 0.7)));
    CHECK(boundary_symbol(custom, {2.0}, {0.6}) == doctest::Approx(0.36 + 0.3).epsilon(1e-14));

    // Definitional identity against the unrestricted symbol.
    auto wavy = make_wavy_op();
    for (double xp : {-0.4, 0.1, 0.9}) {
        for (double xip : {-1.1, 0.2, 0.8}) {
            CHECK(boundary_symbol(wavy, {xp}, {xip}) ==
                  doctest::Approx(principal_symbol(wavy, {0.0, xp}, {0.0, xip})).epsilon(1e-14));
        }
    }
}

TEST_CASE("kappa") {
    auto lin = OperatorSpec::linear_potential(2, 1.0);
    CHECK(kappa(lin, {0.0}, {0.0}, 1.0) == doctest::Approx(1.0));

    auto free2 = OperatorSpec::free_symbol(2);
    CHECK(kappa(free2, {0.3}, {0.4}, 1.0) == doctest::Approx(0.0));

    auto lin2 = OperatorSpec::linear_potential(2, 0.25);
    CHECK(kappa(lin2, {0.0}, {std::sqrt(0.75)}, 1.0) == doctest::Approx(0.5));

    CHECK_THROWS_AS(kappa(lin, {0.0}, {1.2}, 1.0), OutOfRangeError);

    // Invariance under V -> V + c, tau -> tau + c.
    auto shifted = OperatorSpec(2,
                                {CoefficientField::constant(1.0), CoefficientField::constant(0.0),
                                 CoefficientField::constant(1.0)},
                                {CoefficientField::constant(0.0), CoefficientField::constant(0.0)},
                                CoefficientField::sum(CoefficientField::linear(0, 0.25),
                                                      CoefficientField::constant(0.4)));
    CHECK(kappa(shifted, {0.0}, {0.5}, 1.4) == doctest::Approx(kappa(lin2, {0.0}, {0.5}, 1.0)));
}

TEST_CASE("symbol dominates potential for zero magnetic field") {
    auto op = OperatorSpec::linear_potential(2, 0.8);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        Point x = {std::abs(u(rng)), u(rng)};
        Covector xi = {u(rng), u(rng)};
        CHECK(principal_symbol(op, x, xi) >= op.potential()(x) - 1e-12);
    }
}

TEST_CASE("coefficient field partials match finite differences") {
    auto op = make_wavy_op();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double step = 1e-4;
    for (int rep = 0; rep < 30; ++rep) {
        Point x = {u(rng), u(rng)};
        for (int j = 0; j < 2; ++j) {
            for (int k = j; k < 2; ++k) {
                const auto& f = op.metric(j, k);
                for (int m = 0; m < 2; ++m) {
                    Point xp = x, xm = x;
                    xp[m] += step;
                    xm[m] -= step;
                    double fd = (f(xp) - f(xm)) / (2.0 * step);
                    CHECK(f.partial(m, x) == doctest::Approx(fd).epsilon(1e-5));
                }
            }
        }
    }
    // Finite-difference fallback for fields without analytic partials.
    auto g = CoefficientField::from_function(
        [](const Point& x) { return std::exp(0.3 * x[0]) * std::cos(x[1]); });
    CHECK(g.partial(0, {0.5, 0.2}) ==
          doctest::Approx(0.3 * std::exp(0.15) * std::cos(0.2)).epsilon(1e-8));
}

TEST_CASE("operator structural invariants") {
    auto op = make_wavy_op();
    // Symmetric storage: metric(j,k) and metric(k,j) are the same field.
    CHECK(&op.metric(0, 1) == &op.metric(1, 0));

    std::vector<Point> samples;
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 50; ++i) samples.push_back({u(rng), u(rng)});
    CHECK(op.min_metric_eigenvalue(samples) > 0.0);

    auto free3 = OperatorSpec::free_symbol(3);
    std::vector<Point> s3 = {{0.1, 0.2, 0.3}, {-1.0, 0.5, 2.0}};
    CHECK(free3.min_metric_eigenvalue(s3) == doctest::Approx(1.0));

    // Wall normalization for the boundary-attached named specs.
    auto lin = OperatorSpec::linear_potential(2, 0.5);
    CHECK(lin.max_normalization_defect(samples) == doctest::Approx(0.0));
    CHECK(OperatorSpec::free_symbol(2).max_normalization_defect(samples) == doctest::Approx(0.0));
}
