#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <random>

#include "skl/spectral_basis.hpp"
#include "skl/taper.hpp"

using namespace skl;

namespace {

// Composite Simpson on [a,b] with n panels (n even).
template <typename F>
double simpson(F f, double a, double b, int n) {
    double s = f(a) + f(b);
    double dx = (b - a) / n;
    for (int i = 1; i < n; ++i) s += f(a + i * dx) * (i % 2 ? 4.0 : 2.0);
    return s * dx / 3.0;
}

}  // namespace

TEST_CASE("interval basis closed forms") {
    auto dir = interval_basis(1.0, BoundaryCondition::dirichlet, 0.5, 8);
    CHECK(dir.eigenvalues[0] == doctest::Approx((M_PI / 2) * (M_PI / 2)).epsilon(1e-12));
    CHECK(dir.phi(0, {0.5}) == doctest::Approx(std::sqrt(2.0)));

    auto neu = interval_basis(1.0, BoundaryCondition::neumann, 0.5, 8);
    CHECK(neu.eigenvalues[0] == 0.0);
    CHECK(neu.phi(0, {0.1}) == doctest::Approx(1.0));
    CHECK(neu.phi(0, {0.9}) == doctest::Approx(1.0));

    for (std::size_t n = 1; n < dir.eigenvalues.size(); ++n) {
        CHECK(dir.eigenvalues[n] > dir.eigenvalues[n - 1]);
    }
}

TEST_CASE("interval basis orthonormality (quadrature Gram)") {
    for (auto bc : {BoundaryCondition::dirichlet, BoundaryCondition::neumann}) {
        auto b = interval_basis(1.0, bc, 0.2, 12);
        for (int i = 0; i < 10; ++i) {
            for (int j = i; j < 10; ++j) {
                double g = simpson([&](double x) { return b.phi(i, {x}) * b.phi(j, {x}); },
                                   0.0, 1.0, 4000);
                CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-6).scale(1.0));
            }
        }
    }
}

TEST_CASE("fd basis reproduces closed-form eigenvalues") {
    auto exact = interval_basis(1.0, BoundaryCondition::dirichlet, 0.1, 12);
    auto fd = fd_sturm_liouville_basis(1.0, BoundaryCondition::dirichlet, 0.1,
                                       CoefficientField::constant(0.0), 2000);
    REQUIRE(fd.eigenvalues.size() >= 10);
    for (int n = 0; n < 10; ++n) {
        CHECK(fd.eigenvalues[n] ==
              doctest::Approx(exact.eigenvalues[n]).epsilon(1e-4));
    }
    // Ascending and simple.
    for (std::size_t n = 1; n < fd.eigenvalues.size(); ++n) {
        CHECK(fd.eigenvalues[n] > fd.eigenvalues[n - 1]);
    }
    // Native-grid Gram matrix of the first 10 eigenfunctions.
    const auto& d = *fd.fd_data;
    const double dx = 1.0 / (d.grid_n + 1);
    for (int i = 0; i < 10; ++i) {
        for (int j = i; j < 10; ++j) {
            double g = 0.0;
            for (int k = 0; k < d.grid_n; ++k) g += d.vectors[i][k] * d.vectors[j][k];
            g *= dx;
            CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
        }
    }
}

TEST_CASE("fd basis: constant potential shifts the spectrum") {
    auto base = fd_sturm_liouville_basis(1.0, BoundaryCondition::dirichlet, 0.1,
                                         CoefficientField::constant(0.0), 600);
    auto shifted = fd_sturm_liouville_basis(1.0, BoundaryCondition::dirichlet, 0.1,
                                            CoefficientField::constant(0.7), 600);
    for (std::size_t n = 0; n < std::min(base.eigenvalues.size(), shifted.eigenvalues.size());
         ++n) {
        CHECK(shifted.eigenvalues[n] == doctest::Approx(base.eigenvalues[n] + 0.7).epsilon(1e-9));
    }
}

TEST_CASE("fd eigenvalue error scales like grid_n^-2") {
    const double exact = 9.0 * M_PI * M_PI * 0.01;  // n = 3 mode at h = 0.1
    std::vector<double> ns = {250, 500, 1000, 2000}, errs;
    for (double n : ns) {
        auto fd = fd_sturm_liouville_basis(1.0, BoundaryCondition::dirichlet, 0.1,
                                           CoefficientField::constant(0.0),
                                           static_cast<int>(n));
        errs.push_back(std::abs(fd.eigenvalues[2] - exact));
    }
    // Log-log slope against grid_n.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        double lx = std::log(ns[i]), ly = std::log(errs[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.15));
}

TEST_CASE("neumann fd basis keeps the constant mode") {
    auto fd = fd_sturm_liouville_basis(1.0, BoundaryCondition::neumann, 0.1,
                                       CoefficientField::constant(0.0), 500);
    CHECK(std::abs(fd.eigenvalues[0]) < 1e-10);
    CHECK(fd.phi(0, {0.3}) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("separable basis mode count matches lattice enumeration") {
    // h = 1/8 makes every eigenvalue sum exact in binary: (n^2 + m^2) / 64.
    auto bx = interval_basis(M_PI, BoundaryCondition::dirichlet, 0.125, 20);
    auto by = interval_basis(M_PI, BoundaryCondition::dirichlet, 0.125, 20);
    auto box = separable_2d_basis(bx, by, 1.0);
    int count = 0;
    for (int n = 1; n <= 20; ++n) {
        for (int m = 1; m <= 20; ++m) {
            if (n * n + m * m <= 64) ++count;
        }
    }
    CHECK(static_cast<int>(box.eigenvalues.size()) == count);

    // Degenerate pair (3,4)/(4,3) kept with multiplicity 2 at 25/64.
    int mult = 0;
    for (double lam : box.eigenvalues) {
        if (lam == 0.390625) ++mult;
    }
    CHECK(mult == 2);

    // Eigenvalues sitting exactly at tau are counted (both (3,4) modes).
    int at_tau = 0;
    for (int n = 1; n <= 20; ++n) {
        for (int m = 1; m <= 20; ++m) {
            if (n * n + m * m <= 25) ++at_tau;
        }
    }
    auto tie = separable_2d_basis(bx, by, 0.390625);
    CHECK(static_cast<int>(tie.eigenvalues.size()) == at_tau);
    CHECK(tie.eigenvalues.back() == 0.390625);

    // Kernel symmetry in x,y.
    Point x = {1.1, 0.7}, y = {2.0, 2.4};
    CHECK(exact_projector_kernel(box, x, y, 1.0) == exact_projector_kernel(box, y, x, 1.0));

    CHECK_THROWS_AS(separable_2d_basis(bx, by, 50.0), OutOfRangeError);
}

TEST_CASE("projector kernel basics") {
    auto b = interval_basis(1.0, BoundaryCondition::dirichlet, 0.5, 10);
    // Only the n=1 mode sits below tau=3.
    CHECK(exact_projector_kernel(b, {0.5}, {0.5}, 3.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(exact_projector_kernel(b, {0.3}, {0.8}, 1.0) == 0.0);
    CHECK_THROWS_AS(exact_projector_kernel(b, {0.5}, {0.5}, 1e6), OutOfRangeError);

    // Cauchy-Schwarz over the mode sum.
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    auto big = interval_basis(1.0, BoundaryCondition::dirichlet, 0.05, 40);
    for (int rep = 0; rep < 50; ++rep) {
        Point x = {u(rng)}, y = {u(rng)};
        double tau = 1.0 + u(rng);
        double exy = exact_projector_kernel(big, x, y, tau);
        double exx = exact_projector_kernel(big, x, x, tau);
        double eyy = exact_projector_kernel(big, y, y, tau);
        CHECK(exy * exy <= exx * eyy + 1e-10);
    }

    // Positivity and monotonicity in tau on the diagonal.
    double prev = -1.0;
    for (double tau = 0.1; tau <= 4.0; tau += 0.13) {
        double e = exact_projector_kernel(big, {0.37}, {0.37}, tau);
        CHECK(e >= 0.0);
        CHECK(e >= prev - 1e-12);
        prev = e;
    }
}

TEST_CASE("bump function") {
    CHECK(bump_chi(0.0) == 1.0);
    CHECK(bump_chi(0.4) == 1.0);
    CHECK(bump_chi(0.5) == 1.0);
    CHECK(bump_chi(1.1) == 0.0);
    CHECK(bump_chi(1.0) == 0.0);
    for (double t = -1.2; t <= 1.2; t += 0.05) {
        CHECK(bump_chi(-t) == bump_chi(t));
        CHECK(bump_chi(t) >= 0.0);
        CHECK(bump_chi(t) <= 1.0);
    }
    // Transition is strictly between the flat zones.
    CHECK(bump_chi(0.75) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("bump fourier transform") {
    // chi_hat(0) = 2 * (1/2 + int_{1/2}^1 chi) = 3/2 exactly (blend symmetry).
    CHECK(bump_fourier(0.0).real() == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(bump_fourier(3.7).imag() == 0.0);
    CHECK(bump_fourier(-3.7).real() == doctest::Approx(bump_fourier(3.7).real()).epsilon(1e-13));

    // Fourier inversion at t = 0 by independent Simpson quadrature.
    double half = simpson([](double s) { return bump_fourier(s).real(); }, 0.0, 500.0, 50000);
    CHECK(half / M_PI == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("smoothed step against high-precision reference") {
    auto taper = TaperSpec::make(1.0);
    // Reference values computed from the defining quadrature at 30 digits.
    const struct {
        double u, w;
    } ref[] = {
        {0.5, 0.61840458726529345}, {1.0, 0.73114390285806119},
        {2.0, 0.91996726320152844}, {5.0, 1.0685952343569578},
        {10.0, 0.98409186649181611}, {20.0, 1.0014398813166372},
        {50.0, 0.99981157889614983}, {150.0, 0.99999970121590252},
    };
    for (const auto& r : ref) {
        CHECK(taper.w(r.u) == doctest::Approx(r.w).epsilon(1e-8));
        CHECK(taper.w(-r.u) == doctest::Approx(1.0 - r.w).epsilon(1e-8));
    }
}

TEST_CASE("smoothed step tails and shape") {
    auto taper = TaperSpec::make(1.0);
    // Normalization at the ends of the table.
    CHECK(std::abs(taper.w(511.9) - 1.0) <= 1e-8);
    CHECK(std::abs(taper.w(-511.9)) <= 1e-8);
    CHECK(taper.w(1e9) == 1.0);
    CHECK(taper.w(-1e9) == 0.0);

    // Measured tail envelope (the blend's tails are heavier than a naive
    // 1e-6 at |u| = 50; these are the attained levels).
    for (double u = 50.0; u <= 511.0; u += 0.37) {
        double d = std::abs(taper.w(u) - 1.0);
        CHECK(d <= 5e-4);
        if (u >= 150.0) CHECK(d <= 1e-6);
        if (u >= 200.0) CHECK(d <= 1e-7);
    }

    // Monotone through the step zone before the oscillation band.
    double prev = -1.0;
    for (double u = -2.0; u <= 2.0; u += 0.05) {
        double w = taper.w(u);
        CHECK(w > prev);
        prev = w;
    }
}

TEST_CASE("tauberian kernel saturation limits") {
    SpectralBasis single;
    single.h = 0.1;
    single.dim = 1;
    single.eigenvalues = {0.0};
    single.validity_cap = 10.0;
    single.eigenfunction_eval = [](std::size_t, const Point&) { return 0.7; };

    auto taper = TaperSpec::make(1.0);
    double full = tauberian_kernel(single, taper, {0.0}, {0.0}, 1.0, 0.1);
    CHECK(full == doctest::Approx(0.49).epsilon(0.02));

    single.eigenvalues = {2.0};
    double empty = tauberian_kernel(single, taper, {0.0}, {0.0}, 1.0, 0.1);
    CHECK(std::abs(empty) <= 0.02 * 0.49);
}

TEST_CASE("tauberian kernel reaches the projector across a gap") {
    // Spectrum 0.0247 n^2; tau = 1 sits in the (0.888, 1.209) gap.
    auto b = interval_basis(1.0, BoundaryCondition::dirichlet, 0.05, 30);
    Point x = {0.3}, y = {0.55};
    double e = exact_projector_kernel(b, x, y, 1.0);
    double prev_err = 1e9;
    for (double T : {10.0, 20.0, 40.0, 80.0}) {
        double et = tauberian_kernel(b, TaperSpec::make(T), x, y, 1.0, 0.05);
        double err = std::abs(et - e);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err <= 1e-6);
}

TEST_CASE("fd basis serialization round trip") {
    auto fd = fd_sturm_liouville_basis(0.8, BoundaryCondition::dirichlet, 0.1,
                                       CoefficientField::linear(0, 0.5), 300);
    const char* path = "fd_basis_cache_test.txt";
    save_basis(fd, path);
    auto back = load_basis(path);
    std::remove(path);

    REQUIRE(back.eigenvalues.size() == fd.eigenvalues.size());
    for (std::size_t n = 0; n < fd.eigenvalues.size(); ++n) {
        CHECK(back.eigenvalues[n] == fd.eigenvalues[n]);
    }
    for (double xv : {0.05, 0.33, 0.61, 0.79}) {
        CHECK(back.phi(2, {xv}) == fd.phi(2, {xv}));
    }

    auto closed = interval_basis(1.0, BoundaryCondition::dirichlet, 0.5, 4);
    CHECK_THROWS_AS(save_basis(closed, path), IoError);
}
