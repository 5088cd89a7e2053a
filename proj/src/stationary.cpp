#include "skl/stationary.hpp"

#include <cmath>
#include <vector>

#include "skl/error.hpp"
#include "skl/symbol.hpp"

namespace skl {

namespace {

// Solve M u = b in place by Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> M, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(M[r][c]) > std::abs(M[piv][c])) piv = r;
        if (std::abs(M[piv][c]) < 1e-14) throw ConvergenceError("singular stationary-point system");
        std::swap(M[c], M[piv]);
        std::swap(b[c], b[piv]);
        for (int r = c + 1; r < n; ++r) {
            const double f = M[r][c] / M[c][c];
            for (int k = c; k < n; ++k) M[r][k] -= f * M[c][k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> u(n);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int k = r + 1; k < n; ++k) acc -= M[r][k] * u[k];
        u[r] = acc / M[r][r];
    }
    return u;
}

// Newton on F(theta, t) = [x - y + t grad_theta a(y, theta); a(y, theta) - tau]
// from the supplied seed. The theta-Hessian of a is the constant 2 G(y).
struct Solution {
    Covector theta;
    double t;
};

Solution solve_branch(const OperatorSpec& op, const Point& x, const Point& y, double tau,
                      Covector theta, double t) {
    const int d = op.dim();
    std::vector<std::vector<double>> G(d, std::vector<double>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G[i][j] = op.metric(i, j).eval(y);

    for (int it = 0; it < 60; ++it) {
        const SymbolGradient g = symbol_gradient(op, y, theta);
        std::vector<double> F(d + 1);
        double fn = 0.0;
        for (int i = 0; i < d; ++i) {
            F[i] = x[i] - y[i] + t * g.d_xi[i];
            fn += F[i] * F[i];
        }
        F[d] = principal_symbol(op, y, theta) - tau;
        fn = std::sqrt(fn + F[d] * F[d]);
        if (fn < 1e-12 * (1.0 + std::abs(tau))) return {theta, t};

        std::vector<std::vector<double>> J(d + 1, std::vector<double>(d + 1, 0.0));
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) J[i][j] = t * 2.0 * G[i][j];
            J[i][d] = g.d_xi[i];
            J[d][i] = g.d_xi[i];
        }
        std::vector<double> rhs(d + 1);
        for (int i = 0; i <= d; ++i) rhs[i] = -F[i];
        const std::vector<double> du = solve_dense(J, rhs);
        for (int i = 0; i < d; ++i) theta[i] += du[i];
        t += du[d];
    }
    throw ConvergenceError("stationary-point Newton did not converge");
}

}  // namespace

StationaryPoints stationary_points(const OperatorSpec& op, const Point& x, const Point& y,
                                   double tau) {
    const int d = op.dim();
    if (static_cast<int>(x.size()) != d || static_cast<int>(y.size()) != d)
        throw DimensionError("stationary-point endpoints have wrong dimension");
    double l0 = 0.0;
    for (int i = 0; i < d; ++i) l0 += (x[i] - y[i]) * (x[i] - y[i]);
    l0 = std::sqrt(l0);
    if (l0 < 1e-14) throw OutOfRangeError("coincident points have no stationary covectors");

    Covector center(d);
    for (int i = 0; i < d; ++i) center[i] = op.magnetic(i).eval(y);
    const double depth = tau - principal_symbol(op, y, center);
    if (depth <= 1e-14 * (1.0 + std::abs(tau)))
        throw EmptyLevelSetError("no covectors at this energy over the base point");

    // Isotropic seed: theta on the level set along -/+ u, u the unit chord.
    Covector u(d);
    for (int i = 0; i < d; ++i) u[i] = (x[i] - y[i]) / l0;
    double quad = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) quad += op.metric(i, j).eval(y) * u[i] * u[j];
    const double mu = std::sqrt(depth / quad);

    Covector seed_p(d), seed_m(d);
    for (int i = 0; i < d; ++i) {
        seed_p[i] = center[i] - mu * u[i];
        seed_m[i] = center[i] + mu * u[i];
    }
    const double t_seed = l0 / (2.0 * mu * quad);

    const Solution plus = solve_branch(op, x, y, tau, seed_p, t_seed);
    const Solution minus = solve_branch(op, x, y, tau, seed_m, -t_seed);
    if (!(plus.t > 0.0 && minus.t < 0.0))
        throw ConvergenceError("stationary branches lost their time-sign convention");
    return {plus.theta, minus.theta, plus.t, minus.t};
}

}  // namespace skl
