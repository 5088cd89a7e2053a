#include "skl/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "skl/bessel.hpp"
#include "skl/error.hpp"
#include "skl/symbol.hpp"

namespace skl {

namespace {

using cplx = std::complex<double>;

double sinc(double t) {
    if (std::abs(t) < 1e-8) return 1.0 - t * t / 6.0;
    return std::sin(t) / t;
}

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1), symmetric
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-15) break;
        }
        rule.nodes[i] = t;
        rule.weights[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return rule;
}

// Symbol coefficients frozen at one point: a(xi) = (xi-V)^T G (xi-V) + V0.
struct FrozenQuadratic {
    int d = 0;
    double G[3][3] = {};
    double V[3] = {};
    double V0 = 0.0;
};

FrozenQuadratic freeze(const OperatorSpec& op, const Point& w) {
    FrozenQuadratic f;
    f.d = op.dim();
    for (int j = 0; j < f.d; ++j) {
        f.V[j] = op.magnetic(j)(w);
        for (int k = j; k < f.d; ++k) f.G[j][k] = f.G[k][j] = op.metric(j, k)(w);
    }
    f.V0 = op.potential()(w);
    return f;
}

// Freeze across the wall: the half-space problem extends by mirror symmetry,
// so w_1 < 0 evaluates coefficients at (|w_1|, w') with the normal-tangent
// couplings (g^{1k}, V_1) flipped in sign.
FrozenQuadratic freeze_extended(const OperatorSpec& op, const Point& w) {
    if (w.empty() || w[0] >= 0.0) return freeze(op, w);
    Point wm = w;
    wm[0] = -wm[0];
    FrozenQuadratic f = freeze(op, wm);
    for (int k = 1; k < f.d; ++k) {
        f.G[0][k] = -f.G[0][k];
        f.G[k][0] = -f.G[k][0];
    }
    f.V[0] = -f.V[0];
    return f;
}

// Closed xi_1 integral over one slice of the sublevel set. depth is the gap
// tau minus the slice minimum, so the quadratic-root discriminant reduces to
// G00 * depth exactly; m is the normal-tangential coupling sum g^{1j} p_j.
cplx slice_integral(const FrozenQuadratic& f, double m, double depth, double c1) {
    const double disc = std::max(f.G[0][0] * depth, 0.0);
    const double root = std::sqrt(disc);
    const double t_lo = f.V[0] + (-m - root) / f.G[0][0];
    const double t_hi = f.V[0] + (-m + root) / f.G[0][0];
    if (std::abs(c1) < 1e-14) return cplx(t_hi - t_lo, 0.0);
    const cplx i1(0.0, 1.0);
    return (std::exp(i1 * (c1 * t_hi)) - std::exp(i1 * (c1 * t_lo))) / (i1 * c1);
}

struct QuadOutcome {
    cplx integral;
    double err = 0.0;
    double scale = 0.0;  // crude bound on |integral| for tolerance floors
};

// d = 2: outer variable xi_2 = V_2 + r sin(phi) walks the projected interval;
// the cos(phi) Jacobian removes the square-root edge of the slice length.
QuadOutcome sublevel_oscillatory_2d(const FrozenQuadratic& f, double c1, double c2,
                                    double umax) {
    const double S = f.G[1][1] - f.G[0][1] * f.G[0][1] / f.G[0][0];
    const double r = std::sqrt(umax / S);
    QuadOutcome out;
    out.scale = 2.0 * r * 2.0 * std::sqrt(umax / f.G[0][0]) + 1e-300;
    cplx prev(0.0, 0.0);
    bool have_prev = false;
    for (int mgrid = 32; mgrid <= 4096; mgrid *= 2) {
        const GaussRule rule = gauss_legendre(mgrid);
        cplx acc(0.0, 0.0);
        for (int i = 0; i < mgrid; ++i) {
            const double phi = 0.5 * M_PI * rule.nodes[i];
            const double sp = std::sin(phi), cp = std::cos(phi);
            const double p2 = r * sp;
            const double xi2 = f.V[1] + p2;
            const double m = f.G[0][1] * p2;
            const double depth = umax * cp * cp;  // tau - slice minimum
            const cplx inner = slice_integral(f, m, depth, c1);
            acc += rule.weights[i] * std::exp(cplx(0.0, c2 * xi2)) * inner * (r * cp);
        }
        acc *= 0.5 * M_PI;
        if (have_prev) {
            out.err = std::abs(acc - prev);
            if (out.err <= std::max(1e-6 * std::abs(acc), 1e-12 * out.scale)) {
                out.integral = acc;
                return out;
            }
        }
        prev = acc;
        have_prev = true;
    }
    throw ConvergenceError("weyl_quadrature: 2d grid doubling did not converge");
}

// d = 3: outer ellipse in xi' parametrized by (sin(sigma), psi) polar
// coordinates along the Schur-complement axes.
QuadOutcome sublevel_oscillatory_3d(const FrozenQuadratic& f, double c1, double c2, double c3,
                                    double umax) {
    const double g0 = f.G[0][0];
    const double S11 = f.G[1][1] - f.G[0][1] * f.G[0][1] / g0;
    const double S12 = f.G[1][2] - f.G[0][1] * f.G[0][2] / g0;
    const double S22 = f.G[2][2] - f.G[0][2] * f.G[0][2] / g0;
    const double tr = S11 + S22;
    const double det = S11 * S22 - S12 * S12;
    const double gap = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    const double lam1 = 0.5 * (tr + gap), lam2 = 0.5 * (tr - gap);
    double e1x, e1y;
    if (std::abs(S12) > 1e-14 * tr) {
        e1x = S12;
        e1y = lam1 - S11;
    } else {
        e1x = (S11 >= S22) ? 1.0 : 0.0;
        e1y = 1.0 - e1x;
    }
    const double n1 = std::hypot(e1x, e1y);
    e1x /= n1;
    e1y /= n1;
    const double e2x = -e1y, e2y = e1x;
    const double r1 = std::sqrt(umax / lam1), r2 = std::sqrt(umax / lam2);

    QuadOutcome out;
    out.scale = M_PI * r1 * r2 * 2.0 * std::sqrt(umax / g0) + 1e-300;
    cplx prev(0.0, 0.0);
    bool have_prev = false;
    for (int mgrid = 16; mgrid <= 1024; mgrid *= 2) {
        const GaussRule rule = gauss_legendre(mgrid);
        const int npsi = 4 * mgrid;
        const double dpsi = 2.0 * M_PI / npsi;
        cplx acc(0.0, 0.0);
        for (int i = 0; i < mgrid; ++i) {
            const double sig = 0.25 * M_PI * (rule.nodes[i] + 1.0);
            const double ss = std::sin(sig), cs = std::cos(sig);
            const double depth = umax * cs * cs;
            cplx ring(0.0, 0.0);
            for (int j = 0; j < npsi; ++j) {
                const double psi = (j + 0.5) * dpsi;
                const double a1 = r1 * std::cos(psi), a2 = r2 * std::sin(psi);
                const double p2 = ss * (a1 * e1x + a2 * e2x);
                const double p3 = ss * (a1 * e1y + a2 * e2y);
                const double xi2 = f.V[1] + p2, xi3 = f.V[2] + p3;
                const double m = f.G[0][1] * p2 + f.G[0][2] * p3;
                const cplx inner = slice_integral(f, m, depth, c1);
                ring += std::exp(cplx(0.0, c2 * xi2 + c3 * xi3)) * inner;
            }
            acc += rule.weights[i] * ring * (r1 * r2 * ss * cs) * dpsi;
        }
        acc *= 0.25 * M_PI;
        if (have_prev) {
            out.err = std::abs(acc - prev);
            if (out.err <= std::max(1e-6 * std::abs(acc), 1e-12 * out.scale)) {
                out.integral = acc;
                return out;
            }
        }
        prev = acc;
        have_prev = true;
    }
    throw ConvergenceError("weyl_quadrature: 3d grid doubling did not converge");
}

}  // namespace

double weyl_free_closed_form(const std::vector<double>& z, double tau, double h, int d) {
    if (tau <= 0.0 || h <= 0.0) throw OutOfRangeError("weyl_free_closed_form: need tau, h > 0");
    if (d != 2 && d != 3) throw DimensionError("weyl_free_closed_form: d must be 2 or 3");
    const double radius = std::sqrt(tau);
    double zn = 0.0;
    for (double zi : z) zn += zi * zi;
    zn = std::sqrt(zn);
    const double q = zn / h;
    const double pref = std::pow(2.0 * M_PI * h, -d);
    const double u = radius * q;
    if (d == 2) {
        if (u < 1e-12) return pref * M_PI * radius * radius;
        return pref * 2.0 * M_PI * radius * bessel_j(1.0, u) / q;
    }
    if (u < 1e-3) {
        // (sin u - u cos u)/q^3 = R^3 (u^2/3 - u^4/30 + ...)/u^2
        return pref * 4.0 * M_PI * radius * radius * radius *
               (1.0 / 3.0 - u * u / 30.0 + u * u * u * u / 840.0);
    }
    return pref * 4.0 * M_PI * (std::sin(u) - u * std::cos(u)) / (q * q * q);
}

double weyl_quadrature_at(const OperatorSpec& op, const Point& w, const std::vector<double>& z,
                          double tau, double h, double* err_out) {
    const int d = op.dim();
    if (static_cast<int>(w.size()) != d || static_cast<int>(z.size()) != d) {
        throw DimensionError("weyl_quadrature: point dimension mismatch");
    }
    const FrozenQuadratic f = freeze_extended(op, w);
    const double umax = tau - f.V0;
    if (umax <= 1e-14 * (1.0 + std::abs(tau))) {
        throw EmptyLevelSetError("weyl_quadrature: sublevel set is empty");
    }
    const double pref = std::pow(2.0 * M_PI * h, -d);
    const double c1 = z[0] / h;

    if (d == 1) {
        const cplx inner = slice_integral(f, 0.0, umax, c1);
        if (err_out) *err_out = 0.0;
        return pref * inner.real();
    }

    QuadOutcome out;
    if (d == 2) {
        out = sublevel_oscillatory_2d(f, c1, z[1] / h, umax);
    } else if (d == 3) {
        out = sublevel_oscillatory_3d(f, c1, z[1] / h, z[2] / h, umax);
    } else {
        throw DimensionError("weyl_quadrature: d must be 1, 2 or 3");
    }
    if (op.magnetic_is_zero() && std::abs(out.integral.imag()) > 1e-8 * out.scale) {
        throw Error("weyl_quadrature: imaginary part fails central symmetry");
    }
    if (err_out) *err_out = pref * out.err;
    return pref * out.integral.real();
}

double weyl_quadrature(const OperatorSpec& op, const PointPair& pair, double tau, double h,
                       double* err_out) {
    const int d = op.dim();
    Point w(d);
    std::vector<double> z(d);
    for (int j = 0; j < d; ++j) {
        w[j] = 0.5 * (pair.x[j] + pair.y[j]);
        z[j] = pair.x[j] - pair.y[j];
    }
    return weyl_quadrature_at(op, w, z, tau, h, err_out);
}

double weyl_boundary(const OperatorSpec& op, const PointPair& pair, double tau, double h,
                     BoundaryCondition bc) {
    if (bc == BoundaryCondition::none) {
        throw Error("weyl_boundary: needs dirichlet or neumann");
    }
    const double sign = (bc == BoundaryCondition::dirichlet) ? -1.0 : 1.0;
    const int d = op.dim();
    Point yr = pair.y;
    yr[0] = -yr[0];

    double direct, mirrored;
    if (op.is_free()) {
        std::vector<double> z(d), zr(d);
        for (int j = 0; j < d; ++j) {
            z[j] = pair.x[j] - pair.y[j];
            zr[j] = pair.x[j] - yr[j];
        }
        direct = weyl_free_closed_form(z, tau, h, d);
        mirrored = weyl_free_closed_form(zr, tau, h, d);
    } else {
        direct = weyl_quadrature(op, pair, tau, h);
        mirrored = weyl_quadrature(op, {pair.x, yr}, tau, h);
    }
    return direct + sign * mirrored;
}

double correction_term(const OperatorSpec& op, const PointPair& pair, double tau, double h,
                       BoundaryCondition bc) {
    if (op.dim() != 2) throw DimensionError("correction_term: requires d = 2");
    if (bc == BoundaryCondition::none) throw Error("correction_term: needs dirichlet or neumann");
    const double sign = (bc == BoundaryCondition::dirichlet) ? -1.0 : 1.0;

    const double w2 = 0.5 * (pair.x[1] + pair.y[1]);
    const Point wall_pt = {0.0, w2};
    const FrozenQuadratic f = freeze(op, wall_pt);

    // Wall-frozen tangential symbol b(xi_2) is an upward parabola.
    const double g11 = f.G[1][1];
    const double q2_min = f.G[0][1] * f.V[0] / g11;
    const double center = f.V[1] + q2_min;
    const double b_min =
        f.G[0][0] * f.V[0] * f.V[0] - f.G[0][1] * f.G[0][1] * f.V[0] * f.V[0] / g11 + f.V0;
    const double umax = tau - b_min;
    const double g_c = 1e-6 * tau;
    if (umax <= g_c) return 0.0;

    const double c1 = (pair.x[0] + pair.y[0]) / h;
    const double c2 = (pair.x[1] - pair.y[1]) / h;
    const double qsq = pair.x[0] * pair.x[0] + pair.y[0] * pair.y[0];

    auto integrand = [&](double xi2) -> cplx {
        const double dev = xi2 - center;
        const double u = umax - g11 * dev * dev;
        if (u <= g_c) return cplx(0.0, 0.0);
        const double s = std::sqrt(u);
        const double axp = wall_symbol_slope(op, {w2}, {xi2});
        const double gamma = -axp * qsq / (4.0 * u * h);
        const double inner = 2.0 * s * (sinc((c1 + gamma) * s) - sinc(c1 * s));
        return std::exp(cplx(0.0, c2 * xi2)) * inner;
    };

    const double rho_gc = std::sqrt((umax - g_c) / g11);
    const double u_edge = std::min(std::max(8.0 * g_c, 0.01 * umax), 0.5 * umax);
    const double rho_edge = std::sqrt((umax - u_edge) / g11);
    const double v_lo = std::log(g_c), v_hi = std::log(u_edge);
    const double scale = 4.0 * rho_gc * std::sqrt(umax) + 1e-300;

    cplx prev(0.0, 0.0);
    bool have_prev = false;
    double err = 0.0;
    for (int rounds = 0; rounds < 7; ++rounds) {
        const int n_bulk = 2048 << rounds;
        const int n_edge = 4096 << rounds;
        cplx acc(0.0, 0.0);
        // Bulk: uniform midpoint in xi_2 where u >= u_edge.
        const double dxi = 2.0 * rho_edge / n_bulk;
        for (int i = 0; i < n_bulk; ++i) {
            acc += integrand(center - rho_edge + (i + 0.5) * dxi);
        }
        acc *= dxi;
        // Edges: log-graded in u resolves the glancing oscillation.
        const double dv = (v_hi - v_lo) / n_edge;
        for (int side = -1; side <= 1; side += 2) {
            cplx edge(0.0, 0.0);
            for (int i = 0; i < n_edge; ++i) {
                const double u = std::exp(v_lo + (i + 0.5) * dv);
                const double xi2 = center + side * std::sqrt((umax - u) / g11);
                const double jac = u / (2.0 * std::sqrt(g11 * (umax - u)));
                edge += integrand(xi2) * jac;
            }
            acc += edge * dv;
        }
        if (have_prev) {
            err = std::abs(acc - prev);
            if (err <= std::max(1e-6 * std::abs(acc), 1e-10 * scale)) {
                const double pref = std::pow(2.0 * M_PI * h, -2.0);
                return sign * pref * acc.real();
            }
        }
        prev = acc;
        have_prev = true;
    }
    throw ConvergenceError("correction_term: grid doubling did not converge");
}

double trivial_bound(double l, double /*tau*/, double h, int d, double C) {
    if (l == 0.0) return std::numeric_limits<double>::infinity();
    return C * std::pow(h, 1.0 - d) * (1.0 + 1.0 / l);
}

double trivial_bound(const PointPair& pair, const DomainGeometry& geom, double tau, double h,
                     double C) {
    const Distances dist = distances(pair, geom);
    return trivial_bound(dist.l, tau, h, static_cast<int>(pair.x.size()), C);
}

double leading_magnitude(double l, double h, int d) {
    if (l <= 0.0) throw OutOfRangeError("leading_magnitude: requires l > 0");
    return std::pow(h, -0.5 * (d - 1)) * std::pow(l, -0.5 * (d + 1));
}

double leading_magnitude(const PointPair& pair, const DomainGeometry& geom, double h) {
    const Distances dist = distances(pair, geom);
    return leading_magnitude(dist.l, h, static_cast<int>(pair.x.size()));
}

}  // namespace skl
