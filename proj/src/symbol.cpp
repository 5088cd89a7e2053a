#include "skl/symbol.hpp"

#include <algorithm>
#include <cmath>

namespace skl {

namespace {

void check_dims(const OperatorSpec& op, const Point& x, const Covector& xi) {
    if (static_cast<int>(x.size()) != op.dim() || static_cast<int>(xi.size()) != op.dim()) {
        throw DimensionError("position/covector length must equal operator dimension");
    }
}

// xi-minimizer of the symbol: a = (xi-V)^T g (xi-V) + V0, minimized at xi = V.
Covector symbol_center(const OperatorSpec& op, const Point& x) {
    Covector c(op.dim());
    for (int j = 0; j < op.dim(); ++j) c[j] = op.magnetic(j)(x);
    return c;
}

// Unit directions for radial level-set sampling.
std::vector<Covector> directions(int d, int n) {
    std::vector<Covector> dirs;
    if (d == 1) {
        dirs.push_back({1.0});
        dirs.push_back({-1.0});
    } else if (d == 2) {
        for (int i = 0; i < n; ++i) {
            double t = 2.0 * M_PI * i / n;
            dirs.push_back({std::cos(t), std::sin(t)});
        }
    } else {
        // Fibonacci sphere.
        const double ga = M_PI * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < n; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / n;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double t = ga * i;
            dirs.push_back({r * std::cos(t), r * std::sin(t), z});
        }
    }
    return dirs;
}

}  // namespace

double principal_symbol(const OperatorSpec& op, const Point& x, const Covector& xi) {
    check_dims(op, x, xi);
    const int d = op.dim();
    double acc = op.potential()(x);
    std::vector<double> p(d);
    for (int j = 0; j < d; ++j) p[j] = xi[j] - op.magnetic(j)(x);
    for (int j = 0; j < d; ++j) {
        acc += op.metric(j, j)(x) * p[j] * p[j];
        for (int k = j + 1; k < d; ++k) {
            acc += 2.0 * op.metric(j, k)(x) * p[j] * p[k];
        }
    }
    return acc;
}

SymbolGradient symbol_gradient(const OperatorSpec& op, const Point& x, const Covector& xi) {
    check_dims(op, x, xi);
    const int d = op.dim();
    std::vector<double> p(d);
    for (int j = 0; j < d; ++j) p[j] = xi[j] - op.magnetic(j)(x);

    SymbolGradient g;
    g.d_xi.assign(d, 0.0);
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < d; ++k) {
            g.d_xi[j] += 2.0 * op.metric(j, k)(x) * p[k];
        }
    }
    g.d_x.assign(d, 0.0);
    for (int m = 0; m < d; ++m) {
        double acc = op.potential().partial(m, x);
        for (int j = 0; j < d; ++j) {
            acc += op.metric(j, j).partial(m, x) * p[j] * p[j];
            for (int k = j + 1; k < d; ++k) {
                acc += 2.0 * op.metric(j, k).partial(m, x) * p[j] * p[k];
            }
            // d/dx_m of p_j = -dV_j/dx_m enters through every metric term.
            acc -= g.d_xi[j] * op.magnetic(j).partial(m, x);
        }
        g.d_x[m] = acc;
    }
    return g;
}

std::vector<Covector> level_set_sample(const OperatorSpec& op, const Point& x, double tau,
                                       int n_samples) {
    const int d = op.dim();
    const Covector center = symbol_center(op, x);
    const double amin = principal_symbol(op, x, center);
    if (tau <= amin + 1e-14 * (1.0 + std::abs(tau))) {
        throw EmptyLevelSetError("level set {a = tau} is empty at this x");
    }

    std::vector<Covector> out;
    for (const auto& u : directions(d, n_samples)) {
        auto at = [&](double r) {
            Covector xi = center;
            for (int j = 0; j < d; ++j) xi[j] += r * u[j];
            return principal_symbol(op, x, xi) - tau;
        };
        // Bracket the crossing, then bisect, then polish with Newton.
        double r_hi = 1.0;
        while (at(r_hi) < 0.0) r_hi *= 2.0;
        double r_lo = 0.0;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (r_lo + r_hi);
            (at(mid) < 0.0 ? r_lo : r_hi) = mid;
        }
        double r = 0.5 * (r_lo + r_hi);
        for (int it = 0; it < 8; ++it) {
            Covector xi = center;
            for (int j = 0; j < d; ++j) xi[j] += r * u[j];
            auto grad = symbol_gradient(op, x, xi);
            double slope = 0.0;
            for (int j = 0; j < d; ++j) slope += grad.d_xi[j] * u[j];
            if (slope == 0.0) break;
            double step = at(r) / slope;
            r -= step;
            if (std::abs(step) < 1e-10 * (1.0 + r)) break;
        }
        Covector xi = center;
        for (int j = 0; j < d; ++j) xi[j] += r * u[j];
        out.push_back(xi);
    }
    return out;
}

double microhyperbolicity_margin(const OperatorSpec& op,
                                 const std::vector<Point>& region_sample, double tau,
                                 double* potential_gap) {
    if (region_sample.empty()) throw Error("microhyperbolicity_margin: empty sample");
    const int d = op.dim();
    double margin = std::numeric_limits<double>::infinity();
    double pgap = std::numeric_limits<double>::infinity();

    for (const auto& x : region_sample) {
        pgap = std::min(pgap, std::abs(op.potential()(x) - tau));
        try {
            for (const auto& xi : level_set_sample(op, x, tau, d == 3 ? 128 : 64)) {
                auto g = symbol_gradient(op, x, xi);
                double gn = 0.0;
                for (double v : g.d_xi) gn += v * v;
                double q = std::abs(principal_symbol(op, x, xi) - tau) + std::sqrt(gn);
                margin = std::min(margin, q);
            }
        } catch (const EmptyLevelSetError&) {
            // No level set: the bound is carried by |a - tau| >= tau - min a.
            Covector c(d);
            for (int j = 0; j < d; ++j) c[j] = op.magnetic(j)(x);
            margin = std::min(margin, std::abs(principal_symbol(op, x, c) - tau));
        }
    }
    if (potential_gap) *potential_gap = pgap;
    return margin;
}

double strong_convexity_check(const OperatorSpec& op, const Point& x, double tau,
                              int n_samples) {
    const int d = op.dim();
    if (d < 2 || d > 3) throw DimensionError("strong_convexity_check needs d in {2,3}");
    auto points = level_set_sample(op, x, tau, n_samples);

    // For the quadratic symbol the xi-Hessian is the constant matrix 2g.
    double H[3][3] = {};
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) H[j][k] = 2.0 * op.metric(j, k)(x);

    double min_curv = std::numeric_limits<double>::infinity();
    for (const auto& xi : points) {
        auto g = symbol_gradient(op, x, xi);
        double gn = 0.0;
        for (double v : g.d_xi) gn += v * v;
        gn = std::sqrt(gn);
        if (gn < 1e-13) throw EmptyLevelSetError("degenerate level set point (zero gradient)");
        double n[3] = {};
        for (int j = 0; j < d; ++j) n[j] = g.d_xi[j] / gn;

        if (d == 2) {
            double t[2] = {-n[1], n[0]};
            double c = (H[0][0] * t[0] * t[0] + 2.0 * H[0][1] * t[0] * t[1] +
                        H[1][1] * t[1] * t[1]) / gn;
            min_curv = std::min(min_curv, c);
        } else {
            // Orthonormal tangent basis {t1, t2}.
            double a[3] = {1.0, 0.0, 0.0};
            if (std::abs(n[0]) > 0.9) a[0] = 0.0, a[1] = 1.0;
            double t1[3], t2[3];
            double dot = a[0] * n[0] + a[1] * n[1] + a[2] * n[2];
            double nn = 0.0;
            for (int j = 0; j < 3; ++j) {
                t1[j] = a[j] - dot * n[j];
                nn += t1[j] * t1[j];
            }
            nn = std::sqrt(nn);
            for (int j = 0; j < 3; ++j) t1[j] /= nn;
            t2[0] = n[1] * t1[2] - n[2] * t1[1];
            t2[1] = n[2] * t1[0] - n[0] * t1[2];
            t2[2] = n[0] * t1[1] - n[1] * t1[0];

            auto quad = [&](const double* u, const double* v) {
                double s = 0.0;
                for (int j = 0; j < 3; ++j)
                    for (int k = 0; k < 3; ++k) s += u[j] * H[j][k] * v[k];
                return s / gn;
            };
            double q11 = quad(t1, t1), q12 = quad(t1, t2), q22 = quad(t2, t2);
            double tr = q11 + q22, disc = std::sqrt((q11 - q22) * (q11 - q22) + 4.0 * q12 * q12);
            min_curv = std::min(min_curv, 0.5 * (tr - disc));
        }
    }
    return min_curv;
}

double boundary_symbol(const OperatorSpec& op, const std::vector<double>& xprime,
                       const std::vector<double>& xiprime) {
    const int d = op.dim();
    if (static_cast<int>(xprime.size()) != d - 1 ||
        static_cast<int>(xiprime.size()) != d - 1) {
        throw DimensionError("boundary_symbol takes tangential data of length d-1");
    }
    Point x(d, 0.0);
    Covector xi(d, 0.0);
    for (int j = 1; j < d; ++j) {
        x[j] = xprime[j - 1];
        xi[j] = xiprime[j - 1];
    }
    return principal_symbol(op, x, xi);
}

double wall_symbol_slope(const OperatorSpec& op, const std::vector<double>& xprime,
                         const std::vector<double>& xiprime) {
    const int d = op.dim();
    Point x(d, 0.0);
    Covector xi(d, 0.0);
    for (int j = 1; j < d; ++j) {
        x[j] = xprime[j - 1];
        xi[j] = xiprime[j - 1];
    }
    return symbol_gradient(op, x, xi).d_x[0];
}

double kappa(const OperatorSpec& op, const std::vector<double>& xprime,
             const std::vector<double>& xiprime, double tau) {
    const double b = boundary_symbol(op, xprime, xiprime);
    if (tau <= b) {
        throw OutOfRangeError("kappa: tau <= b(x',xi') (glancing)");
    }
    return wall_symbol_slope(op, xprime, xiprime) / std::sqrt(tau - b);
}

}  // namespace skl
