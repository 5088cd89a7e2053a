#include "skl/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "skl/error.hpp"
#include "skl/symbol.hpp"

namespace skl {

namespace {

// State layout: [x_0..x_{d-1}, xi_0..xi_{d-1}, action].
using Vec = std::vector<double>;

Vec pack(const FlowSample& s, int d) {
    Vec v(2 * d + 1);
    for (int i = 0; i < d; ++i) v[i] = s.x[i];
    for (int i = 0; i < d; ++i) v[d + i] = s.xi[i];
    v[2 * d] = s.action;
    return v;
}

FlowSample unpack(const Vec& v, int d) {
    FlowSample s;
    s.x.assign(v.begin(), v.begin() + d);
    s.xi.assign(v.begin() + d, v.begin() + 2 * d);
    s.action = v[2 * d];
    return s;
}

Vec rhs(const OperatorSpec& op, const Vec& v, int d) {
    Point x(v.begin(), v.begin() + d);
    Covector xi(v.begin() + d, v.begin() + 2 * d);
    const SymbolGradient g = symbol_gradient(op, x, xi);
    Vec dv(2 * d + 1);
    double action_rate = 0.0;
    for (int i = 0; i < d; ++i) {
        dv[i] = g.d_xi[i];
        dv[d + i] = -g.d_x[i];
        action_rate += xi[i] * g.d_xi[i];
    }
    dv[2 * d] = action_rate;
    return dv;
}

// Dormand-Prince 5(4) tableau.
constexpr double kA[7][6] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr double kB5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
constexpr double kB4[7] = {5179.0 / 57600, 0,           7571.0 / 16695, 393.0 / 640,
                           -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

struct HermiteSeg {
    double t0, t1;
    const FlowSample *y0, *y1, *f0, *f1;
};

FlowSample hermite_eval(const HermiteSeg& seg, double t, int d, bool derivative) {
    const double h = seg.t1 - seg.t0;
    const double u = (t - seg.t0) / h;
    double c0, c1, c2, c3;
    if (!derivative) {
        c0 = 2 * u * u * u - 3 * u * u + 1;
        c1 = (u * u * u - 2 * u * u + u) * h;
        c2 = -2 * u * u * u + 3 * u * u;
        c3 = (u * u * u - u * u) * h;
    } else {
        c0 = (6 * u * u - 6 * u) / h;
        c1 = 3 * u * u - 4 * u + 1;
        c2 = (-6 * u * u + 6 * u) / h;
        c3 = 3 * u * u - 2 * u;
    }
    FlowSample out;
    out.x.resize(d);
    out.xi.resize(d);
    for (int i = 0; i < d; ++i) {
        out.x[i] = c0 * seg.y0->x[i] + c1 * seg.f0->x[i] + c2 * seg.y1->x[i] + c3 * seg.f1->x[i];
        out.xi[i] = c0 * seg.y0->xi[i] + c1 * seg.f0->xi[i] + c2 * seg.y1->xi[i] + c3 * seg.f1->xi[i];
    }
    out.action = c0 * seg.y0->action + c1 * seg.f0->action + c2 * seg.y1->action + c3 * seg.f1->action;
    return out;
}

std::size_t locate_segment(const std::vector<double>& times, double t) {
    const bool fwd = times.back() >= times.front();
    const double tol = 1e-12 * (1.0 + std::abs(times.back()));
    if (fwd ? (t < times.front() - tol || t > times.back() + tol)
            : (t > times.front() + tol || t < times.back() - tol))
        throw OutOfRangeError("trajectory query time outside integrated span");
    std::size_t lo = 0, hi = times.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (fwd ? (times[mid] <= t) : (times[mid] >= t))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace

FlowSample Trajectory::at(double t) const {
    const int d = static_cast<int>(states.front().x.size());
    if (times.size() == 1) return states.front();
    const std::size_t i = locate_segment(times, t);
    HermiteSeg seg{times[i], times[i + 1], &states[i], &states[i + 1], &derivs[i], &derivs[i + 1]};
    return hermite_eval(seg, t, d, false);
}

FlowSample Trajectory::deriv_at(double t) const {
    const int d = static_cast<int>(states.front().x.size());
    if (times.size() == 1) return derivs.front();
    const std::size_t i = locate_segment(times, t);
    HermiteSeg seg{times[i], times[i + 1], &states[i], &states[i + 1], &derivs[i], &derivs[i + 1]};
    return hermite_eval(seg, t, d, true);
}

void Trajectory::to_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open trajectory output file: " + path);
    const int d = static_cast<int>(states.front().x.size());
    std::fprintf(f, "t");
    for (int i = 0; i < d; ++i) std::fprintf(f, ",x%d", i + 1);
    for (int i = 0; i < d; ++i) std::fprintf(f, ",xi%d", i + 1);
    std::fprintf(f, ",action\n");
    for (std::size_t k = 0; k < times.size(); ++k) {
        std::fprintf(f, "%.17g", times[k]);
        for (int i = 0; i < d; ++i) std::fprintf(f, ",%.17g", states[k].x[i]);
        for (int i = 0; i < d; ++i) std::fprintf(f, ",%.17g", states[k].xi[i]);
        std::fprintf(f, ",%.17g\n", states[k].action);
    }
    std::fclose(f);
}

Trajectory hamiltonian_flow(const OperatorSpec& op, const Point& x0, const Covector& xi0,
                            double t_span, const StepControl& control,
                            const std::function<double(const Point&)>& stop_when) {
    const int d = op.dim();
    if (static_cast<int>(x0.size()) != d || static_cast<int>(xi0.size()) != d)
        throw DimensionError("flow initial data dimension mismatch");
    if (!(control.rel_tol > 0) || !(control.abs_tol > 0) || !(control.max_step > 0))
        throw OutOfRangeError("step control tolerances must be positive");

    Trajectory traj;
    traj.energy = principal_symbol(op, x0, xi0);
    const double eref = 1.0 + std::abs(traj.energy);

    FlowSample s0;
    s0.x = x0;
    s0.xi = xi0;
    s0.action = 0.0;
    Vec y = pack(s0, d);
    Vec f = rhs(op, y, d);
    traj.times.push_back(0.0);
    traj.states.push_back(unpack(y, d));
    traj.derivs.push_back(unpack(f, d));

    if (t_span == 0.0) return traj;
    if (stop_when && stop_when(x0) <= 0.0)
        throw OutOfRangeError("stop condition already violated at the initial point");

    const double dir = (t_span > 0) ? 1.0 : -1.0;
    double t = 0.0;
    double dt = dir * std::min({control.max_step, 0.01, std::abs(t_span)});
    const int n = 2 * d + 1;
    int steps = 0;

    // One embedded 5(4) step of size step from (base, f_base); err is the
    // tolerance-scaled error norm.
    auto dp45 = [&](const Vec& base, const Vec& f_base, double step, Vec& out, double& err) {
        Vec k[7];
        k[0] = f_base;
        Vec ytmp(n);
        for (int stage = 1; stage < 7; ++stage) {
            for (int i = 0; i < n; ++i) {
                double acc = base[i];
                for (int j = 0; j < stage; ++j) acc += step * kA[stage][j] * k[j][i];
                ytmp[i] = acc;
            }
            k[stage] = rhs(op, ytmp, d);
        }
        out.resize(n);
        err = 0.0;
        for (int i = 0; i < n; ++i) {
            double a5 = 0.0, a4 = 0.0;
            for (int j = 0; j < 7; ++j) {
                a5 += kB5[j] * k[j][i];
                a4 += kB4[j] * k[j][i];
            }
            out[i] = base[i] + step * a5;
            const double sc =
                control.abs_tol + control.rel_tol * std::max(std::abs(base[i]), std::abs(out[i]));
            const double e = step * (a5 - a4) / sc;
            err += e * e;
        }
        err = std::sqrt(err / n);
    };

    while (dir * (t_span - t) > 1e-14 * (1.0 + std::abs(t_span))) {
        if (++steps > 200000) throw ConvergenceError("flow exceeded the step budget");
        if (dir * dt > dir * (t_span - t)) dt = t_span - t;
        if (std::abs(dt) < 1e-14 * (1.0 + std::abs(t)))
            throw ConvergenceError("flow step size collapsed");

        Vec y5;
        double err;
        dp45(y, f, dt, y5, err);

        if (err <= 1.0) {
            const double t_new = t + dt;
            Vec f_new = rhs(op, y5, d);

            FlowSample cur = unpack(y5, d);
            if (stop_when && stop_when(cur.x) <= 0.0) {
                // Refine the crossing by bisection on the step size of a
                // single 5th order step from the last accepted node, so the
                // final sample sits on the event surface to integrator
                // accuracy rather than dense-output accuracy.
                double lo = 0.0, hi = dt;
                Vec yh = y5;
                for (int it = 0; it < 80 && std::abs(hi - lo) > 1e-16 * (1.0 + std::abs(dt)); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    Vec ym;
                    double em;
                    dp45(y, f, mid, ym, em);
                    if (stop_when(unpack(ym, d).x) > 0.0)
                        lo = mid;
                    else {
                        hi = mid;
                        yh = std::move(ym);
                    }
                }
                traj.times.push_back(t + hi);
                traj.states.push_back(unpack(yh, d));
                traj.derivs.push_back(unpack(rhs(op, yh, d), d));
                return traj;
            }

            traj.times.push_back(t_new);
            traj.states.push_back(cur);
            traj.derivs.push_back(unpack(f_new, d));

            const double e_now = principal_symbol(op, cur.x, cur.xi);
            if (std::abs(e_now - traj.energy) > control.energy_tol * eref)
                throw ConvergenceError("flow energy drift exceeded the monitor tolerance");

            t = t_new;
            y = std::move(y5);
            f = std::move(f_new);
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        dt *= fac;
        if (std::abs(dt) > control.max_step) dt = dir * control.max_step;
    }
    return traj;
}

Covector reflect_covector(const Covector& xi, const DomainGeometry& geom) {
    if (!geom.has_boundary())
        throw OutOfRangeError("covector reflection requires a domain with a boundary");
    if (xi.empty()) throw DimensionError("empty covector");
    Covector out = xi;
    out[0] = -out[0];
    return out;
}

}  // namespace skl
