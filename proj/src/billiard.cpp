#include "skl/billiard.hpp"

#include <cmath>
#include <cstdio>

#include "skl/error.hpp"
#include "skl/symbol.hpp"

namespace skl {

namespace {

struct Shot {
    Trajectory leg_in;
    Trajectory leg_out;
    bool hit = false;
    Point endpoint;
};

double norm2(const Point& a, const Point& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

// Covector on the level set {a(y, .) = tau} in direction psi; radial about the
// magnetic center so the construction also covers nonzero vector potentials.
Covector level_covector(const OperatorSpec& op, const Point& y, double tau, double psi) {
    const Point dir = {std::cos(psi), std::sin(psi)};
    const Covector center = {op.magnetic(0).eval(y), op.magnetic(1).eval(y)};
    double quad = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) quad += op.metric(i, j).eval(y) * dir[i] * dir[j];
    const double depth = tau - principal_symbol(op, y, center);
    if (depth <= 1e-14 * (1.0 + std::abs(tau)))
        throw EmptyLevelSetError("no covectors at this energy over the launch point");
    const double mu = std::sqrt(depth / quad);
    return {center[0] + mu * dir[0], center[1] + mu * dir[1]};
}

Shot shoot(const OperatorSpec& op, const DomainGeometry& geom, const Point& y, double tau,
           double psi, double t2, double t_cap) {
    Shot out;
    const Covector xi0 = level_covector(op, y, tau, psi);
    StepControl ctrl;
    out.leg_in = hamiltonian_flow(op, y, xi0, t_cap, ctrl,
                                  [](const Point& p) { return p[0]; });
    const FlowSample end_in = out.leg_in.states.back();
    out.hit = std::abs(end_in.x[0]) < 1e-8 && out.leg_in.t_end() < t_cap * (1.0 - 1e-12);
    if (!out.hit) {
        // Ballistic continuation keeps the shooting map continuous for rays
        // that still miss the wall during early Newton iterations.
        const FlowSample v = out.leg_in.deriv_at(out.leg_in.t_end());
        out.endpoint = {end_in.x[0] + t2 * v.x[0], end_in.x[1] + t2 * v.x[1]};
        return out;
    }
    const Covector xi_ref = reflect_covector(end_in.xi, geom);
    out.leg_out = hamiltonian_flow(op, end_in.x, xi_ref, t2, ctrl);
    out.endpoint = out.leg_out.states.back().x;
    return out;
}

}  // namespace

void BilliardRay::to_csv(const std::string& path) const {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw IoError("cannot open ray output file: " + path);
    std::fprintf(f, "t,x1,x2,xi1,xi2,action\n");
    const double t_hit = leg_in.t_end();
    for (int leg = 0; leg < 2; ++leg) {
        const Trajectory& tr = (leg == 0) ? leg_in : leg_out;
        const double shift = (leg == 0) ? 0.0 : t_hit;
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            if (leg == 1 && k == 0) continue;  // reflection point already written
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", shift + tr.times[k],
                         tr.states[k].x[0], tr.states[k].x[1], tr.states[k].xi[0],
                         tr.states[k].xi[1], tr.states[k].action);
        }
    }
    std::fclose(f);
}

BilliardRay billiard_connect(const OperatorSpec& op, const Point& x, const Point& y, double tau,
                             const DomainGeometry& geom, const BilliardConfig& config) {
    if (op.dim() != 2) throw DimensionError("billiard construction is implemented for d = 2");
    if (!geom.has_boundary() || geom.kind == DomainKind::interval)
        throw OutOfRangeError("billiard construction needs the wall x_1 = 0");
    if (x.size() != 2 || y.size() != 2) throw DimensionError("billiard endpoints must be planar");
    if (x[0] < 0 || y[0] < 0) throw OutOfRangeError("billiard endpoints must lie in the closed domain");

    const double l0 = norm2(x, y);
    if (l0 == 0.0) throw OutOfRangeError("coincident billiard endpoints");
    if (l0 > config.eps) throw OutOfRangeError("pair separation exceeds the admissibility gate");
    const double nu_sum = x[0] + y[0];
    if (nu_sum < config.c0 * l0 * l0)
        throw OutOfRangeError("pair fails the one-reflection admissibility gate");

    // Seed from the flat mirror image: straight ray y -> (0, p2) -> x.
    const double p2_seed = (y[1] * x[0] + x[1] * y[0]) / (x[0] + y[0]);
    double psi = std::atan2(p2_seed - y[1], -y[0]);
    const Covector xi_seed = level_covector(op, y, tau, psi);
    const double mu0 = std::hypot(xi_seed[0], xi_seed[1]);
    const Point p_seed = {0.0, p2_seed};
    double t2 = norm2(x, p_seed) / (2.0 * mu0);
    const double t_cap = 3.0 * (l0 + nu_sum + 1.0) / (2.0 * mu0);

    const double tol = config.newton_tol * (1.0 + l0);
    Shot cur = shoot(op, geom, y, tau, psi, t2, t_cap);
    double f1 = cur.endpoint[0] - x[0], f2 = cur.endpoint[1] - x[1];
    double fn = std::hypot(f1, f2);
    bool converged = fn <= tol;

    for (int it = 0; it < config.max_iterations && !converged; ++it) {
        const double hp = 1e-6, ht = 1e-6 * (1.0 + std::abs(t2));
        const Shot sp = shoot(op, geom, y, tau, psi + hp, t2, t_cap);
        const Shot st = shoot(op, geom, y, tau, psi, t2 + ht, t_cap);
        const double j11 = (sp.endpoint[0] - cur.endpoint[0]) / hp;
        const double j21 = (sp.endpoint[1] - cur.endpoint[1]) / hp;
        const double j12 = (st.endpoint[0] - cur.endpoint[0]) / ht;
        const double j22 = (st.endpoint[1] - cur.endpoint[1]) / ht;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-14) throw ConvergenceError("singular billiard shooting Jacobian");
        double dpsi = -(j22 * f1 - j12 * f2) / det;
        double dt2 = -(-j21 * f1 + j11 * f2) / det;

        double scale = 1.0;
        for (int half = 0; half < 10; ++half) {
            const double t2_try = t2 + scale * dt2;
            if (t2_try <= 0) {
                scale *= 0.5;
                continue;
            }
            const Shot trial = shoot(op, geom, y, tau, psi + scale * dpsi, t2_try, t_cap);
            const double g1 = trial.endpoint[0] - x[0], g2 = trial.endpoint[1] - x[1];
            const double gn = std::hypot(g1, g2);
            if (gn < fn || half == 9) {
                psi += scale * dpsi;
                t2 = t2_try;
                cur = trial;
                f1 = g1;
                f2 = g2;
                fn = gn;
                break;
            }
            scale *= 0.5;
        }
        converged = fn <= tol;
    }
    if (!converged) throw ConvergenceError("billiard shooting did not converge");
    if (!cur.hit) throw OutOfRangeError("converged ray never touches the wall (degenerate request)");

    BilliardRay ray;
    ray.leg_in = std::move(cur.leg_in);
    ray.leg_out = std::move(cur.leg_out);
    const double t_hit = ray.leg_in.t_end();
    if (t_hit < 1e-10 || t2 < 1e-10)
        throw OutOfRangeError("reflection collapses onto an endpoint (degenerate request)");
    ray.reflection_point = ray.leg_in.states.back().x;
    ray.total_time = t_hit + t2;

    const FlowSample vel = ray.leg_in.deriv_at(t_hit);
    ray.incidence_angle = std::atan2(std::abs(vel.x[0]), std::abs(vel.x[1]));

    // Reflection only conserves energy for wall-normalized operators.
    if (std::abs(ray.leg_in.energy - ray.leg_out.energy) > 1e-8 * (1.0 + std::abs(tau)))
        throw Error("energy jump across reflection: operator is not wall-normalized");

    const Distances dist = distances({x, y}, geom);
    const double predicted = (dist.nu_x + dist.nu_y) / dist.l;
    const double ratio = ray.incidence_angle / predicted;
    if (ratio < 0.1 || ratio > 10.0)
        throw Error("incidence angle inconsistent with the geometric prediction");
    return ray;
}

}  // namespace skl
