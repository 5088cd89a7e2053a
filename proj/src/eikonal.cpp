#include "skl/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "skl/error.hpp"
#include "skl/flow.hpp"
#include "skl/symbol.hpp"

namespace skl {

namespace {

double dot2(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }

struct Characteristic {
    double s = 0.0;
    double phi0 = 0.0;
    Trajectory fwd;
    Trajectory bwd;
    FlowSample at(double t) const { return (t >= 0.0) ? fwd.at(t) : bwd.at(t); }
    FlowSample d_at(double t) const { return (t >= 0.0) ? fwd.deriv_at(t) : bwd.deriv_at(t); }
};

struct Fan {
    int n = 0;
    double half_w = 0.0;
    double ds = 0.0;
    double sigma_min_launch = 0.0;  // reflected fans only
    std::vector<Characteristic> chars;
};

struct QueryResult {
    double phi = 0.0;
    Covector grad;
    double s = 0.0;
    double t = 0.0;
};

}  // namespace

struct EikonalPhase::Impl {
    OperatorSpec op;
    Point y;
    Covector theta;
    EikonalVariant variant;
    DomainGeometry geom;
    double sigma_min = 0.0;

    double energy = 0.0;
    double thn = 0.0;   // |theta|
    Point that;         // theta / |theta|
    Point shat;         // launch direction of the fan
    Point origin;       // y for incident, wall foot point for reflected
    Point vr_c = {0.0, 0.0};  // central outgoing velocity at the foot point (reflected)
    std::shared_ptr<Impl> incident;  // reflected only
    double sigma_obs = 0.0;

    double W = 0.0, Tf = 0.0, Tb = 0.0;
    std::map<int, Fan> fans;
    int chosen_n = 0;

    Impl(OperatorSpec o, Point yy, Covector th, EikonalVariant v, DomainGeometry g, double smin)
        : op(std::move(o)), y(std::move(yy)), theta(std::move(th)), variant(v), geom(std::move(g)),
          sigma_min(smin) {}

    void init();
    double back_project(const Point& x) const;
    void ensure_coverage(const Point& x);
    const Fan& fan(int n);
    Fan build_fan(int n) const;
    double solve_mu(const Point& x0, double prev) const;
    QueryResult query(const Fan& f, const Point& x) const;
    QueryResult eval_refined(const Point& x);
};

void EikonalPhase::Impl::init() {
    if (op.dim() != 2) throw DimensionError("eikonal fan construction is implemented for d = 2");
    if (y.size() != 2 || theta.size() != 2) throw DimensionError("eikonal base data must be planar");
    thn = std::hypot(theta[0], theta[1]);
    if (thn < 1e-12) throw OutOfRangeError("zero direction covector");
    that = {theta[0] / thn, theta[1] / thn};
    energy = principal_symbol(op, y, theta);

    if (variant == EikonalVariant::incident) {
        shat = {-that[1], that[0]};
        origin = y;
        return;
    }

    if (!geom.has_boundary() || geom.kind == DomainKind::interval)
        throw OutOfRangeError("reflected phase needs the wall x_1 = 0");
    incident = std::make_shared<Impl>(op, y, theta, EikonalVariant::incident, geom, 0.0);
    incident->init();

    // Foot point: where the central incident characteristic meets the wall.
    const SymbolGradient g0 = symbol_gradient(op, y, theta);
    if (g0.d_xi[0] >= -1e-12)
        throw OutOfRangeError("incident direction does not propagate toward the wall");
    const double t_cap = 3.0 * (y[0] + 1e-3) / std::abs(g0.d_xi[0]) + 1.0;
    const Trajectory hit = hamiltonian_flow(op, y, theta, t_cap, StepControl{},
                                            [](const Point& p) { return p[0]; });
    if (std::abs(hit.states.back().x[0]) > 1e-8)
        throw OutOfRangeError("incident characteristic misses the wall");
    origin = {0.0, hit.states.back().x[1]};
    shat = {0.0, 1.0};

    const Covector xi_in = hit.states.back().xi;
    const Covector xi_out = {-xi_in[0], xi_in[1]};
    vr_c = symbol_gradient(op, origin, xi_out).d_xi;
    if (vr_c[0] <= 1e-12)
        throw OutOfRangeError("reflected characteristic does not leave the wall");
}

// Wall coordinate of the launch point whose central-direction ray passes
// through x; falls back to the wall projection at the wall itself.
double EikonalPhase::Impl::back_project(const Point& x) const {
    return (x[1] - origin[1]) - (vr_c[1] / vr_c[0]) * x[0];
}

void EikonalPhase::Impl::ensure_coverage(const Point& x) {
    const double rho = std::hypot(x[0] - origin[0], x[1] - origin[1]);
    // The launch window follows the transverse offset; the flight distance
    // enters only as a curvature margin so the strip does not outrun the
    // energy shell of a confining potential.
    const double s_flat =
        (variant == EikonalVariant::incident)
            ? std::abs((x[0] - origin[0]) * shat[0] + (x[1] - origin[1]) * shat[1])
            : std::abs(back_project(x));
    const double w_need = std::max({0.5, 4.0 * s_flat, rho});
    const double t_need = std::max(0.5, 3.0 * rho / thn);
    if (w_need > W || t_need > Tf) {
        W = std::max(W, w_need);
        Tf = std::max(Tf, t_need);
        Tb = (variant == EikonalVariant::incident) ? Tf : std::max(0.2 * Tf, 0.2);
        fans.clear();
        chosen_n = 0;
    }
}

double EikonalPhase::Impl::solve_mu(const Point& x0, double prev) const {
    double A = 0.0, B = 0.0, C = 0.0;
    Point v = {op.magnetic(0).eval(x0), op.magnetic(1).eval(x0)};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double gij = op.metric(i, j).eval(x0);
            A += gij * that[i] * that[j];
            B += -2.0 * gij * that[i] * v[j];
            C += gij * v[i] * v[j];
        }
    C += op.potential().eval(x0) - energy;
    const double disc = B * B - 4.0 * A * C;
    if (disc <= 0.0)
        throw EmptyLevelSetError("characteristic launch point left the energy shell");
    const double r1 = (-B + std::sqrt(disc)) / (2.0 * A);
    const double r2 = (-B - std::sqrt(disc)) / (2.0 * A);
    return (std::abs(r1 - prev) <= std::abs(r2 - prev)) ? r1 : r2;
}

Fan EikonalPhase::Impl::build_fan(int n) const {
    Fan f;
    f.n = n;
    f.half_w = 0.5 * W;
    f.ds = W / (n - 1);
    f.chars.resize(n);
    const StepControl ctrl;
    double mu_prev = thn;
    double sig_min_here = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        Characteristic& c = f.chars[i];
        c.s = -f.half_w + i * f.ds;
        Point x0;
        Covector xi0;
        if (variant == EikonalVariant::incident) {
            x0 = {origin[0] + c.s * shat[0], origin[1] + c.s * shat[1]};
            const double mu = solve_mu(x0, mu_prev);
            mu_prev = mu;
            xi0 = {mu * that[0], mu * that[1]};
            c.phi0 = 0.0;
        } else {
            x0 = {0.0, origin[1] + c.s};
            const QueryResult q = incident->eval_refined(x0);
            if (q.grad[0] >= 0.0)
                throw OutOfRangeError("incident wave is not incoming on the launch strip");
            sig_min_here = std::min(sig_min_here, -q.grad[0]);
            xi0 = {-q.grad[0], q.grad[1]};
            c.phi0 = q.phi;
        }
        c.fwd = hamiltonian_flow(op, x0, xi0, Tf, ctrl);
        c.bwd = hamiltonian_flow(op, x0, xi0, -Tb, ctrl);
    }
    if (variant == EikonalVariant::reflected) {
        f.sigma_min_launch = sig_min_here;
        if (sig_min_here < sigma_min)
            throw OutOfRangeError("wall incidence below the configured threshold");
    }
    return f;
}

const Fan& EikonalPhase::Impl::fan(int n) {
    auto it = fans.find(n);
    if (it == fans.end()) {
        Fan f = build_fan(n);
        if (variant == EikonalVariant::reflected)
            sigma_obs = (sigma_obs == 0.0) ? f.sigma_min_launch
                                           : std::min(sigma_obs, f.sigma_min_launch);
        it = fans.emplace(n, std::move(f)).first;
    }
    return it->second;
}

QueryResult EikonalPhase::Impl::query(const Fan& f, const Point& x) const {
    double s, t;
    if (variant == EikonalVariant::incident) {
        s = dot2({x[0] - origin[0], x[1] - origin[1]}, shat);
        t = dot2({x[0] - origin[0], x[1] - origin[1]}, that) / (2.0 * thn);
    } else {
        s = back_project(x);
        t = x[0] / vr_c[0];
    }
    const double s_lim = f.half_w - 0.5 * f.ds;
    s = std::clamp(s, -s_lim, s_lim);
    t = std::clamp(t, -0.999 * Tb, 0.999 * Tf);

    const double tol = 1e-12 * (1.0 + W + thn);
    double wm = 0, w0 = 0, wp = 0;
    int i = 0;
    double Xs1 = 0, Xs2 = 0, Xt1 = 0, Xt2 = 0;
    bool converged = false;
    for (int it = 0; it < 80 && !converged; ++it) {
        i = std::clamp(static_cast<int>(std::lround((s + f.half_w) / f.ds)), 1, f.n - 2);
        const double si = -f.half_w + i * f.ds;
        const double a = (s - si) / f.ds;
        wm = 0.5 * a * (a - 1.0);
        w0 = 1.0 - a * a;
        wp = 0.5 * a * (a + 1.0);
        const double dm = (2.0 * a - 1.0) / (2.0 * f.ds);
        const double d0 = -2.0 * a / f.ds;
        const double dp = (2.0 * a + 1.0) / (2.0 * f.ds);

        const FlowSample pm = f.chars[i - 1].at(t);
        const FlowSample p0 = f.chars[i].at(t);
        const FlowSample pp = f.chars[i + 1].at(t);
        const FlowSample vm = f.chars[i - 1].d_at(t);
        const FlowSample v0 = f.chars[i].d_at(t);
        const FlowSample vp = f.chars[i + 1].d_at(t);

        const double X1 = wm * pm.x[0] + w0 * p0.x[0] + wp * pp.x[0];
        const double X2 = wm * pm.x[1] + w0 * p0.x[1] + wp * pp.x[1];
        Xs1 = dm * pm.x[0] + d0 * p0.x[0] + dp * pp.x[0];
        Xs2 = dm * pm.x[1] + d0 * p0.x[1] + dp * pp.x[1];
        Xt1 = wm * vm.x[0] + w0 * v0.x[0] + wp * vp.x[0];
        Xt2 = wm * vm.x[1] + w0 * v0.x[1] + wp * vp.x[1];

        const double F1 = X1 - x[0], F2 = X2 - x[1];
        if (std::hypot(F1, F2) < tol) {
            converged = true;
            break;
        }
        const double det = Xs1 * Xt2 - Xt1 * Xs2;
        if (std::abs(det) < 1e-300) throw CausticError("degenerate fan Jacobian during query");
        s += -(Xt2 * F1 - Xt1 * F2) / det;
        t += -(-Xs2 * F1 + Xs1 * F2) / det;
        s = std::clamp(s, -s_lim, s_lim);
        t = std::clamp(t, -0.999 * Tb, 0.999 * Tf);
    }
    if (!converged) throw ConvergenceError("fan query Newton did not converge");

    // Caustic detector: fan Jacobian relative to its launch-time value.
    const double jac = Xs1 * Xt2 - Xt1 * Xs2;
    const FlowSample v0m = f.chars[i - 1].d_at(0.0);
    const FlowSample v00 = f.chars[i].d_at(0.0);
    const FlowSample v0p = f.chars[i + 1].d_at(0.0);
    const double u1 = wm * v0m.x[0] + w0 * v00.x[0] + wp * v0p.x[0];
    const double u2 = wm * v0m.x[1] + w0 * v00.x[1] + wp * v0p.x[1];
    const double jac0 = shat[0] * u2 - shat[1] * u1;
    if (std::abs(jac) < 1e-6 * std::abs(jac0))
        throw CausticError("query point lies past a caustic of the characteristic fan");

    QueryResult out;
    const FlowSample pm = f.chars[i - 1].at(t);
    const FlowSample p0 = f.chars[i].at(t);
    const FlowSample pp = f.chars[i + 1].at(t);
    out.phi = wm * (f.chars[i - 1].phi0 + pm.action) + w0 * (f.chars[i].phi0 + p0.action) +
              wp * (f.chars[i + 1].phi0 + pp.action);
    out.grad = {wm * pm.xi[0] + w0 * p0.xi[0] + wp * pp.xi[0],
                wm * pm.xi[1] + w0 * p0.xi[1] + wp * pp.xi[1]};
    out.s = s;
    out.t = t;
    return out;
}

QueryResult EikonalPhase::Impl::eval_refined(const Point& x) {
    if (x.size() != 2) throw DimensionError("eikonal query point must be planar");
    ensure_coverage(x);
    int n = (chosen_n > 0) ? chosen_n : 41;
    QueryResult q1 = query(fan(n), x);
    while (true) {
        const int n2 = 2 * n - 1;
        if (n2 > 700) throw ConvergenceError("fan refinement stalled before the phase settled");
        QueryResult q2 = query(fan(n2), x);
        if (std::abs(q2.phi - q1.phi) <= 1e-8 * (1.0 + std::abs(q2.phi))) {
            chosen_n = std::max(chosen_n, n);
            return q2;
        }
        q1 = q2;
        n = n2;
    }
}

double EikonalPhase::evaluate(const Point& x) const { return impl_->eval_refined(x).phi; }

Covector EikonalPhase::gradient_x(const Point& x) const { return impl_->eval_refined(x).grad; }

double EikonalPhase::hj_residual(const Point& x) const {
    const Covector g = gradient_x(x);
    return std::abs(principal_symbol(impl_->op, x, g) - impl_->energy);
}

EikonalVariant EikonalPhase::variant() const { return impl_->variant; }
double EikonalPhase::energy() const { return impl_->energy; }
const OperatorSpec& EikonalPhase::op() const { return impl_->op; }
const DomainGeometry& EikonalPhase::geom() const { return impl_->geom; }
const Point& EikonalPhase::base_point() const { return impl_->y; }
const Covector& EikonalPhase::direction() const { return impl_->theta; }

EikonalConstruction EikonalPhase::construction_data() const {
    EikonalConstruction c;
    c.fan_size = (impl_->chosen_n > 0) ? 2 * impl_->chosen_n - 1 : 0;
    c.window = impl_->W;
    c.max_time = impl_->Tf;
    c.sigma_at_wall = impl_->sigma_obs;
    return c;
}

EikonalPhase eikonal_phase(const OperatorSpec& op, const Point& y, const Covector& theta,
                           EikonalVariant variant, const DomainGeometry& geom, double sigma_min,
                           double max_time_hint) {
    auto impl = std::make_shared<EikonalPhase::Impl>(op, y, theta, variant, geom, sigma_min);
    impl->init();
    if (max_time_hint > 0.0) {
        impl->Tf = max_time_hint;
        impl->Tb = (variant == EikonalVariant::incident) ? max_time_hint
                                                         : std::max(0.2 * max_time_hint, 0.2);
    }
    return EikonalPhase(std::move(impl));
}

PhaseApproxReport phase_approx_diagnostics(const EikonalPhase& prototype, const PointPair& pair,
                                           const std::vector<Covector>& theta_grid, double T) {
    PhaseApproxReport rep;
    const OperatorSpec& op = prototype.op();
    const DomainGeometry& geom = prototype.geom();
    const double l0 = std::hypot(pair.x[0] - pair.y[0], pair.x[1] - pair.y[1]);
    if (l0 < 1e-12) throw OutOfRangeError("diagnostics need distinct points");

    for (const Covector& th : theta_grid) {
        try {
            const EikonalPhase inc =
                eikonal_phase(op, pair.y, th, EikonalVariant::incident, geom, 0.0, T);
            const double flat =
                (pair.x[0] - pair.y[0]) * th[0] + (pair.x[1] - pair.y[1]) * th[1];
            const double ratio = std::abs(inc.evaluate(pair.x) - flat) / (l0 * l0);
            rep.max_incident_ratio = std::max(rep.max_incident_ratio, ratio);
            ++rep.incident_evaluated;
        } catch (const Error&) {
            ++rep.skipped;
            continue;
        }
        if (!geom.has_boundary()) continue;
        try {
            const EikonalPhase ref =
                eikonal_phase(op, pair.y, th, EikonalVariant::reflected, geom, 0.0, T);
            const Point yr = reflect_point(pair.y, geom);
            const Covector thr = {-th[0], th[1]};
            const double lr = std::hypot(pair.x[0] - yr[0], pair.x[1] - yr[1]);
            const double flat = (pair.x[0] - yr[0]) * thr[0] + (pair.x[1] - yr[1]) * thr[1];
            const double sigma = std::max(ref.construction_data().sigma_at_wall, 0.0);
            const double ratio =
                std::abs(ref.evaluate(pair.x) - flat) / ((sigma + 1.0) * lr * lr);
            rep.max_reflected_ratio = std::max(rep.max_reflected_ratio, ratio);
            ++rep.reflected_evaluated;
        } catch (const Error&) {
            ++rep.skipped;
        }
    }
    return rep;
}

}  // namespace skl
