#pragma once

#include <functional>
#include <string>
#include <vector>

#include "skl/domain.hpp"
#include "skl/operator_spec.hpp"

namespace skl {

// Position, covector and accumulated action int <xi, dx/dt> dt of one
// phase-space sample.
struct FlowSample {
    Point x;
    Covector xi;
    double action = 0.0;
};

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.1;
    double energy_tol = 1e-8;  // relative drift allowed over the whole span
};

// Integral curve of dx/dt = grad_xi a, dxi/dt = -grad_x a with dense cubic
// Hermite output between accepted steps. Energy a(x,xi) is conserved to the
// monitor tolerance or the construction throws.
struct Trajectory {
    std::vector<double> times;        // ascending or descending, t0 first
    std::vector<FlowSample> states;
    std::vector<FlowSample> derivs;   // matching d/dt samples
    double energy = 0.0;

    FlowSample at(double t) const;
    FlowSample deriv_at(double t) const;
    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }

    // One sample per line: t, x components, xi components, action.
    void to_csv(const std::string& path) const;
};

// Flow for t in [0, t_span] (t_span may be negative). If stop_when is given,
// integration halts where its value first crosses zero from above; the final
// node is placed on the crossing by bisection of the dense output.
Trajectory hamiltonian_flow(const OperatorSpec& op, const Point& x0, const Covector& xi0,
                            double t_span, const StepControl& control = {},
                            const std::function<double(const Point&)>& stop_when = nullptr);

// Specular reflection in normalized boundary coordinates: xi_1 -> -xi_1.
Covector reflect_covector(const Covector& xi, const DomainGeometry& geom);

}  // namespace skl
