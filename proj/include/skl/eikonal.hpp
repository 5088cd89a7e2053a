#pragma once

#include <memory>
#include <vector>

#include "skl/domain.hpp"
#include "skl/operator_spec.hpp"

namespace skl {

enum class EikonalVariant { incident, reflected };

struct EikonalConstruction {
    int fan_size = 0;        // characteristics in the finest fan used so far
    double window = 0.0;     // transverse launch window width
    double max_time = 0.0;   // forward flight time covered by the fan
    double sigma_at_wall = 0.0;  // min |d_1 phi^0| over the launch strip (reflected)
};

// Eikonal phase built from a fan of characteristics of a(x, grad phi) = E,
// E = a(y, theta). The incident branch vanishes on the hyperplane through y
// normal to theta; the reflected branch matches the incident value on the
// wall x_1 = 0 with flipped normal derivative. Queries locate the
// characteristic through x by Newton in (launch parameter, time) and
// interpolate quadratically across the fan. d = 2 only. Objects are cheap to
// copy (shared state) but must not be queried from several threads at once.
class EikonalPhase {
public:
    double evaluate(const Point& x) const;
    Covector gradient_x(const Point& x) const;
    double hj_residual(const Point& x) const;  // |a(x, grad phi(x)) - E|

    EikonalVariant variant() const;
    double energy() const;
    const OperatorSpec& op() const;
    const DomainGeometry& geom() const;
    const Point& base_point() const;
    const Covector& direction() const;
    EikonalConstruction construction_data() const;

    struct Impl;

private:
    explicit EikonalPhase(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<Impl> impl_;

    friend EikonalPhase eikonal_phase(const OperatorSpec& op, const Point& y,
                                      const Covector& theta, EikonalVariant variant,
                                      const DomainGeometry& geom, double sigma_min,
                                      double max_time_hint);
};

// sigma_min rejects reflected constructions whose wall incidence |d_1 phi^0|
// falls below the threshold anywhere on the launch strip. max_time_hint > 0
// preallocates flight time; the fan still grows on demand.
EikonalPhase eikonal_phase(const OperatorSpec& op, const Point& y, const Covector& theta,
                           EikonalVariant variant, const DomainGeometry& geom,
                           double sigma_min = 0.0, double max_time_hint = 0.0);

struct PhaseApproxReport {
    double max_incident_ratio = 0.0;   // |phi^0 - <x-y, theta>| / |x-y|^2
    double max_reflected_ratio = 0.0;  // |phi - <x-yr, thetar>| / ((sigma+1) |x-yr|^2)
    std::size_t incident_evaluated = 0;
    std::size_t reflected_evaluated = 0;
    std::size_t skipped = 0;           // directions with no admissible construction
};

// Tabulates both flat-phase comparison ratios over a grid of directions. The
// prototype supplies the operator and geometry; yr and thetar are the wall
// images of y and theta.
PhaseApproxReport phase_approx_diagnostics(const EikonalPhase& prototype, const PointPair& pair,
                                           const std::vector<Covector>& theta_grid, double T);

}  // namespace skl
