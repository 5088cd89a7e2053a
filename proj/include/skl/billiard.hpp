#pragma once

#include <string>

#include "skl/domain.hpp"
#include "skl/flow.hpp"
#include "skl/operator_spec.hpp"

namespace skl {

// One-reflection broken ray from y to x off the wall x_1 = 0.
struct BilliardRay {
    Trajectory leg_in;        // y to the reflection point
    Trajectory leg_out;       // reflection point to x
    Point reflection_point;   // on the wall to 1e-10
    double incidence_angle;   // angle between incoming ray and the wall plane, in (0, pi/2]
    double total_time;

    // Both legs concatenated, one sample per line.
    void to_csv(const std::string& path) const;
};

struct BilliardConfig {
    double c0 = 0.1;          // admissibility gate: nu(x) + nu(y) >= c0 * |x - y|^2
    double eps = 10.0;        // admissibility gate: |x - y| <= eps
    double newton_tol = 1e-10;
    int max_iterations = 60;
};

// Shooting construction of the reflected ray at energy tau. d = 2 only.
BilliardRay billiard_connect(const OperatorSpec& op, const Point& x, const Point& y, double tau,
                             const DomainGeometry& geom, const BilliardConfig& config = {});

}  // namespace skl
