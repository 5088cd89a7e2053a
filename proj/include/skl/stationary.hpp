#pragma once

#include "skl/domain.hpp"
#include "skl/operator_spec.hpp"

namespace skl {

// Stationary-phase data for the interior oscillatory representation: the two
// covectors theta on {a(y, .) = tau} and times t with x - y = -t grad_theta
// a(y, theta). t_plus > 0 > t_minus.
struct StationaryPoints {
    Covector theta_plus;
    Covector theta_minus;
    double t_plus;
    double t_minus;
};

StationaryPoints stationary_points(const OperatorSpec& op, const Point& x, const Point& y,
                                   double tau);

}  // namespace skl
