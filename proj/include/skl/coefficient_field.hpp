#pragma once

#include <functional>
#include <vector>

#include "skl/error.hpp"

namespace skl {

using Point = std::vector<double>;
using Covector = std::vector<double>;

// Scalar coefficient of the operator: value plus spatial partials. Fields
// built through the named constructors carry analytic partials; user-supplied
// fields without partials fall back to central differences (step 1e-5).
struct CoefficientField {
    std::function<double(const Point&)> eval;
    // Either empty (finite-difference fallback) or one entry per dimension.
    std::vector<std::function<double(const Point&)>> partials;
    int smoothness_hint = 2;

    double operator()(const Point& x) const { return eval(x); }

    double partial(int k, const Point& x) const;

    static CoefficientField constant(double c);
    // c * x_axis (axis is 0-based).
    static CoefficientField linear(int axis, double c);
    // Arbitrary smooth field; partials by central differences.
    static CoefficientField from_function(std::function<double(const Point&)> f,
                                          int smoothness_hint = 2);
    // Sum of two fields.
    static CoefficientField sum(const CoefficientField& a, const CoefficientField& b);
};

}  // namespace skl
