#include "skl/coefficient_field.hpp"

#include <utility>

namespace skl {

namespace {
constexpr double kFdStep = 1e-5;
}

double CoefficientField::partial(int k, const Point& x) const {
    if (!partials.empty()) {
        return partials.at(k)(x);
    }
    Point xp = x, xm = x;
    xp[k] += kFdStep;
    xm[k] -= kFdStep;
    return (eval(xp) - eval(xm)) / (2.0 * kFdStep);
}

CoefficientField CoefficientField::constant(double c) {
    CoefficientField f;
    f.eval = [c](const Point&) { return c; };
    f.partials = {[](const Point&) { return 0.0; }};
    // One zero partial serves every axis.
    f.partials.resize(3, f.partials[0]);
    f.smoothness_hint = 1000;
    return f;
}

CoefficientField CoefficientField::linear(int axis, double c) {
    CoefficientField f;
    f.eval = [axis, c](const Point& x) { return c * x[axis]; };
    for (int k = 0; k < 3; ++k) {
        f.partials.push_back([axis, c, k](const Point&) { return k == axis ? c : 0.0; });
    }
    f.smoothness_hint = 1000;
    return f;
}

CoefficientField CoefficientField::from_function(std::function<double(const Point&)> fn,
                                                 int smoothness_hint) {
    CoefficientField f;
    f.eval = std::move(fn);
    f.smoothness_hint = smoothness_hint;
    return f;
}

CoefficientField CoefficientField::sum(const CoefficientField& a, const CoefficientField& b) {
    CoefficientField f;
    f.eval = [ea = a.eval, eb = b.eval](const Point& x) { return ea(x) + eb(x); };
    if (!a.partials.empty() && !b.partials.empty()) {
        std::size_t n = std::min(a.partials.size(), b.partials.size());
        for (std::size_t k = 0; k < n; ++k) {
            f.partials.push_back([pa = a.partials[k], pb = b.partials[k]](const Point& x) {
                return pa(x) + pb(x);
            });
        }
    }
    f.smoothness_hint = std::min(a.smoothness_hint, b.smoothness_hint);
    return f;
}

}  // namespace skl
