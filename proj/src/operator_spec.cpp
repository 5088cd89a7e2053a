#include "skl/operator_spec.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace skl {

OperatorSpec::OperatorSpec(int dimension, std::vector<CoefficientField> metric_upper,
                           std::vector<CoefficientField> magnetic,
                           CoefficientField potential, Kind kind)
    : d_(dimension),
      metric_upper_(std::move(metric_upper)),
      magnetic_(std::move(magnetic)),
      potential_(std::move(potential)),
      kind_(kind) {
    if (d_ < 1) throw DimensionError("operator dimension must be >= 1");
    const int expect = d_ * (d_ + 1) / 2;
    if (static_cast<int>(metric_upper_.size()) != expect) {
        throw DimensionError("metric upper triangle needs d(d+1)/2 entries");
    }
    if (static_cast<int>(magnetic_.size()) != d_) {
        throw DimensionError("magnetic field needs d entries");
    }
    magnetic_zero_ = true;
    Point probe(d_, 0.17);  // structural flag; named constructors set it exactly
    for (const auto& vj : magnetic_) {
        if (std::abs(vj(probe)) > 0.0) magnetic_zero_ = false;
    }
}

int OperatorSpec::upper_index(int j, int k) const {
    if (j < 0 || k < 0 || j >= d_ || k >= d_) throw DimensionError("metric index out of range");
    if (j > k) std::swap(j, k);
    // Row-major upper triangle: row j starts after j full rows minus the gap.
    return j * d_ - j * (j - 1) / 2 + (k - j);
}

const CoefficientField& OperatorSpec::metric(int j, int k) const {
    return metric_upper_[upper_index(j, k)];
}

OperatorSpec OperatorSpec::free_symbol(int dimension) {
    std::vector<CoefficientField> g;
    for (int j = 0; j < dimension; ++j) {
        for (int k = j; k < dimension; ++k) {
            g.push_back(CoefficientField::constant(j == k ? 1.0 : 0.0));
        }
    }
    std::vector<CoefficientField> mag(dimension, CoefficientField::constant(0.0));
    return OperatorSpec(dimension, std::move(g), std::move(mag),
                        CoefficientField::constant(0.0), Kind::free);
}

OperatorSpec OperatorSpec::linear_potential(int dimension, double alpha) {
    OperatorSpec op = free_symbol(dimension);
    op.potential_ = CoefficientField::linear(0, alpha);
    op.kind_ = Kind::linear_potential;
    return op;
}

OperatorSpec OperatorSpec::separable(const CoefficientField& V1, const CoefficientField& V2) {
    OperatorSpec op = free_symbol(2);
    CoefficientField v1;
    v1.eval = [e = V1.eval](const Point& x) { return e({x[0]}); };
    v1.partials = {[p = V1](const Point& x) { return p.partial(0, {x[0]}); },
                   [](const Point&) { return 0.0; }};
    CoefficientField v2;
    v2.eval = [e = V2.eval](const Point& x) { return e({x[1]}); };
    v2.partials = {[](const Point&) { return 0.0; },
                   [p = V2](const Point& x) { return p.partial(0, {x[1]}); }};
    op.potential_ = CoefficientField::sum(v1, v2);
    op.kind_ = Kind::separable;
    return op;
}

double OperatorSpec::min_metric_eigenvalue(const std::vector<Point>& samples) const {
    double out = std::numeric_limits<double>::infinity();
    for (const auto& x : samples) {
        if (d_ == 1) {
            out = std::min(out, metric(0, 0)(x));
        } else if (d_ == 2) {
            double a = metric(0, 0)(x), b = metric(0, 1)(x), c = metric(1, 1)(x);
            double tr = a + c, disc = std::sqrt((a - c) * (a - c) + 4.0 * b * b);
            out = std::min(out, 0.5 * (tr - disc));
        } else {
            // d = 3: power iteration on (cI - G); c above the spectral radius
            // makes the dominant eigenvalue c - lambda_min.
            double g[3][3];
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) g[j][k] = metric(j, k)(x);
            double fro = 0.0;
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) fro += g[j][k] * g[j][k];
            double c = std::sqrt(fro) + 1.0;
            double v[3] = {1.0, 0.3, -0.7};
            double lam = 0.0;
            for (int it = 0; it < 200; ++it) {
                double w[3];
                for (int j = 0; j < 3; ++j) {
                    w[j] = c * v[j];
                    for (int k = 0; k < 3; ++k) w[j] -= g[j][k] * v[k];
                }
                double n = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
                for (int j = 0; j < 3; ++j) v[j] = w[j] / n;
                lam = n;
            }
            out = std::min(out, c - lam);
        }
    }
    return out;
}

double OperatorSpec::max_normalization_defect(const std::vector<Point>& samples) const {
    double defect = 0.0;
    for (const auto& x : samples) {
        defect = std::max(defect, std::abs(metric(0, 0)(x) - 1.0));
        for (int k = 1; k < d_; ++k) {
            defect = std::max(defect, std::abs(metric(0, k)(x)));
        }
        defect = std::max(defect, std::abs(magnetic_[0](x)));
    }
    return defect;
}

}  // namespace skl
