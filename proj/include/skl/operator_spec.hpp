#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skl/coefficient_field.hpp"
#include "skl/domain.hpp"

namespace skl {

// Second order elliptic operator in divergence-free symbol form:
//   a(x,xi) = sum_jk g^{jk}(x) (xi_j - V_j(x)) (xi_k - V_k(x)) + V(x).
// The metric is stored as the upper triangle only, so g^{jk} = g^{kj} holds
// structurally. When a boundary is attached the coefficients must satisfy the
// wall normalization g^{1k} = delta_{1k}, V_1 = 0 (checked by the invariant
// helper, assumed by the boundary operations).
class OperatorSpec {
public:
    enum class Kind { free, linear_potential, separable, custom };

    OperatorSpec(int dimension,
                 std::vector<CoefficientField> metric_upper,
                 std::vector<CoefficientField> magnetic,
                 CoefficientField potential,
                 Kind kind = Kind::custom);

    int dim() const { return d_; }
    Kind kind() const { return kind_; }
    bool is_free() const { return kind_ == Kind::free; }

    const CoefficientField& metric(int j, int k) const;
    const CoefficientField& magnetic(int j) const { return magnetic_.at(j); }
    const CoefficientField& potential() const { return potential_; }

    bool magnetic_is_zero() const { return magnetic_zero_; }

    // g = identity, V_j = 0, V = 0.
    static OperatorSpec free_symbol(int dimension);
    // g = identity, V_j = 0, V = alpha * x_1.
    static OperatorSpec linear_potential(int dimension, double alpha);
    // d = 2, a = xi_1^2 + V1(x_1) + xi_2^2 + V2(x_2).
    static OperatorSpec separable(const CoefficientField& V1, const CoefficientField& V2);

    // Min metric eigenvalue over sample points (positive definiteness probe).
    double min_metric_eigenvalue(const std::vector<Point>& samples) const;
    // Max violation of the wall normalization over sample points.
    double max_normalization_defect(const std::vector<Point>& samples) const;

private:
    int d_;
    std::vector<CoefficientField> metric_upper_;  // row-major upper triangle
    std::vector<CoefficientField> magnetic_;
    CoefficientField potential_;
    Kind kind_;
    bool magnetic_zero_;

    int upper_index(int j, int k) const;
};

}  // namespace skl
