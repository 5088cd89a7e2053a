#pragma once

#include <optional>
#include <vector>

#include "skl/operator_spec.hpp"

namespace skl {

double principal_symbol(const OperatorSpec& op, const Point& x, const Covector& xi);

struct SymbolGradient {
    Covector d_xi;  // 2 sum_k g^{jk} (xi_k - V_k)
    Point d_x;      // coefficient partials enter here
};

SymbolGradient symbol_gradient(const OperatorSpec& op, const Point& x, const Covector& xi);

// Points of the level set {xi : a(x,xi) = tau}, found by radial root-finding
// (bisection then Newton, tolerance 1e-10) from the symbol's xi-minimizer.
// Throws EmptyLevelSetError when tau is at or below the minimum.
std::vector<Covector> level_set_sample(const OperatorSpec& op, const Point& x,
                                       double tau, int n_samples);

// Min over sampled x of the nondegeneracy quantity |a - tau| + |grad_xi a|
// evaluated on the energy surface (where it reduces to |grad_xi a|). Points
// off the surface satisfy the bound through |a - tau|, so the surface carries
// the minimum. x with an empty level set contribute min over a xi-grid
// instead. For a pure potential perturbation (g = I, V_j = 0) the separation
// min |V(x) - tau| is written to potential_gap when requested.
double microhyperbolicity_margin(const OperatorSpec& op,
                                 const std::vector<Point>& region_sample, double tau,
                                 double* potential_gap = nullptr);

// Min eigenvalue of the second fundamental form of the level set at sampled
// points; positive means strongly convex. Dimension 2 or 3.
double strong_convexity_check(const OperatorSpec& op, const Point& x, double tau,
                              int n_samples);

// b(x', xi') = a((0,x'), (0,xi')), the symbol frozen on the wall.
double boundary_symbol(const OperatorSpec& op, const std::vector<double>& xprime,
                       const std::vector<double>& xiprime);

// Wall-normal symbol derivative at x_1 = xi_1 = 0.
double wall_symbol_slope(const OperatorSpec& op, const std::vector<double>& xprime,
                         const std::vector<double>& xiprime);

// kappa = (tau - b)^{-1/2} * a_{x_1}|_{x_1 = xi_1 = 0}. Requires tau > b.
double kappa(const OperatorSpec& op, const std::vector<double>& xprime,
             const std::vector<double>& xiprime, double tau);

}  // namespace skl
