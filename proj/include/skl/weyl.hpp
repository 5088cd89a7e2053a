#pragma once

#include <vector>

#include "skl/domain.hpp"
#include "skl/operator_spec.hpp"

namespace skl {

// (2 pi h)^{-d} int_{|xi| < sqrt(tau)} e^{i<z,xi>/h} dxi via the radial
// Bessel closed form; z = 0 gives (2 pi h)^{-d} times the ball volume.
double weyl_free_closed_form(const std::vector<double>& z, double tau, double h, int d);

// (2 pi h)^{-d} int_{a(w,xi) < tau} e^{i<x-y,xi>/h} dxi with the symbol
// frozen at the midpoint w = (x+y)/2. The normal direction is integrated in
// closed form; the remaining directions use midpoint quadrature on the
// projected ellipse with grid-doubling error control (rel 1e-6). The real
// part is returned; with zero magnetic coefficients the imaginary part must
// cancel by central symmetry and is checked against tolerance.
// err_out, when given, receives the last grid-doubling difference.
double weyl_quadrature(const OperatorSpec& op, const PointPair& pair, double tau, double h,
                       double* err_out = nullptr);

// Same integral with the symbol frozen at an explicit point w and explicit
// displacement z; weyl_boundary uses this to evenly extend coefficients
// across the wall for the reflected term.
double weyl_quadrature_at(const OperatorSpec& op, const Point& w, const std::vector<double>& z,
                          double tau, double h, double* err_out = nullptr);

// Direct term -+ reflected term: e^W(x,y) - e^W(x,y~) for Dirichlet,
// + for Neumann, where y~ mirrors y across the wall x_1 = 0. Coefficients
// are extended evenly across the wall when the reflected midpoint lands
// outside the physical half-space.
double weyl_boundary(const OperatorSpec& op, const PointPair& pair, double tau, double h,
                     BoundaryCondition bc);

// Second-order boundary-layer correction (d = 2, wall at x_1 = 0):
//   sign(bc) (2 pi h)^{-2} int_{a(w,xi)<tau} e^{i<x-y~,xi>/h} (e^{i theta/h} - 1) dxi,
// theta = -a_{x_1}(0,w_2) (x_1^2+y_1^2) xi_1 / (4 (tau - b(w_2,xi_2))),
// with w_2 the tangential midpoint and b the wall-frozen symbol. The phase is
// odd in xi_1, so the xi_1 integral closes in terms of sines and the result
// is real. Glancing strip tau - b <= 1e-6 tau is excluded; remaining edge
// oscillation is resolved on a log-graded grid with doubling control.
double correction_term(const OperatorSpec& op, const PointPair& pair, double tau, double h,
                       BoundaryCondition bc);

// C h^{1-d} (1 + 1/l); +infinity at l = 0.
double trivial_bound(double l, double tau, double h, int d, double C = 1.0);
double trivial_bound(const PointPair& pair, const DomainGeometry& geom, double tau, double h,
                     double C = 1.0);

// h^{-(d-1)/2} l^{-(d+1)/2}, the off-diagonal magnitude envelope without
// its constant. Throws at l = 0.
double leading_magnitude(double l, double h, int d);
double leading_magnitude(const PointPair& pair, const DomainGeometry& geom, double h);

}  // namespace skl
