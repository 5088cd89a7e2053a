#pragma once

namespace skl {

// Bessel J_nu for nu in {0, 1/2, 1, 3/2, 2} and x >= 0. Integer orders use
// the power series up to x = 12 and the 8-term Hankel asymptotic beyond;
// half-integer orders use their closed trigonometric forms. Absolute error
// stays below 1e-10 on [0, 1e4].
double bessel_j(double nu, double x);

}  // namespace skl
