#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "skl/coefficient_field.hpp"
#include "skl/domain.hpp"

namespace skl {

// Grid data behind a finite-difference basis; kept for serialization.
struct FdBasisData {
    double L = 0.0;
    BoundaryCondition bc = BoundaryCondition::dirichlet;
    double h = 0.0;
    int grid_n = 0;
    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> vectors;  // node values, L2-normalized
};

// Eigenvalues and eigenfunction evaluators of an h-scaled model operator.
// Eigenvalues ascend; only values at or below validity_cap are trustworthy.
struct SpectralBasis {
    double h = 0.0;
    int dim = 1;
    std::vector<double> eigenvalues;
    std::function<double(std::size_t, const Point&)> eigenfunction_eval;
    double validity_cap = 0.0;
    std::string normalization = "L2";
    std::shared_ptr<const FdBasisData> fd_data;  // null unless finite-difference

    double phi(std::size_t n, const Point& x) const { return eigenfunction_eval(n, x); }
};

// Closed-form basis of h^2 D^2 on (0,L). Dirichlet: lambda_n = (n pi h / L)^2,
// n >= 1; Neumann adds the constant mode at lambda = 0.
SpectralBasis interval_basis(double L, BoundaryCondition bc, double h, int n_max);

// Finite-difference basis of h^2 D^2 + V(x) on (0,L): second-order central
// differences, tridiagonal eigensolve, linear interpolation between nodes.
// Only the bottom tenth of the discrete spectrum is exposed (validity cap).
SpectralBasis fd_sturm_liouville_basis(double L, BoundaryCondition bc, double h,
                                       const CoefficientField& V, int grid_n);

// Tensor product of two 1D bases sharing h; eigenvalues are pair sums kept
// up to tau_cap, sorted ascending with multiplicity.
SpectralBasis separable_2d_basis(const SpectralBasis& basis1, const SpectralBasis& basis2,
                                 double tau_cap);

// e_h(x,y,tau) = sum_{lambda_n <= tau} phi_n(x) phi_n(y); ties included.
double exact_projector_kernel(const SpectralBasis& basis, const Point& x, const Point& y,
                              double tau);

// Flat text cache (header line, then one eigenpair per line).
void save_basis(const SpectralBasis& basis, const std::string& path);
SpectralBasis load_basis(const std::string& path);

}  // namespace skl
