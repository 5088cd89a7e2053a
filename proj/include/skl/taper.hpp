#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "skl/spectral_basis.hpp"

namespace skl {

// Even smooth bump: 1 on [-1/2,1/2], 0 outside (-1,1), blended by the
// exp(-1/s) cutoff in between. All derivatives vanish at the joints.
double bump_chi(double t);

// Fourier transform of the bump, integral convention int chi(t) e^{-ist} dt.
// Real and even; returned as complex to expose the convention.
std::complex<double> bump_fourier(double s);

// Smoothed-step weight table: w(u) = 1/2 + (2 pi)^{-1} int_0^u chi_hat(s) ds,
// w(-u) = 1 - w(u), clamped to {0,1} beyond the tabulated range where
// |w - step| < 1e-8. Built once and shared.
class SmoothedStep {
public:
    static std::shared_ptr<const SmoothedStep> shared();

    double operator()(double u) const;
    double range() const { return u_max_; }

private:
    SmoothedStep();
    double u_max_;
    double step_;
    std::vector<double> table_;  // w on [0, u_max]
};

// Time window plus the smoothing machinery of the windowed spectral sum.
struct TaperSpec {
    double T = 1.0;
    std::shared_ptr<const SmoothedStep> smoothed_step;

    static TaperSpec make(double T);

    double chi(double t) const { return bump_chi(t); }
    double w(double u) const { return (*smoothed_step)(u); }
};

// Windowed spectral sum sum_n phi_n(x) phi_n(y) w((tau - lambda_n) T / h).
// Equals the projector kernel in the limit T/h >> 1/gap.
double tauberian_kernel(const SpectralBasis& basis, const TaperSpec& taper, const Point& x,
                        const Point& y, double tau, double h);

}  // namespace skl
