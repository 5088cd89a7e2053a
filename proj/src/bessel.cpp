#include "skl/bessel.hpp"

#include <cmath>

#include "skl/error.hpp"

namespace skl {

namespace {

double series_j(int nu, double x) {
    // J_nu(x) = sum_k (-1)^k (x/2)^{nu+2k} / (k! (nu+k)!)
    const double x2 = 0.5 * x;
    double term = 1.0;
    for (int j = 1; j <= nu; ++j) term *= x2 / j;
    double sum = term;
    const double m = -x2 * x2;
    for (int k = 1; k <= 60; ++k) {
        term *= m / (static_cast<double>(k) * (nu + k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double hankel_j(int nu, double x) {
    // P, Q truncated after 8 terms each; a_k = a_{k-1} (mu - (2k-1)^2) / (8k).
    const double mu = 4.0 * nu * nu;
    double a[17];
    a[0] = 1.0;
    for (int k = 1; k <= 16; ++k) {
        const double odd = 2.0 * k - 1.0;
        a[k] = a[k - 1] * (mu - odd * odd) / (8.0 * k);
    }
    double p = 0.0, q = 0.0;
    double xpow = 1.0;
    for (int k = 0; k < 8; ++k) {
        const double sgn = (k % 2) ? -1.0 : 1.0;
        p += sgn * a[2 * k] * xpow / 1.0;
        q += sgn * a[2 * k + 1] * xpow / x;
        xpow /= x * x;
    }
    const double chi = x - (0.5 * nu + 0.25) * M_PI;
    return std::sqrt(2.0 / (M_PI * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace

double bessel_j(double nu, double x) {
    if (x < 0.0) throw OutOfRangeError("bessel_j: x must be >= 0");
    if (nu == 0.5) {
        if (x == 0.0) return 0.0;
        return std::sqrt(2.0 / (M_PI * x)) * std::sin(x);
    }
    if (nu == 1.5) {
        if (x == 0.0) return 0.0;
        if (x < 1e-4) {
            // sin(x)/x - cos(x) = x^2/3 - x^4/30 + ...
            return std::sqrt(2.0 / (M_PI * x)) * x * x * (1.0 / 3.0 - x * x / 30.0);
        }
        return std::sqrt(2.0 / (M_PI * x)) * (std::sin(x) / x - std::cos(x));
    }
    if (nu == 0.0 || nu == 1.0 || nu == 2.0) {
        const int n = static_cast<int>(nu);
        return (x <= 12.0) ? series_j(n, x) : hankel_j(n, x);
    }
    throw Error("bessel_j: unsupported order");
}

}  // namespace skl
