#include "skl/taper.hpp"

#include <cmath>
#include <mutex>

#include "skl/error.hpp"

namespace skl {

namespace {

double cutoff(double s) {
    return s <= 0.0 ? 0.0 : std::exp(-1.0 / s);
}

// Smooth partition value: 0 at u=0, 1 at u=1, flat at both ends.
double sigma_blend(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    double a = cutoff(u);
    return a / (a + cutoff(1.0 - u));
}

struct GaussRule {
    std::vector<double> x;  // nodes on [-1,1]
    std::vector<double> w;
};

// Gauss-Legendre nodes by Newton iteration on the Legendre polynomial.
GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}

// Panel rule for the bump's transition zone [1/2, 1].
struct TransitionRule {
    std::vector<double> t;
    std::vector<double> c;  // weight * chi(t)
};

const TransitionRule& transition_rule() {
    static const TransitionRule rule = [] {
        TransitionRule r;
        const GaussRule gl = gauss_legendre(20);
        const int panels = 40;
        const double a = 0.5, b = 1.0, width = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            double lo = a + p * width;
            for (int i = 0; i < 20; ++i) {
                double t = lo + 0.5 * width * (gl.x[i] + 1.0);
                r.t.push_back(t);
                r.c.push_back(0.5 * width * gl.w[i] * bump_chi(t));
            }
        }
        return r;
    }();
    return rule;
}

}  // namespace

double bump_chi(double t) {
    t = std::abs(t);
    if (t <= 0.5) return 1.0;
    if (t >= 1.0) return 0.0;
    return sigma_blend(2.0 * (1.0 - t));
}

std::complex<double> bump_fourier(double s) {
    const auto& rule = transition_rule();
    double acc;
    if (std::abs(s) < 1e-8) {
        acc = 1.0;  // 2 * (1/2) from the flat core
        for (std::size_t i = 0; i < rule.t.size(); ++i) acc += 2.0 * rule.c[i];
    } else {
        acc = 2.0 * std::sin(0.5 * s) / s;
        for (std::size_t i = 0; i < rule.t.size(); ++i) {
            acc += 2.0 * rule.c[i] * std::cos(s * rule.t[i]);
        }
    }
    return {acc, 0.0};
}

SmoothedStep::SmoothedStep() : u_max_(512.0), step_(0.02) {
    const int n = static_cast<int>(u_max_ / step_) + 1;
    table_.resize(n);
    table_[0] = 0.5;
    const GaussRule gl = gauss_legendre(7);
    const double inv2pi = 1.0 / (2.0 * M_PI);
    for (int i = 1; i < n; ++i) {
        double lo = (i - 1) * step_;
        double acc = 0.0;
        for (int k = 0; k < 7; ++k) {
            double s = lo + 0.5 * step_ * (gl.x[k] + 1.0);
            acc += gl.w[k] * bump_fourier(s).real();
        }
        table_[i] = table_[i - 1] + 0.5 * step_ * inv2pi * acc;
    }
}

std::shared_ptr<const SmoothedStep> SmoothedStep::shared() {
    static std::shared_ptr<const SmoothedStep> instance;
    static std::once_flag flag;
    std::call_once(flag, [] { instance.reset(new SmoothedStep()); });
    return instance;
}

double SmoothedStep::operator()(double u) const {
    double au = std::abs(u);
    double wpos;
    if (au >= u_max_) {
        wpos = 1.0;
    } else {
        double t = au / step_;
        int i = static_cast<int>(t);
        double frac = t - i;
        wpos = table_[i] * (1.0 - frac) + table_[i + 1] * frac;
    }
    return u >= 0.0 ? wpos : 1.0 - wpos;
}

TaperSpec TaperSpec::make(double T) {
    if (T <= 0.0) throw Error("taper window T must be positive");
    TaperSpec t;
    t.T = T;
    t.smoothed_step = SmoothedStep::shared();
    return t;
}

double tauberian_kernel(const SpectralBasis& basis, const TaperSpec& taper, const Point& x,
                        const Point& y, double tau, double h) {
    if (tau > basis.validity_cap) {
        throw OutOfRangeError("tauberian_kernel: tau above basis validity cap");
    }
    const double scale = taper.T / h;
    const double range = taper.smoothed_step->range();
    double acc = 0.0;
    for (std::size_t n = 0; n < basis.eigenvalues.size(); ++n) {
        double u = (tau - basis.eigenvalues[n]) * scale;
        if (u <= -range) continue;  // weight below 1e-8, clamped to zero
        double wn = taper.w(u);
        acc += wn * basis.phi(n, x) * basis.phi(n, y);
    }
    return acc;
}

}  // namespace skl
