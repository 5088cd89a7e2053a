#include "skl/spectral_basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <lapacke.h>

#include "skl/error.hpp"

namespace skl {

namespace {

double interp_nodes(const std::vector<double>& v, double pos, bool zero_ends) {
    // pos is the fractional node index; node i sits at index i.
    const int n = static_cast<int>(v.size());
    if (zero_ends) {
        // Virtual zero values one spacing outside each end (Dirichlet walls).
        if (pos <= -1.0 || pos >= n) return 0.0;
        if (pos < 0.0) return v[0] * (1.0 + pos);
        if (pos > n - 1) return v[n - 1] * (n - pos);
    } else {
        if (pos <= 0.0) return v[0];
        if (pos >= n - 1) return v[n - 1];
    }
    int i = static_cast<int>(pos);
    double f = pos - i;
    return v[i] * (1.0 - f) + v[i + 1] * f;
}

}  // namespace

SpectralBasis interval_basis(double L, BoundaryCondition bc, double h, int n_max) {
    if (L <= 0.0 || h <= 0.0) throw Error("interval_basis: L and h must be positive");
    if (bc == BoundaryCondition::none) throw Error("interval_basis: needs dirichlet or neumann");
    SpectralBasis b;
    b.h = h;
    b.dim = 1;
    const double base = M_PI * h / L;
    if (bc == BoundaryCondition::dirichlet) {
        for (int n = 1; n <= n_max; ++n) b.eigenvalues.push_back(base * base * n * n);
        const double amp = std::sqrt(2.0 / L);
        b.eigenfunction_eval = [L, amp](std::size_t n, const Point& x) {
            return amp * std::sin((n + 1) * M_PI * x[0] / L);
        };
    } else {
        for (int n = 0; n <= n_max; ++n) b.eigenvalues.push_back(base * base * n * n);
        const double amp0 = std::sqrt(1.0 / L);
        const double amp = std::sqrt(2.0 / L);
        b.eigenfunction_eval = [L, amp0, amp](std::size_t n, const Point& x) {
            return n == 0 ? amp0 : amp * std::cos(n * M_PI * x[0] / L);
        };
    }
    b.validity_cap = b.eigenvalues.back();
    return b;
}

SpectralBasis fd_sturm_liouville_basis(double L, BoundaryCondition bc, double h,
                                       const CoefficientField& V, int grid_n) {
    if (grid_n < 200) throw Error("fd_sturm_liouville_basis: grid_n must be >= 200");
    if (bc == BoundaryCondition::none) throw Error("fd basis needs dirichlet or neumann");

    const bool dirichlet = (bc == BoundaryCondition::dirichlet);
    const double dx = dirichlet ? L / (grid_n + 1) : L / grid_n;
    const double t = h * h / (dx * dx);

    std::vector<double> diag(grid_n), off(grid_n - 1, -t), nodes(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        nodes[i] = dirichlet ? (i + 1) * dx : (i + 0.5) * dx;
        diag[i] = 2.0 * t + V({nodes[i]});
    }
    if (!dirichlet) {
        // Staggered grid with reflected ghost nodes keeps second order.
        diag[0] -= t;
        diag[grid_n - 1] -= t;
    }

    double gersh_lo = std::numeric_limits<double>::infinity();
    double gersh_hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_n; ++i) {
        const double rad = ((i > 0) ? t : 0.0) + ((i < grid_n - 1) ? t : 0.0);
        gersh_lo = std::min(gersh_lo, diag[i] - rad);
        gersh_hi = std::max(gersh_hi, diag[i] + rad);
    }
    // Only the bottom tenth of the discrete spectrum is trusted.
    const double cap = gersh_lo + 0.1 * (gersh_hi - gersh_lo);

    lapack_int m = 0;
    std::vector<double> w(grid_n), z(static_cast<std::size_t>(grid_n) * grid_n);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(grid_n));
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'V', grid_n, diag.data(),
                                     off.data(), gersh_lo - 1.0, cap, 0, 0, 0.0, &m,
                                     w.data(), z.data(), grid_n, isuppz.data());
    if (info != 0) throw ConvergenceError("tridiagonal eigensolve failed");
    if (m == 0) throw Error("fd basis: no eigenvalues under the validity cap");

    auto data = std::make_shared<FdBasisData>();
    data->L = L;
    data->bc = bc;
    data->h = h;
    data->grid_n = grid_n;
    data->eigenvalues.assign(w.begin(), w.begin() + m);
    const double norm = 1.0 / std::sqrt(dx);
    for (lapack_int k = 0; k < m; ++k) {
        std::vector<double> v(grid_n);
        for (int i = 0; i < grid_n; ++i) v[i] = z[static_cast<std::size_t>(k) * grid_n + i] * norm;
        if (v[0] < 0.0) {
            for (double& vi : v) vi = -vi;  // fixed sign for reproducibility
        }
        data->vectors.push_back(std::move(v));
    }

    SpectralBasis b;
    b.h = h;
    b.dim = 1;
    b.eigenvalues = data->eigenvalues;
    b.validity_cap = cap;
    b.fd_data = data;
    b.eigenfunction_eval = [data, dx, dirichlet](std::size_t n, const Point& x) {
        double pos = dirichlet ? x[0] / dx - 1.0 : x[0] / dx - 0.5;
        return interp_nodes(data->vectors[n], pos, dirichlet);
    };
    return b;
}

SpectralBasis separable_2d_basis(const SpectralBasis& basis1, const SpectralBasis& basis2,
                                 double tau_cap) {
    if (std::abs(basis1.h - basis2.h) > 1e-15 * (basis1.h + basis2.h)) {
        throw Error("separable_2d_basis: component bases must share h");
    }
    const auto& l1 = basis1.eigenvalues;
    const auto& l2 = basis2.eigenvalues;
    // The enumeration below is complete only if each component covers
    // tau_cap minus the other's ground level, within its validity range.
    if (l1.back() + l2.front() < tau_cap || l2.back() + l1.front() < tau_cap ||
        tau_cap - l2.front() > basis1.validity_cap ||
        tau_cap - l1.front() > basis2.validity_cap) {
        throw OutOfRangeError("separable_2d_basis: tau_cap exceeds component validity");
    }

    struct Mode {
        double lambda;
        int n, m;
    };
    std::vector<Mode> modes;
    for (std::size_t n = 0; n < l1.size(); ++n) {
        if (l1[n] + l2.front() > tau_cap) break;
        for (std::size_t m = 0; m < l2.size(); ++m) {
            double lam = l1[n] + l2[m];
            if (lam > tau_cap) break;
            modes.push_back({lam, static_cast<int>(n), static_cast<int>(m)});
        }
    }
    std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        if (a.lambda != b.lambda) return a.lambda < b.lambda;
        if (a.n != b.n) return a.n < b.n;
        return a.m < b.m;
    });

    SpectralBasis b;
    b.h = basis1.h;
    b.dim = 2;
    auto index = std::make_shared<std::vector<std::pair<int, int>>>();
    for (const auto& mode : modes) {
        b.eigenvalues.push_back(mode.lambda);
        index->push_back({mode.n, mode.m});
    }
    b.validity_cap = tau_cap;
    b.eigenfunction_eval = [b1 = basis1, b2 = basis2, index](std::size_t k, const Point& x) {
        const auto& nm = (*index)[k];
        return b1.phi(nm.first, {x[0]}) * b2.phi(nm.second, {x[1]});
    };
    return b;
}

double exact_projector_kernel(const SpectralBasis& basis, const Point& x, const Point& y,
                              double tau) {
    if (tau > basis.validity_cap) {
        throw OutOfRangeError("exact_projector_kernel: tau above basis validity cap");
    }
    double acc = 0.0;
    for (std::size_t n = 0; n < basis.eigenvalues.size(); ++n) {
        if (basis.eigenvalues[n] > tau) break;
        acc += basis.phi(n, x) * basis.phi(n, y);
    }
    return acc;
}

void save_basis(const SpectralBasis& basis, const std::string& path) {
    if (!basis.fd_data) throw IoError("save_basis: only finite-difference bases are cached");
    std::ofstream out(path);
    if (!out) throw IoError("save_basis: cannot open " + path);
    const auto& d = *basis.fd_data;
    out << d.L << ' ' << (d.bc == BoundaryCondition::dirichlet ? "dirichlet" : "neumann")
        << ' ' << d.h << ' ' << d.grid_n << '\n';
    char buf[32];
    for (std::size_t k = 0; k < d.eigenvalues.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", d.eigenvalues[k]);
        out << buf;
        for (double v : d.vectors[k]) {
            std::snprintf(buf, sizeof buf, " %.17g", v);
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw IoError("save_basis: write failed for " + path);
}

SpectralBasis load_basis(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_basis: cannot open " + path);
    auto data = std::make_shared<FdBasisData>();
    std::string bc_name;
    in >> data->L >> bc_name >> data->h >> data->grid_n;
    if (!in) throw IoError("load_basis: bad header in " + path);
    data->bc = bc_name == "dirichlet" ? BoundaryCondition::dirichlet : BoundaryCondition::neumann;

    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double lam;
        row >> lam;
        std::vector<double> v(data->grid_n);
        for (int i = 0; i < data->grid_n; ++i) row >> v[i];
        if (!row) throw IoError("load_basis: short eigenpair record in " + path);
        data->eigenvalues.push_back(lam);
        data->vectors.push_back(std::move(v));
    }

    const bool dirichlet = (data->bc == BoundaryCondition::dirichlet);
    const double dx = dirichlet ? data->L / (data->grid_n + 1) : data->L / data->grid_n;
    SpectralBasis b;
    b.h = data->h;
    b.dim = 1;
    b.eigenvalues = data->eigenvalues;
    b.validity_cap = data->eigenvalues.empty() ? 0.0 : data->eigenvalues.back();
    b.fd_data = data;
    b.eigenfunction_eval = [data, dx, dirichlet](std::size_t n, const Point& x) {
        double pos = dirichlet ? x[0] / dx - 1.0 : x[0] / dx - 0.5;
        return interp_nodes(data->vectors[n], pos, dirichlet);
    };
    return b;
}

}  // namespace skl
