#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "skl/error.hpp"
#include "skl/harness.hpp"
#include "skl/taper.hpp"
#include "skl/weyl.hpp"

namespace skl {

namespace {

// The smoothed step weight is below 1e-8 once tau - lambda < -260 h / T, so
// enumerating eigenvalues up to tau + 260 h / T (plus a fixed margin) loses
// nothing visible in the windowed sums.
constexpr double kTailWidth = 260.0;
constexpr double kTailMargin = 0.5;

std::string cell_context(double h, int pair_index) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "row (h=%g, pair #%d): ", h, pair_index);
    return buf;
}

Scenario make_interval_scenario(BoundaryCondition bc) {
    const double L = 1.0;
    const bool dirichlet = (bc == BoundaryCondition::dirichlet);
    return Scenario{
        dirichlet ? "interval_dirichlet" : "interval_neumann",
        dirichlet ? "h^2 D^2 on (0,1) with Dirichlet walls"
                  : "h^2 D^2 on (0,1) with Neumann walls",
        1,
        OperatorSpec::free_symbol(1),
        DomainGeometry::interval(L, bc),
        [L, bc](double h, double lambda_max) {
            const int n_max = static_cast<int>(std::ceil(
                                  L * std::sqrt(std::max(lambda_max, 0.0)) / (M_PI * h))) +
                              1;
            return interval_basis(L, bc, h, n_max);
        }};
}

Scenario make_free_box_scenario() {
    const double L = M_PI;
    return Scenario{
        "free_box_dirichlet",
        "flat Laplacian h^2 (D_1^2 + D_2^2) on the (0,pi)^2 box, Dirichlet",
        2,
        OperatorSpec::free_symbol(2),
        DomainGeometry::box({L, L}, BoundaryCondition::dirichlet),
        [L](double h, double lambda_max) {
            const int n_max =
                static_cast<int>(std::ceil(std::sqrt(std::max(lambda_max, 0.0)) / h)) + 1;
            const SpectralBasis b1 = interval_basis(L, BoundaryCondition::dirichlet, h, n_max);
            return separable_2d_basis(b1, b1, lambda_max);
        }};
}

Scenario make_separable_linear_scenario(double alpha, const std::string& name) {
    const double L1 = 0.9;
    const double L2 = 2.0 * M_PI;
    return Scenario{
        name,
        "h^2 D_1^2 + alpha x_1 + h^2 D_2^2 on (0,0.9) x (0,2pi), Dirichlet; "
        "normal factor by finite differences, tangential factor closed form",
        2,
        OperatorSpec::linear_potential(2, alpha),
        DomainGeometry::box({L1, L2}, BoundaryCondition::dirichlet),
        [L1, L2, alpha](double h, double lambda_max) {
            const SpectralBasis b1 = fd_sturm_liouville_basis(
                L1, BoundaryCondition::dirichlet, h, CoefficientField::linear(0, alpha), 4000);
            const int m_max =
                static_cast<int>(
                    std::ceil(L2 * std::sqrt(std::max(lambda_max, 0.0)) / (M_PI * h))) +
                1;
            const SpectralBasis b2 = interval_basis(L2, BoundaryCondition::dirichlet, h, m_max);
            return separable_2d_basis(b1, b2, lambda_max);
        }};
}

// One (h, pair) comparison cell. Errors of the exact and Weyl columns abort
// the run with the cell identified; a Tauberian window or correction term
// that does not apply to the cell only leaves its column absent.
ResultRow compute_cell(const Scenario& sc, const ExperimentConfig& cfg,
                       const SpectralBasis& basis, double h, const PointPair& pair,
                       int pair_index) {
    ResultRow row;
    row.h = h;
    row.pair = pair;
    row.pair_index = pair_index;

    const Distances ds = distances(pair, sc.geom);
    row.l = ds.l;
    row.l0 = ds.l0;
    row.nu_x = ds.nu_x;
    row.nu_y = ds.nu_y;
    row.regime = regime_classify(pair, h, cfg.delta, sc.geom);
    row.T = effective_time_window(cfg, ds.l, h);
    row.envelope_trivial = trivial_bound(pair, sc.geom, cfg.tau, h, 1.0);
    row.envelope_leading = leading_magnitude(pair, sc.geom, h);

    const std::string ctx = cell_context(h, pair_index);
    try {
        row.e_exact = exact_projector_kernel(basis, pair.x, pair.y, cfg.tau);
    } catch (const OutOfRangeError& e) {
        throw OutOfRangeError(ctx + e.what());
    } catch (const Error& e) {
        throw Error(ctx + e.what());
    }

    try {
        row.e_tauberian =
            tauberian_kernel(basis, TaperSpec::make(row.T), pair.x, pair.y, cfg.tau, h);
    } catch (const OutOfRangeError&) {
        row.e_tauberian.reset();
    }

    try {
        if (sc.geom.has_boundary()) {
            row.e_weyl = weyl_boundary(sc.op, pair, cfg.tau, h, sc.geom.bc);
        } else {
            row.e_weyl = weyl_quadrature(sc.op, pair, cfg.tau, h);
        }
    } catch (const EmptyLevelSetError&) {
        row.e_weyl.reset();
    } catch (const OutOfRangeError& e) {
        throw OutOfRangeError(ctx + e.what());
    } catch (const Error& e) {
        throw Error(ctx + e.what());
    }

    if (row.e_weyl && sc.dim == 2 && sc.geom.has_boundary()) {
        try {
            row.e_corrected = *row.e_weyl + correction_term(sc.op, pair, cfg.tau, h, sc.geom.bc);
        } catch (const Error&) {
            row.e_corrected.reset();
        }
    }

    if (row.e_exact && row.e_weyl) row.err_weyl = *row.e_exact - *row.e_weyl;
    if (row.e_exact && row.e_corrected) row.err_corrected = *row.e_exact - *row.e_corrected;
    return row;
}

}  // namespace

std::vector<std::string> scenario_names() {
    return {"interval_dirichlet", "interval_neumann", "free_box_dirichlet",
            "separable_linear_box", "separable_linear_box_weak"};
}

Scenario make_scenario(const std::string& name) {
    if (name == "interval_dirichlet") return make_interval_scenario(BoundaryCondition::dirichlet);
    if (name == "interval_neumann") return make_interval_scenario(BoundaryCondition::neumann);
    if (name == "free_box_dirichlet") return make_free_box_scenario();
    if (name == "separable_linear_box") return make_separable_linear_scenario(0.5, name);
    if (name == "separable_linear_box_weak") return make_separable_linear_scenario(0.05, name);
    throw OutOfRangeError("unknown scenario: " + name);
}

std::vector<PointPair> sample_pairs(const std::string& mode, const Scenario& sc, int n,
                                    std::uint64_t seed) {
    if (n < 1) throw OutOfRangeError("sample_pairs: n must be >= 1");
    if (!sc.geom.has_boundary() || sc.geom.lengths.empty())
        throw OutOfRangeError("sample_pairs: scenario domain has no finite box");
    const std::vector<double>& L = sc.geom.lengths;
    const int d = sc.dim;
    std::mt19937_64 rng(seed);
    std::vector<PointPair> out;
    out.reserve(n);

    if (mode == "interior") {
        for (double len : L) {
            if (len <= 0.6)
                throw OutOfRangeError("sample_pairs: interior margin 0.3 does not fit the box");
        }
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            PointPair p;
            for (int tries = 0;; ++tries) {
                if (tries > 10000) throw ConvergenceError("sample_pairs: interior rejection loop");
                p.x.assign(d, 0.0);
                p.y.assign(d, 0.0);
                for (int k = 0; k < d; ++k) {
                    p.x[k] = 0.3 + (L[k] - 0.6) * unit(rng);
                    p.y[k] = 0.3 + (L[k] - 0.6) * unit(rng);
                }
                double l0 = 0.0;
                for (int k = 0; k < d; ++k) l0 += (p.x[k] - p.y[k]) * (p.x[k] - p.y[k]);
                if (std::sqrt(l0) >= 0.05) break;
            }
            out.push_back(std::move(p));
        }
        return out;
    }

    if (mode == "near_boundary") {
        if (d != 2)
            throw OutOfRangeError("sample_pairs: near_boundary sampling needs a 2d box");
        std::uniform_real_distribution<double> depth(0.0, 0.08);
        std::uniform_real_distribution<double> sep(0.1, 0.4);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (L[1] <= 1.0 + 0.4)
            throw OutOfRangeError("sample_pairs: tangential length too short for near_boundary");
        for (int i = 0; i < n; ++i) {
            const double x1 = depth(rng);
            const double y1 = depth(rng);
            const double lt = sep(rng);
            const double base = 0.5 + (L[1] - 1.0 - lt) * unit(rng);
            out.push_back({{x1, base}, {y1, base + lt}});
        }
        return out;
    }

    if (mode == "graded_l") {
        Point anchor(d);
        for (int k = 0; k < d; ++k) anchor[k] = 0.45 * L[k];
        const double l_lo = 0.05, l_hi = 0.5;
        for (int i = 0; i < n; ++i) {
            double l = (n == 1) ? std::sqrt(l_lo * l_hi)
                                : l_lo * std::pow(l_hi / l_lo, double(i) / double(n - 1));
            Point y = anchor;
            y[d - 1] += l;  // separate along the last (tangential) axis
            out.push_back({anchor, y});
        }
        return out;
    }

    throw OutOfRangeError("sample_pairs: unknown mode " + mode);
}

std::vector<ResultRow> run_scenario(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const Scenario sc = make_scenario(cfg.scenario);

    const std::vector<PointPair> pairs =
        cfg.pair_mode == "explicit" ? cfg.pairs
                                    : sample_pairs(cfg.pair_mode, sc, cfg.n_pairs, cfg.seed);
    if (pairs.empty()) throw OutOfRangeError("run_scenario: no point pairs");
    std::vector<Distances> dist;
    dist.reserve(pairs.size());
    for (std::size_t ip = 0; ip < pairs.size(); ++ip) {
        const PointPair& p = pairs[ip];
        if (static_cast<int>(p.x.size()) != sc.dim || static_cast<int>(p.y.size()) != sc.dim)
            throw DimensionError("run_scenario: pair #" + std::to_string(ip) +
                                 " does not match the scenario dimension");
        if (!sc.geom.contains(p.x) || !sc.geom.contains(p.y))
            throw OutOfRangeError("run_scenario: pair #" + std::to_string(ip) +
                                  " lies outside the domain");
        dist.push_back(distances(p, sc.geom));
    }

    const std::size_t nh = cfg.h_sweep.size();
    const std::size_t np = pairs.size();
    std::vector<ResultRow> rows(nh * np);

    for (std::size_t ih = 0; ih < nh; ++ih) {
        const double h = cfg.h_sweep[ih];

        double t_min = std::numeric_limits<double>::infinity();
        for (const Distances& ds : dist) t_min = std::min(t_min, effective_time_window(cfg, ds.l, h));
        const double lambda_max = cfg.tau + kTailWidth * h / t_min + kTailMargin;

        char hctx[64];
        std::snprintf(hctx, sizeof(hctx), "h=%g: ", h);
        SpectralBasis basis;
        try {
            basis = sc.basis(h, lambda_max);
        } catch (const OutOfRangeError& e) {
            throw OutOfRangeError(hctx + std::string(e.what()));
        } catch (const Error& e) {
            throw Error(hctx + std::string(e.what()));
        }
        if (cfg.tau > basis.validity_cap)
            throw OutOfRangeError(hctx + std::string("tau above the basis validity cap"));

        // One h block: one slot per pair, shared read-only basis.
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> failures(np);
        auto work = [&]() {
            for (std::size_t ip = next.fetch_add(1); ip < np; ip = next.fetch_add(1)) {
                try {
                    rows[ih * np + ip] =
                        compute_cell(sc, cfg, basis, h, pairs[ip], static_cast<int>(ip));
                } catch (...) {
                    failures[ip] = std::current_exception();
                }
            }
        };
        const std::size_t n_workers =
            std::min<std::size_t>(std::max(cfg.threads, 1), np);
        if (n_workers <= 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(n_workers);
            for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(work);
            for (std::thread& t : pool) t.join();
        }
        for (std::size_t ip = 0; ip < np; ++ip) {
            if (failures[ip]) std::rethrow_exception(failures[ip]);
        }
    }
    return rows;
}

SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw DimensionError("fit_slope: length mismatch");
    if (xs.size() < 3) throw OutOfRangeError("fit_slope: need at least 3 points");
    std::vector<double> lx, ly;
    lx.reserve(xs.size());
    ly.reserve(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw OutOfRangeError("fit_slope: points must be strictly positive");
        lx.push_back(std::log(xs[i]));
        ly.push_back(std::log(ys[i]));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= lx.size();
    my /= ly.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw OutOfRangeError("fit_slope: abscissae must be distinct");

    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss_res += r * r;
        ss_tot += (ly[i] - my) * (ly[i] - my);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res < 1e-24 ? 1.0 : 0.0);
    return fit;
}

double calibrate_constant(const std::vector<ResultRow>& rows, const std::string& err_field) {
    if (rows.empty()) throw OutOfRangeError("calibrate_constant: empty table");
    const bool weyl = (err_field == "weyl");
    if (!weyl && err_field != "corrected")
        throw OutOfRangeError("calibrate_constant: unknown error column " + err_field);
    double worst = 0.0;
    for (const ResultRow& r : rows) {
        const std::optional<double>& err = weyl ? r.err_weyl : r.err_corrected;
        if (!err) continue;
        if (!(r.envelope_trivial > 0.0) || !std::isfinite(r.envelope_trivial)) continue;
        worst = std::max(worst, std::abs(*err) / r.envelope_trivial);
    }
    return worst;
}

std::vector<std::string> check_harness_invariants(const std::vector<ResultRow>& rows,
                                                  const ExperimentConfig& cfg) {
    std::vector<std::string> out;
    if (rows.empty()) {
        out.push_back("empty result table");
        return out;
    }
    const Scenario sc = make_scenario(cfg.scenario);
    const int d = sc.dim;

    // Calibrated envelope: every Weyl error sits under its own worst-case
    // constant times the h^{1-d} (1 + 1/l) shape.
    const double c_cal = std::max(calibrate_constant(rows, "weyl"), 1e-12);
    for (const ResultRow& r : rows) {
        if (!r.err_weyl) continue;
        const double bound = c_cal * r.envelope_trivial * (1.0 + 1e-12);
        if (!(std::abs(*r.err_weyl) <= bound)) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "envelope violated at h=%g pair #%d: |err|=%g > %g", r.h,
                          r.pair_index, std::abs(*r.err_weyl), bound);
            out.push_back(buf);
        }
    }

    // Smoothed-sum deviation statistic per pair across the sweep.
    int max_pair = 0;
    for (const ResultRow& r : rows) max_pair = std::max(max_pair, r.pair_index);
    for (int ip = 0; ip <= max_pair; ++ip) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const ResultRow& r : rows) {
            if (r.pair_index != ip || !r.e_exact || !r.e_tauberian) continue;
            const double stat =
                std::abs(*r.e_exact - *r.e_tauberian) * r.T * std::pow(r.h, d - 1);
            if (stat < 1e-300) continue;  // exact-equality cell, no scale to compare
            lo = std::min(lo, stat);
            hi = std::max(hi, stat);
        }
        if (hi > 0.0 && std::isfinite(lo) && hi > 4.0 * lo) {
            char buf[160];
            std::snprintf(buf, sizeof(buf),
                          "smoothed-sum statistic spread %g exceeds 4 on pair #%d", hi / lo, ip);
            out.push_back(buf);
        }
    }

    // The regime column must re-derive from the stored inputs.
    for (const ResultRow& r : rows) {
        const RegimeTag re = regime_classify(r.pair, r.h, cfg.delta, sc.geom);
        if (re.regime_case != r.regime.regime_case) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), "regime column mismatch at h=%g pair #%d: %s vs %s",
                          r.h, r.pair_index, regime_name(r.regime.regime_case),
                          regime_name(re.regime_case));
            out.push_back(buf);
        }
    }
    return out;
}

}  // namespace skl
