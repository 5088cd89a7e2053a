#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "skl/domain.hpp"
#include "skl/operator_spec.hpp"
#include "skl/regime.hpp"
#include "skl/spectral_basis.hpp"

namespace skl {

// Flat key = value configuration of one comparison sweep. Parsed from text
// files with '#' comments, cosmetic [section] headers and comma-separated
// arrays; every field can also be set programmatically.
struct ExperimentConfig {
    std::string scenario;
    double tau = 1.0;
    std::vector<double> h_sweep;         // strictly decreasing, >= 4 entries
    double t_factor = 4.0;               // T = t_factor * l ...
    double t_fixed = 0.0;                // ... unless a positive fixed T is given
    double t_cap = 0.0;                  // optional upper cap on T (0 = none)
    std::string pair_mode = "explicit";  // explicit | interior | near_boundary | graded_l
    std::vector<PointPair> pairs;        // used when pair_mode == explicit
    int n_pairs = 3;                     // sampler output size
    double delta = 0.05;                 // regime classifier parameter
    std::uint64_t seed = 0x5EED;
    std::string out_path;
    std::string out_format = "csv";      // csv | json
    int threads = 1;
};

ExperimentConfig load_config(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

// T policy: fixed T when configured, else t_factor * l floored at 8h and
// optionally capped at t_cap.
double effective_time_window(const ExperimentConfig& cfg, double l, double h);

// One (h, pair) comparison cell. Absent values mean the method does not
// apply to the cell (serialized as NA / null).
struct ResultRow {
    double h = 0.0;
    double l = 0.0, l0 = 0.0, nu_x = 0.0, nu_y = 0.0;
    RegimeTag regime;
    double T = 0.0;
    std::optional<double> e_exact, e_tauberian, e_weyl, e_corrected;
    std::optional<double> err_weyl, err_corrected;
    double envelope_trivial = 0.0;  // h^{1-d} (1 + 1/l), constant stripped
    double envelope_leading = 0.0;  // h^{-(d-1)/2} l^{-(d+1)/2}
    int pair_index = 0;
    PointPair pair;
};

// Named model setup: operator, domain and an exact-spectrum provider. The
// basis factory must enumerate every eigenvalue at or below lambda_max (or
// throw OutOfRangeError if its validity cap cannot reach it).
struct Scenario {
    std::string name;
    std::string description;
    int dim;
    OperatorSpec op;
    DomainGeometry geom;
    std::function<SpectralBasis(double h, double lambda_max)> basis;
};

std::vector<std::string> scenario_names();
Scenario make_scenario(const std::string& name);

// Deterministic pair samplers over the scenario's box. "interior" keeps both
// points >= 0.3 away from every wall, "near_boundary" hugs the x_1 = 0 wall,
// "graded_l" spaces the separation logarithmically from an interior anchor.
std::vector<PointPair> sample_pairs(const std::string& mode, const Scenario& sc, int n,
                                    std::uint64_t seed);

// One row per (h, pair), deterministic given the config; bases are built once
// per h and shared across the worker pool.
std::vector<ResultRow> run_scenario(const ExperimentConfig& cfg);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Least squares on (log x, log y). Requires >= 3 strictly positive points.
SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// Max over rows of |err| / envelope_trivial for the chosen error column
// ("weyl" or "corrected"); rows without that column are skipped.
double calibrate_constant(const std::vector<ResultRow>& rows, const std::string& err_field);

// Writes the table as CSV or JSON with 17-significant-digit round-tripping;
// missing values become "NA" (CSV) or null (JSON).
void emit(const std::vector<ResultRow>& rows, const std::string& format,
          const std::string& path);

// Post-run invariants: calibrated envelope holds row-wise, the smoothed-sum
// deviation statistic |e_exact - e_tauberian| T h^{d-1} stays within a factor
// 4 per pair across the sweep, and the regime column re-derives from the
// inputs. Returns human-readable violations; empty means all hold.
std::vector<std::string> check_harness_invariants(const std::vector<ResultRow>& rows,
                                                  const ExperimentConfig& cfg);

}  // namespace skl
