#include <cstdio>
#include <string>
#include <vector>

#include "skl/acceptance.hpp"
#include "skl/error.hpp"
#include "skl/harness.hpp"

#include "CLI11.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override,
            const std::string& format_override, int threads_override, long long seed_override) {
    skl::ExperimentConfig cfg = skl::load_config(config_path);
    if (!out_override.empty()) cfg.out_path = out_override;
    if (!format_override.empty()) cfg.out_format = format_override;
    if (threads_override > 0) cfg.threads = threads_override;
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (cfg.out_path.empty()) cfg.out_path = "results." + cfg.out_format;
    skl::validate_config(cfg);

    const std::vector<skl::ResultRow> rows = skl::run_scenario(cfg);
    skl::emit(rows, cfg.out_format, cfg.out_path);
    std::printf("wrote %zu rows to %s\n", rows.size(), cfg.out_path.c_str());

    const std::vector<std::string> violations = skl::check_harness_invariants(rows, cfg);
    for (const std::string& v : violations) std::fprintf(stderr, "invariant: %s\n", v.c_str());
    if (!violations.empty()) {
        std::fprintf(stderr, "%zu invariant violations\n", violations.size());
        return 1;
    }
    std::printf("all result invariants hold\n");
    return 0;
}

int cmd_accept(int criterion) {
    std::vector<skl::CriterionResult> results;
    if (criterion > 0) {
        results.push_back(skl::run_criterion(criterion));
    } else {
        results = skl::run_all_criteria();
    }
    bool all_pass = true;
    for (const skl::CriterionResult& r : results) {
        std::printf("criterion %d: %s (%s)\n", r.id, r.pass ? "PASS" : "FAIL",
                    r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

int cmd_list() {
    for (const std::string& name : skl::scenario_names()) {
        const skl::Scenario sc = skl::make_scenario(name);
        std::printf("%-26s %s\n", name.c_str(), sc.description.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral kernel laboratory: exact projector kernels vs their semiclassical "
                 "approximants on model domains"};
    app.require_subcommand(1);

    std::string config_path, out_override, format_override;
    int threads_override = 0;
    long long seed_override = -1;
    CLI::App* run = app.add_subcommand("run", "Run the sweep described by a config file");
    run->add_option("config", config_path, "key = value config file")->required();
    run->add_option("--out", out_override, "Output path override");
    run->add_option("--format", format_override, "Output format override (csv or json)");
    run->add_option("--threads", threads_override, "Worker thread count override");
    run->add_option("--seed", seed_override, "Pair sampler seed override");

    int criterion = 0;
    CLI::App* accept = app.add_subcommand("accept", "Run the end-to-end acceptance checks");
    accept->add_option("--criterion", criterion, "Run a single criterion (1..8)")
        ->check(CLI::Range(1, 8));

    app.add_subcommand("list-scenarios", "List the built-in model scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, out_override, format_override, threads_override,
                           seed_override);
        if (accept->parsed()) return cmd_accept(criterion);
        return cmd_list();
    } catch (const skl::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
