#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "skl/error.hpp"
#include "skl/harness.hpp"

#include "json.hpp"

namespace skl {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error("config key '" + key + "' has a malformed number: " + value);
    }
}

std::string format_value(const std::optional<double>& v) {
    if (!v) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", *v);
    return buf;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw IoError("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') continue;  // cosmetic section
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(lineno) + " is not key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "scenario") {
            cfg.scenario = value;
        } else if (key == "tau") {
            cfg.tau = parse_number(key, value);
        } else if (key == "h_sweep") {
            cfg.h_sweep.clear();
            for (const std::string& tok : split_commas(value))
                cfg.h_sweep.push_back(parse_number(key, tok));
        } else if (key == "t_factor") {
            cfg.t_factor = parse_number(key, value);
        } else if (key == "t_fixed") {
            cfg.t_fixed = parse_number(key, value);
        } else if (key == "t_cap") {
            cfg.t_cap = parse_number(key, value);
        } else if (key == "pair_mode") {
            cfg.pair_mode = value;
        } else if (key == "pair") {
            const std::vector<std::string> toks = split_commas(value);
            if (toks.empty() || toks.size() % 2 != 0)
                throw Error("config 'pair' needs an even comma list (x coords then y coords)");
            PointPair p;
            const std::size_t d = toks.size() / 2;
            for (std::size_t i = 0; i < d; ++i) p.x.push_back(parse_number(key, toks[i]));
            for (std::size_t i = d; i < toks.size(); ++i) p.y.push_back(parse_number(key, toks[i]));
            cfg.pairs.push_back(std::move(p));
        } else if (key == "n_pairs") {
            cfg.n_pairs = static_cast<int>(parse_number(key, value));
        } else if (key == "delta") {
            cfg.delta = parse_number(key, value);
        } else if (key == "seed") {
            try {
                cfg.seed = std::stoull(value, nullptr, 0);
            } catch (const std::exception&) {
                throw Error("config key 'seed' has a malformed integer: " + value);
            }
        } else if (key == "out") {
            cfg.out_path = value;
        } else if (key == "format") {
            cfg.out_format = value;
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_number(key, value));
        } else {
            throw Error("unknown config key '" + key + "' on line " + std::to_string(lineno));
        }
    }
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.scenario.empty()) throw Error("config: scenario name missing");
    if (!(cfg.tau > 0)) throw OutOfRangeError("config: tau must be positive");
    if (cfg.h_sweep.size() < 4)
        throw OutOfRangeError("config: h_sweep needs at least 4 entries for slope fits");
    for (std::size_t i = 0; i < cfg.h_sweep.size(); ++i) {
        if (!(cfg.h_sweep[i] > 0)) throw OutOfRangeError("config: h values must be positive");
        if (i > 0 && !(cfg.h_sweep[i] < cfg.h_sweep[i - 1]))
            throw OutOfRangeError("config: h_sweep must be strictly decreasing");
    }
    if (cfg.pair_mode == "explicit") {
        if (cfg.pairs.empty()) throw OutOfRangeError("config: explicit pair mode without pairs");
    } else if (cfg.pair_mode != "interior" && cfg.pair_mode != "near_boundary" &&
               cfg.pair_mode != "graded_l") {
        throw OutOfRangeError("config: unknown pair_mode " + cfg.pair_mode);
    }
    if (cfg.pair_mode != "explicit" && cfg.n_pairs < 1)
        throw OutOfRangeError("config: sampler needs n_pairs >= 1");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0 / 6.0))
        throw OutOfRangeError("config: delta must lie in (0, 1/6)");
    if (cfg.out_format != "csv" && cfg.out_format != "json")
        throw OutOfRangeError("config: format must be csv or json");
    if (cfg.threads < 1) throw OutOfRangeError("config: threads must be >= 1");
    if (!(cfg.t_factor > 0) && !(cfg.t_fixed > 0))
        throw OutOfRangeError("config: need a positive t_factor or t_fixed");
}

double effective_time_window(const ExperimentConfig& cfg, double l, double h) {
    double T = (cfg.t_fixed > 0.0) ? cfg.t_fixed : std::max(cfg.t_factor * l, 8.0 * h);
    if (cfg.t_cap > 0.0) T = std::min(T, cfg.t_cap);
    return T;
}

void emit(const std::vector<ResultRow>& rows, const std::string& format,
          const std::string& path) {
    if (rows.empty()) throw OutOfRangeError("emit: empty table");
    const std::size_t d = rows.front().pair.x.size();

    std::ofstream out(path);
    if (!out.good()) throw IoError("emit: cannot open output file " + path);

    if (format == "csv") {
        out << "h,l,l0,nu_x,nu_y,regime,T,e_exact,e_tauberian,e_weyl,e_corrected,"
               "err_weyl,err_corrected,env_trivial,env_leading,pair_index";
        for (std::size_t i = 0; i < d; ++i) out << ",x" << (i + 1);
        for (std::size_t i = 0; i < d; ++i) out << ",y" << (i + 1);
        out << "\n";
        for (const ResultRow& r : rows) {
            out << format_value(r.h) << ',' << format_value(r.l) << ',' << format_value(r.l0)
                << ',' << format_value(r.nu_x) << ',' << format_value(r.nu_y) << ','
                << regime_name(r.regime.regime_case) << ',' << format_value(r.T) << ','
                << format_value(r.e_exact) << ',' << format_value(r.e_tauberian) << ','
                << format_value(r.e_weyl) << ',' << format_value(r.e_corrected) << ','
                << format_value(r.err_weyl) << ',' << format_value(r.err_corrected) << ','
                << format_value(r.envelope_trivial) << ',' << format_value(r.envelope_leading)
                << ',' << r.pair_index;
            for (std::size_t i = 0; i < d; ++i) out << ',' << format_value(r.pair.x[i]);
            for (std::size_t i = 0; i < d; ++i) out << ',' << format_value(r.pair.y[i]);
            out << "\n";
        }
    } else if (format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        auto opt = [](const std::optional<double>& v) {
            return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
        };
        for (const ResultRow& r : rows) {
            nlohmann::ordered_json j;
            j["h"] = r.h;
            j["l"] = r.l;
            j["l0"] = r.l0;
            j["nu_x"] = r.nu_x;
            j["nu_y"] = r.nu_y;
            j["regime"] = regime_name(r.regime.regime_case);
            j["T"] = r.T;
            j["e_exact"] = opt(r.e_exact);
            j["e_tauberian"] = opt(r.e_tauberian);
            j["e_weyl"] = opt(r.e_weyl);
            j["e_corrected"] = opt(r.e_corrected);
            j["err_weyl"] = opt(r.err_weyl);
            j["err_corrected"] = opt(r.err_corrected);
            j["env_trivial"] = r.envelope_trivial;
            j["env_leading"] = r.envelope_leading;
            j["pair_index"] = r.pair_index;
            j["x"] = r.pair.x;
            j["y"] = r.pair.y;
            arr.push_back(std::move(j));
        }
        out << arr.dump(2) << "\n";
    } else {
        throw OutOfRangeError("emit: unknown format " + format);
    }
    if (!out.good()) throw IoError("emit: write failure on " + path);
}

}  // namespace skl
