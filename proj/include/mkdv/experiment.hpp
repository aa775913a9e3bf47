#pragma once

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkdv/conservation.hpp"
#include "mkdv/errors.hpp"
#include "mkdv/scheme.hpp"
#include "mkdv/soliton.hpp"

namespace mkdv {

enum class SchemeKind { ec, baseline };

/// A complete experiment description: scheme, grid, horizon, solver controls,
/// and output location. Parsed from flat key=value files.
struct ExperimentConfig {
    SchemeKind scheme = SchemeKind::ec;
    double lambda = 0.0;
    double domain_a = -20.0;
    double domain_b = 20.0;
    std::size_t n_points = 400;
    double delta_t = 0.01;
    double t_end = 2.0;
    std::size_t record_every = 1;
    NewtonConfig newton;
    std::string output_path;  // base path for <base>.csv / <base>.json; empty = no files

    double delta_x() const { return (domain_b - domain_a) / static_cast<double>(n_points); }

    SchemeConfig scheme_config() const {
        SchemeConfig sc;
        sc.lambda = lambda;
        sc.delta_x = delta_x();
        sc.delta_t = delta_t;
        sc.n_points = n_points;
        sc.domain_a = domain_a;
        sc.domain_b = domain_b;
        return sc;
    }

    /// Number of steps; t_end must be an integer multiple of delta_t to
    /// 1e-9 relative (0.01 is not binary-representable, so an ulp-exact
    /// check would reject even t_end=2, delta_t=0.01).
    std::size_t step_count() const {
        const double ratio = t_end / delta_t;
        const auto steps = static_cast<long long>(std::llround(ratio));
        if (steps < 0 || std::abs(static_cast<double>(steps) * delta_t - t_end) >
                             1e-9 * std::max(1.0, std::abs(t_end)))
            throw ConfigError("t_end must be an integer number of delta_t steps");
        return static_cast<std::size_t>(steps);
    }

    void validate() const {
        scheme_config().validate();
        if (!(t_end >= 0.0)) throw ConfigError("t_end must be nonnegative");
        if (record_every < 1) throw ConfigError("record_every must be >= 1");
        if (!(newton.residual_tol > 0.0) || !(newton.step_tol > 0.0))
            throw ConfigError("newton tolerances must be positive");
        if (newton.max_iters < 1) throw ConfigError("newton_max_iters must be >= 1");
        (void)step_count();
    }

    std::string method_label() const {
        if (scheme == SchemeKind::baseline) return "baseline";
        std::ostringstream os;
        os << "EC(" << lambda << ")";
        return os.str();
    }
};

/// Parse a flat key=value config. Blank lines and lines starting with '#'
/// are ignored; unknown keys are rejected.
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    // std::stoul silently wraps negative input; insist on digits only.
    auto parse_size = [](const std::string& v) -> std::size_t {
        if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("not a nonnegative integer");
        return static_cast<std::size_t>(std::stoull(v));
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        try {
            if (key == "scheme") {
                if (val == "ec")
                    cfg.scheme = SchemeKind::ec;
                else if (val == "baseline")
                    cfg.scheme = SchemeKind::baseline;
                else
                    throw ConfigError("scheme must be 'ec' or 'baseline'");
            } else if (key == "lambda") {
                cfg.lambda = std::stod(val);
            } else if (key == "domain_a") {
                cfg.domain_a = std::stod(val);
            } else if (key == "domain_b") {
                cfg.domain_b = std::stod(val);
            } else if (key == "n_points") {
                cfg.n_points = parse_size(val);
            } else if (key == "delta_t") {
                cfg.delta_t = std::stod(val);
            } else if (key == "t_end") {
                cfg.t_end = std::stod(val);
            } else if (key == "record_every") {
                cfg.record_every = parse_size(val);
            } else if (key == "output_path") {
                cfg.output_path = val;
            } else if (key == "newton_residual_tol") {
                cfg.newton.residual_tol = std::stod(val);
            } else if (key == "newton_max_iters") {
                cfg.newton.max_iters = std::stoi(val);
            } else if (key == "newton_step_tol") {
                cfg.newton.step_tol = std::stod(val);
            } else {
                throw ConfigError("unknown config key '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("config line " + std::to_string(lineno) + ": bad value for '" +
                              key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

/// Everything a single run produces.
struct RunResult {
    ErrorReport report;
    InvariantSeries series;
    GridFunction final_state;
    std::size_t steps = 0;
    long newton_total = 0;
    double wall_seconds = 0.0;
};

inline std::string series_csv(const InvariantSeries& s) {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "t,mass,momentum,energy\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        os << s.times[i] << ',' << s.mass[i] << ',' << s.momentum[i] << ',' << s.energy[i]
           << '\n';
    return os.str();
}

inline nlohmann::json summary_json(const RunResult& r) {
    return nlohmann::json{{"method", r.report.method},
                          {"lambda", r.report.lambda},
                          {"dx", r.report.dx},
                          {"dt", r.report.dt},
                          {"steps", r.steps},
                          {"newton_iterations", r.newton_total},
                          {"wall_seconds", r.wall_seconds},
                          {"Err1", r.report.err1},
                          {"Err2", r.report.err2},
                          {"Err3", r.report.err3},
                          {"sol_err", r.report.sol_err}};
}

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
}

}  // namespace detail

/// Run one experiment: initialize from the exact solution at t=0, advance to
/// t_end, record invariants every record_every steps (and at the final step),
/// and measure errors against the exact solution at t_end. Writes
/// <output_path>.csv (invariant series) and <output_path>.json (summary)
/// when output_path is set.
inline RunResult run(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const SchemeConfig sc = cfg.scheme_config();
    const std::size_t steps = cfg.step_count();

    RunResult r;
    GridFunction u = sample_exact(cfg.domain_a, sc.delta_x, cfg.n_points, 0.0);
    record_invariants(u, 0.0, r.series);
    for (std::size_t k = 1; k <= steps; ++k) {
        StepStats st;
        try {
            u = cfg.scheme == SchemeKind::ec ? step(u, sc, cfg.newton, &st)
                                             : baseline_step(u, sc, cfg.newton, &st);
        } catch (const StepFailure& f) {
            throw StepFailure(cfg.method_label() + " step " + std::to_string(k) + "/" +
                                  std::to_string(steps) + ": " + f.what(),
                              f.residual_norm, f.iterations);
        }
        r.newton_total += st.iterations;
        if (k % cfg.record_every == 0 || k == steps)
            record_invariants(u, static_cast<double>(k) * cfg.delta_t, r.series);
    }

    const GridFunction exact_final = sample_exact(cfg.domain_a, sc.delta_x, cfg.n_points, cfg.t_end);
    r.report = error_metrics(r.series, u, exact_final);
    r.report.method = cfg.method_label();
    r.report.lambda = cfg.lambda;
    r.report.dx = sc.delta_x;
    r.report.dt = cfg.delta_t;
    r.final_state = std::move(u);
    r.steps = steps;
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!cfg.output_path.empty()) {
        detail::write_file(cfg.output_path + ".csv", series_csv(r.series));
        detail::write_file(cfg.output_path + ".json", summary_json(r).dump(2) + "\n");
    }
    return r;
}

/// One row of a λ sweep; failed runs are recorded and the sweep continues.
struct SweepRow {
    double lambda = 0.0;
    bool ok = false;
    std::string error;
    ErrorReport report;
};

inline std::vector<SweepRow> sweep_lambda(const ExperimentConfig& base,
                                          const std::vector<double>& lambdas) {
    if (lambdas.empty()) throw ConfigError("sweep: empty lambda list");
    std::vector<SweepRow> rows;
    rows.reserve(lambdas.size());
    for (const double lam : lambdas) {
        ExperimentConfig cfg = base;
        cfg.lambda = lam;
        cfg.output_path.clear();  // sweeps report rows; per-run files stay off
        SweepRow row;
        row.lambda = lam;
        try {
            row.report = run(cfg).report;
            row.ok = true;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// One refinement level of a convergence study.
struct ConvergenceLevel {
    double dx = 0.0;
    double dt = 0.0;
    double sol_err = 0.0;
    double order = std::numeric_limits<double>::quiet_NaN();  // vs previous level
};

/// Halve Δx and Δt per level and report sol_err with observed orders
/// log2(e_k / e_{k+1}).
inline std::vector<ConvergenceLevel> convergence_study(const ExperimentConfig& base, int levels) {
    if (levels < 2) throw ConfigError("convergence_study: levels must be >= 2");
    std::vector<ConvergenceLevel> table;
    for (int k = 0; k < levels; ++k) {
        ExperimentConfig cfg = base;
        cfg.n_points = base.n_points << k;
        cfg.delta_t = base.delta_t / static_cast<double>(1 << k);
        cfg.output_path.clear();
        const RunResult r = run(cfg);
        ConvergenceLevel lv;
        lv.dx = cfg.delta_x();
        lv.dt = cfg.delta_t;
        lv.sol_err = r.report.sol_err;
        if (k > 0) lv.order = std::log2(table.back().sol_err / lv.sol_err);
        table.push_back(lv);
    }
    return table;
}

}  // namespace mkdv
