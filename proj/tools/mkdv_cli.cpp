// Command-line driver for the conservative modified-KdV solver.
//
// Subcommands:
//   run <config>                       single experiment from a key=value config file
//   sweep <config> --lambdas a,b,...   one run per lambda, CSV table on stdout
//   converge <config> --levels k       halve dx and dt per level, report observed orders
//   verify                             exact symbolic checks of the conservation structure
//   table1                             EC(0.023) and EC(-0.07) at the benchmark settings
//
// Exit codes: 0 success, 1 numerical failure, 2 config/usage error,
//             3 symbolic verification failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mkdv/errors.hpp"
#include "mkdv/experiment.hpp"
#include "mkdv/symbolic.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSymbolic = 3;

void print_run_summary(const mkdv::RunResult& r) {
    std::cout << mkdv::summary_json(r).dump(2) << "\n";
}

int cmd_run(const std::string& config_path) {
    const mkdv::ExperimentConfig cfg = mkdv::parse_config_file(config_path);
    const mkdv::RunResult r = mkdv::run(cfg);
    print_run_summary(r);
    if (!cfg.output_path.empty()) {
        std::cerr << "wrote " << cfg.output_path << ".csv and " << cfg.output_path << ".json\n";
    }
    return kExitSuccess;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& lambdas) {
    mkdv::ExperimentConfig base = mkdv::parse_config_file(config_path);
    const std::vector<mkdv::SweepRow> rows = mkdv::sweep_lambda(base, lambdas);
    std::cout << mkdv::csv_header() << "\n";
    bool any_failed = false;
    for (const auto& row : rows) {
        if (row.ok) {
            std::cout << mkdv::to_csv_row(row.report) << "\n";
        } else {
            any_failed = true;
            std::ostringstream lam;
            lam << std::setprecision(17) << row.lambda;
            std::cout << "# lambda=" << lam.str() << " failed: " << row.error << "\n";
        }
    }
    return any_failed ? kExitNumerical : kExitSuccess;
}

int cmd_converge(const std::string& config_path, int levels) {
    const mkdv::ExperimentConfig base = mkdv::parse_config_file(config_path);
    const std::vector<mkdv::ConvergenceLevel> table = mkdv::convergence_study(base, levels);
    std::cout << "level,dx,dt,sol_err,order\n";
    for (std::size_t k = 0; k < table.size(); ++k) {
        std::ostringstream os;
        os << std::setprecision(17) << k << ',' << table[k].dx << ',' << table[k].dt << ','
           << table[k].sol_err << ',';
        if (k == 0) {
            os << "n/a";
        } else {
            os << table[k].order;
        }
        std::cout << os.str() << "\n";
    }
    return kExitSuccess;
}

int cmd_verify() {
    using mkdv::sym::GridPolynomial;

    const GridPolynomial scheme = mkdv::sym::build_scheme_symbolic();
    const GridPolynomial characteristic = mkdv::sym::build_characteristic_symbolic();

    bool all_ok = true;

    const auto report = [&all_ok](const std::string& name, const mkdv::sym::KernelCheck& check) {
        std::cout << name << ": " << (check.ok ? "PASS" : "FAIL") << "\n";
        if (!check.ok) {
            all_ok = false;
            std::cout << "  witness polynomial:\n";
            std::istringstream lines(mkdv::sym::serialize(check.witness));
            std::string line;
            while (std::getline(lines, line)) std::cout << "    " << line << "\n";
        }
    };

    report("mass product in Euler-operator kernel      [E(A) = 0]",
           mkdv::sym::verify_kernel(scheme));
    report("energy product in Euler-operator kernel    [E(Q3*A) = 0]",
           mkdv::sym::verify_kernel(mkdv::sym::poly_mul(characteristic, scheme)));

    const GridPolynomial defect = mkdv::sym::energy_divergence_defect(
        mkdv::sym::build_energy_flux_symbolic(), mkdv::sym::build_energy_density_symbolic());
    const bool div_ok = defect.is_zero();
    std::cout << "energy divergence identity             [Q3*A = Dm(F3) + Dn(G3)]: "
              << (div_ok ? "PASS" : "FAIL") << "\n";
    if (!div_ok) {
        all_ok = false;
        std::cout << "  defect polynomial:\n";
        std::istringstream lines(mkdv::sym::serialize(defect));
        std::string line;
        while (std::getline(lines, line)) std::cout << "    " << line << "\n";
    }

    if (!all_ok) {
        std::cerr << "symbolic verification failed\n";
        return kExitSymbolic;
    }
    std::cout << "all symbolic checks passed\n";
    return kExitSuccess;
}

struct Table1Reference {
    double lambda;
    double err2_ref;
    double sol_err_ref;
};

int cmd_table1() {
    mkdv::ExperimentConfig base;
    base.scheme = mkdv::SchemeKind::ec;
    base.domain_a = -20.0;
    base.domain_b = 20.0;
    base.n_points = 400;
    base.delta_t = 0.01;
    base.t_end = 2.0;
    base.record_every = 1;

    const std::vector<Table1Reference> refs = {
        {0.023, 1.41e-4, 0.0036},
        {-0.07, 9.50e-5, 0.0587},
    };

    std::printf("%-12s %-12s %-12s %-12s %-12s %-12s %-12s\n", "method", "Err1", "Err2", "Err3",
                "sol_err", "Err2_ref", "sol_err_ref");
    for (const auto& ref : refs) {
        mkdv::ExperimentConfig cfg = base;
        cfg.lambda = ref.lambda;
        const mkdv::RunResult r = mkdv::run(cfg);
        std::printf("%-12s %-12.3e %-12.3e %-12.3e %-12.4f %-12.3e %-12.4f\n",
                    r.report.method.c_str(), r.report.err1, r.report.err2, r.report.err3,
                    r.report.sol_err, ref.err2_ref, ref.sol_err_ref);
    }
    return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conservative finite-difference schemes for the modified KdV equation"};
    app.require_subcommand(1);

    int rc = kExitSuccess;

    std::string run_config;
    CLI::App* run_cmd = app.add_subcommand("run", "run a single experiment from a config file");
    run_cmd->add_option("config", run_config, "path to a key=value config file")->required();
    run_cmd->callback([&] { rc = cmd_run(run_config); });

    std::string sweep_config;
    std::vector<double> sweep_lambdas;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "run the same experiment across a list of lambda values");
    sweep_cmd->add_option("config", sweep_config, "path to a key=value config file")->required();
    sweep_cmd->add_option("--lambdas", sweep_lambdas, "comma-separated lambda values")
        ->required()
        ->delimiter(',');
    sweep_cmd->callback([&] { rc = cmd_sweep(sweep_config, sweep_lambdas); });

    std::string conv_config;
    int conv_levels = 0;
    CLI::App* conv_cmd =
        app.add_subcommand("converge", "refinement study halving dx and dt per level");
    conv_cmd->add_option("config", conv_config, "path to a key=value config file")->required();
    conv_cmd->add_option("--levels", conv_levels, "number of refinement levels (>= 2)")
        ->required();
    conv_cmd->callback([&] { rc = cmd_converge(conv_config, conv_levels); });

    CLI::App* verify_cmd = app.add_subcommand(
        "verify", "exact symbolic verification of the discrete conservation structure");
    verify_cmd->callback([&] { rc = cmd_verify(); });

    CLI::App* table_cmd = app.add_subcommand(
        "table1", "benchmark comparison: EC(0.023) and EC(-0.07) on the soliton test");
    table_cmd->callback([&] { rc = cmd_table1(); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int cli_rc = app.exit(e);
        return cli_rc == 0 ? kExitSuccess : kExitConfig;
    } catch (const mkdv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const mkdv::StepFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const mkdv::SingularMatrixError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return rc;
}
