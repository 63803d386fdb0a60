#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "esw/commands.hpp"
#include "esw/errors.hpp"

namespace {

namespace fs = std::filesystem;

struct Cli {
    std::string scenario_path;
    std::string out_dir;
    esw::CommandOptions options;
};

std::string output_dir(const Cli& cli) {
    if (!cli.out_dir.empty()) return cli.out_dir;
    if (const char* env = std::getenv("ESW_OUT_DIR"); env && *env) return env;
    return ".";
}

void write_outputs(const Cli& cli, const char* command, const esw::CommandResult& result) {
    const fs::path dir = output_dir(cli);
    fs::create_directories(dir);
    const std::string stem = fs::path(cli.scenario_path).stem().string();
    const fs::path report_path = dir / (stem + "." + command + ".json");
    std::ofstream report(report_path);
    report << result.report.dump(2) << '\n';
    std::cout << "report: " << report_path.string() << '\n';
    if (!result.table.empty()) {
        const fs::path table_path = dir / (stem + "." + command + ".tsv");
        std::ofstream table(table_path);
        table << result.table;
        std::cout << "table: " << table_path.string() << '\n';
    }
}

void add_common(CLI::App* cmd, Cli& cli, bool with_tamper) {
    cmd->add_option("scenario", cli.scenario_path, "scenario file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", cli.out_dir,
                    "output directory (default: $ESW_OUT_DIR or the current directory)");
    cmd->add_option("--seed", cli.options.seed, "seed override");
    cmd->add_option("--n", cli.options.n, "episode count override");
    std::map<std::string, esw::SearchStrategy> strategies{
        {"exhaustive", esw::SearchStrategy::Exhaustive},
        {"local-search", esw::SearchStrategy::LocalSearch}};
    cmd->add_option("--strategy", cli.options.strategy, "candidate-point search strategy")
        ->transform(CLI::CheckedTransformer(strategies, CLI::ignore_case));
    if (with_tamper) {
        cmd->add_option("--tamper-slope", cli.options.tamper_slope,
                        "multiply every payment slope (negative control)");
        cmd->add_option("--tamper-intercept", cli.options.tamper_intercept,
                        "add to every payment intercept (negative control)");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"esw: optimal payment contracts for estimation with strategic workers"};
    app.require_subcommand(1);
    Cli cli;

    CLI::App* solve = app.add_subcommand("solve", "optimize the plan and synthesize the contract");
    add_common(solve, cli, false);

    CLI::App* verify = app.add_subcommand("verify", "analytic equilibrium certification");
    add_common(verify, cli, true);

    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo play of the induced game");
    add_common(simulate, cli, true);
    simulate->add_option("--profile", cli.options.profile,
                         "worker strategy: target|min|max|uniform|best-response|fixed:<e>");

    CLI::App* sweep = app.add_subcommand("sweep", "re-solve across an eta or budget grid");
    add_common(sweep, cli, false);
    sweep->add_option("parameter", cli.options.sweep_parameter, "eta or budget")->required();
    sweep->add_option("lo", cli.options.sweep_lo, "first grid value")->required();
    sweep->add_option("hi", cli.options.sweep_hi, "last grid value")->required();
    sweep->add_option("steps", cli.options.sweep_steps, "grid size")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : esw::kExitInput;
    }

    try {
        const esw::Scenario scenario = esw::load_scenario(cli.scenario_path);
        esw::CommandResult result;
        const char* command = nullptr;
        if (solve->parsed()) {
            command = "solve";
            result = esw::cmd_solve(scenario, cli.options);
        } else if (verify->parsed()) {
            command = "verify";
            result = esw::cmd_verify(scenario, cli.options);
        } else if (simulate->parsed()) {
            command = "simulate";
            result = esw::cmd_simulate(scenario, cli.options);
        } else {
            command = "sweep";
            result = esw::cmd_sweep(scenario, cli.options);
        }
        write_outputs(cli, command, result);
        if (result.report.contains("verdicts")) {
            std::cout << (result.exit_code == esw::kExitOk ? "PASS" : "FAIL") << '\n';
        }
        return result.exit_code;
    } catch (const esw::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return esw::kExitInfeasible;
    } catch (const esw::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return esw::kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return esw::kExitInput;
    }
}
