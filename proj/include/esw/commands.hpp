#pragma once

#include <optional>
#include <string>

#include "esw/scenario.hpp"

namespace esw {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitVerification = 3;
inline constexpr int kExitInfeasible = 4;

struct CommandOptions {
    SearchStrategy strategy = SearchStrategy::Exhaustive;
    std::optional<std::int64_t> n;       // overrides the scenario's simulation n
    std::optional<std::uint64_t> seed;   // overrides the scenario's seed
    double tamper_slope = 1.0;           // multiplies every payment slope
    double tamper_intercept = 0.0;       // added to every payment intercept
    std::string profile = "target";      // target|min|max|uniform|best-response|fixed:<e>
    std::string sweep_parameter;         // eta|budget
    double sweep_lo = 0.0;
    double sweep_hi = 0.0;
    int sweep_steps = 0;
};

/// Outcome of one command, ready for the CLI (or a test) to write out.
/// exit_code covers verdict failures; input and feasibility problems are
/// thrown as the corresponding error types instead.
struct CommandResult {
    int exit_code = kExitOk;
    json report;
    std::string table; // plot-ready TSV; empty when a command has no table
};

/// Optimize and synthesize the payment contract. Ridge scenarios produce a
/// plan only (the variance term drives the assignment; no payment rule).
CommandResult cmd_solve(const Scenario& scenario, const CommandOptions& options = {});

/// Analytic certification of the synthesized (optionally tampered) contract.
/// Exit 3 when any dominant-strategy or tight-rationality verdict fails.
CommandResult cmd_verify(const Scenario& scenario, const CommandOptions& options = {});

/// Monte Carlo play of the induced game at a strategy profile, with
/// per-worker best-response curves and empirical verdicts.
CommandResult cmd_simulate(const Scenario& scenario, const CommandOptions& options = {});

/// Re-solve across an eta or budget grid and tabulate the comparative
/// statics.
CommandResult cmd_sweep(const Scenario& scenario, const CommandOptions& options);

/// Parse a profile name into per-worker policies for this contract.
StrategyProfile parse_profile(const std::string& name, const Contract& contract);

} // namespace esw
