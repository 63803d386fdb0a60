#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "esw/optimizer.hpp"
#include "esw/simulator.hpp"

namespace esw {

using json = nlohmann::ordered_json;

/// Everything a command needs, loaded from one scenario file. The simulation
/// block and ground truth are only consulted by `simulate`; solving and
/// verification never read them.
struct Scenario {
    std::string name;
    EstimatorSpec estimator;
    std::vector<Worker> workers;
    std::vector<Vec> fixed_points;
    std::vector<Vec> candidate_points;
    int max_selected = 0;
    TestPointDistribution F;
    ObjectiveSpec objective;
    NoiseModel noise;
    std::int64_t sim_n = 10000;
    std::uint64_t sim_seed = 1;
    std::optional<GroundTruth> truth;
};

/// Parse and validate a scenario; validation errors name the offending JSON
/// path (for example "workers[1].curve.scale").
Scenario parse_scenario(const json& j);

/// Read a scenario file from disk. Parse errors carry the parser's position.
Scenario load_scenario(const std::string& path);

/// Canonical JSON form: fixed key order, full round-trip precision. Loading
/// the emitted form reproduces the same digest.
json emit_scenario(const Scenario& scenario);

/// FNV-1a hash of the canonical serialization, as "fnv1a:<16 hex digits>".
std::string scenario_digest(const Scenario& scenario);

/// The optimizer's view of a scenario.
PlanProblem plan_problem(const Scenario& scenario);

} // namespace esw
