#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "esw/mechanism.hpp"
#include "esw/noise.hpp"
#include "esw/rng.hpp"

namespace esw {

/// What workers do when episodes are played. The simulator owns the ground
/// truth; the mechanism never sees it.
struct SimulationContext {
    GroundTruth truth;
    NoiseModel noise;
    /// Multiplies every sigma at sample time; 1 plays the contract as
    /// written, tiny values approximate the noiseless limit.
    double noise_scale = 1.0;
};

struct EffortPolicy {
    enum class Kind { Target, Min, Max, Fixed, UniformRandom, BestResponseEmpirical };

    Kind kind = Kind::Target;
    double fixed = 0.0; // Fixed kind only

    static EffortPolicy target() { return {Kind::Target, 0.0}; }
    static EffortPolicy minimum() { return {Kind::Min, 0.0}; }
    static EffortPolicy maximum() { return {Kind::Max, 0.0}; }
    static EffortPolicy fixed_at(double e) { return {Kind::Fixed, e}; }
    static EffortPolicy uniform_random() { return {Kind::UniformRandom, 0.0}; }
    static EffortPolicy empirical_best() { return {Kind::BestResponseEmpirical, 0.0}; }
};

struct StrategyProfile {
    std::vector<EffortPolicy> policies; // one per contract worker

    static StrategyProfile uniform(EffortPolicy policy, std::size_t workers);
};

struct EpisodeOutcome {
    std::uint64_t seed = 0;
    std::size_t support_index = 0;       // which x* was drawn
    std::vector<double> efforts;         // efforts actually exerted
    std::vector<double> reports;         // y_i per worker
    std::vector<double> payments;        // realized p_i per worker
    std::vector<double> utilities;       // p_i - e_i per worker
    double squared_error = 0.0;          // (fit(x*) - f(x*))^2
    double objective = 0.0;              // squared error + sum_i eta_i p_i
};

/// One noisy report: y = f(x) + epsilon with sd sigma(e). Throws DomainError
/// when e is outside the curve's interval.
double sample_report(const FeatureMap& features, const GroundTruth& truth,
                     const NoiseModel& noise, const EffortCurve& curve, const Vec& x,
                     double e, rng::Stream& stream);

/// Play one round of the induced game. Reproducible: the outcome is a pure
/// function of (contract, context, profile, seed).
EpisodeOutcome run_episode(const Contract& contract, const SimulationContext& context,
                           const StrategyProfile& profile, std::uint64_t seed);

struct SummaryStat {
    double mean = 0.0;
    double std_error = 0.0;
};

struct ObjectiveEstimate {
    std::int64_t episodes = 0;
    SummaryStat mse_term;
    SummaryStat payment_term; // sum_i eta_i p_i
    SummaryStat objective;    // mse + payment term
    std::vector<SummaryStat> worker_payment;
    std::vector<SummaryStat> worker_utility;
};

/// Monte Carlo estimate of the realized objective and per-worker accounts at
/// a strategy profile. Deterministic given the seed and independent of the
/// execution policy (episodes use hierarchically derived streams and the
/// reduction is fixed-shape pairwise summation).
ObjectiveEstimate estimate_objective(const Contract& contract,
                                     const SimulationContext& context,
                                     const StrategyProfile& profile, std::int64_t n,
                                     std::uint64_t seed,
                                     ExecPolicy policy = ExecPolicy::Parallel);

struct BestResponseCurve {
    std::vector<double> grid;
    std::vector<double> mean_utility;
    std::vector<double> std_error;
    std::size_t argmax = 0;
    /// Top two grid points within 2 joint standard errors of each other.
    bool ambiguous_top_two = false;
    /// Argmax beats every non-adjacent grid point by at least 2 joint SE.
    bool isolated = false;
};

/// Mean utility of worker i at each grid effort while opponents follow
/// `profile`, using common random numbers across grid points so the curve's
/// shape is sharp even at moderate n.
BestResponseCurve empirical_best_response(const Contract& contract,
                                          const SimulationContext& context, std::size_t i,
                                          const StrategyProfile& profile,
                                          const std::vector<double>& grid,
                                          std::int64_t n_per_point, std::uint64_t seed,
                                          ExecPolicy policy = ExecPolicy::Parallel);

/// Evenly spaced effort grid over worker i's interval.
std::vector<double> effort_grid(const Contract& contract, std::size_t i, std::size_t points);

/// The fixed efforts a profile resolves to, or nullopt when any policy
/// randomizes per episode. Lets callers compare simulation output against
/// the analytic utility at the same efforts.
std::optional<std::vector<double>> resolved_efforts(const Contract& contract,
                                                    const SimulationContext& context,
                                                    const StrategyProfile& profile,
                                                    std::uint64_t seed);

} // namespace esw
