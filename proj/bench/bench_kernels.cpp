// Serial vs parallel timings for the four hot kernels: closed-form Monte
// Carlo MSE, objective estimation, best-response curves, and edge-cost
// construction. Every kernel returns bit-identical results under either
// policy (the tests assert that); these benchmarks show what the parallel
// policy buys at tested sizes.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "esw/estimator.hpp"
#include "esw/mechanism.hpp"
#include "esw/optimizer.hpp"
#include "esw/simulator.hpp"

namespace {

using namespace esw;

Vec vec1(double x) {
    Vec v(1);
    v << x;
    return v;
}

std::vector<Worker> make_workers(int n) {
    rng::Stream s(rng::mix64(2024));
    std::vector<Worker> out;
    for (int i = 0; i < n; ++i) {
        const double scale = s.uniform(0.5, 2.0);
        const double shape = s.uniform(0.3, 1.5);
        const double e_max = s.uniform(2.0, 6.0);
        out.push_back({"w" + std::to_string(i + 1),
                       i % 2 == 0 ? EffortCurve::power_decay(scale, shape, 0.0, e_max)
                                  : EffortCurve::exponential_decay(scale, shape, 0.0, e_max)});
    }
    return out;
}

PlanProblem make_problem(int n_workers, int k_points) {
    rng::Stream s(rng::mix64(4096 + static_cast<std::uint64_t>(n_workers)));
    PlanProblem problem{make_workers(n_workers),
                        {},
                        {},
                        0,
                        EstimatorSpec(FeatureMap::polynomial(2, 1), 0.0),
                        TestPointDistribution::point_mass(vec1(0.25)),
                        {}};
    for (int j = 0; j < k_points; ++j)
        problem.fixed_points.push_back(
            vec1(-1.5 + 3.0 * j / (k_points - 1) + s.uniform(-0.1, 0.1)));
    problem.objective.eta = 0.1;
    return problem;
}

const PlanProblem& small_problem() {
    static const PlanProblem problem = make_problem(6, 6);
    return problem;
}

const Contract& bench_contract() {
    static const Contract contract = [] {
        const PlanProblem& problem = small_problem();
        const Plan plan = solve_fixed(problem);
        std::vector<Worker> selected;
        std::vector<double> etas;
        for (int idx : plan.selected) {
            selected.push_back(problem.workers[static_cast<std::size_t>(idx)]);
            etas.push_back(problem.objective.eta);
        }
        return synthesize_contract(selected, plan.points, plan.efforts, problem.estimator,
                                   problem.F, etas);
    }();
    return contract;
}

GroundTruth bench_truth() {
    Vec coeff(3);
    coeff << 0.4, -0.3, 0.2;
    return GroundTruth{coeff};
}

void BM_MonteCarloMse(benchmark::State& state, ExecPolicy policy) {
    const PlanProblem& problem = small_problem();
    const Vec sigmas = Vec::Constant(static_cast<int>(problem.fixed_points.size()), 0.8);
    const std::int64_t n = state.range(0);
    for (auto _ : state) {
        const MonteCarloResult r =
            monte_carlo_mse(problem.estimator, problem.fixed_points, problem.F, sigmas,
                            bench_truth(), NoiseModel(NoiseModel::Family::Gaussian), n, 42, policy);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_EstimateObjective(benchmark::State& state, ExecPolicy policy) {
    const Contract& contract = bench_contract();
    const SimulationContext ctx{bench_truth(), NoiseModel(NoiseModel::Family::Gaussian), 1.0};
    const StrategyProfile profile =
        StrategyProfile::uniform(EffortPolicy::target(), contract.workers.size());
    const std::int64_t n = state.range(0);
    for (auto _ : state) {
        const ObjectiveEstimate est = estimate_objective(contract, ctx, profile, n, 7, policy);
        benchmark::DoNotOptimize(est);
    }
    state.SetItemsProcessed(state.iterations() * n);
}

void BM_BestResponseCurve(benchmark::State& state, ExecPolicy policy) {
    const Contract& contract = bench_contract();
    const SimulationContext ctx{bench_truth(), NoiseModel(NoiseModel::Family::Gaussian), 1.0};
    const StrategyProfile profile =
        StrategyProfile::uniform(EffortPolicy::target(), contract.workers.size());
    const std::vector<double> grid = effort_grid(contract, 0, 41);
    const std::int64_t n = state.range(0);
    for (auto _ : state) {
        const BestResponseCurve curve =
            empirical_best_response(contract, ctx, 0, profile, grid, n, 11, policy);
        benchmark::DoNotOptimize(curve);
    }
    state.SetItemsProcessed(state.iterations() * n * static_cast<std::int64_t>(grid.size()));
}

void BM_EdgeCosts(benchmark::State& state, ExecPolicy policy) {
    const PlanProblem problem = make_problem(static_cast<int>(state.range(0)), 6);
    for (auto _ : state) {
        const auto costs = edge_costs(problem, policy);
        benchmark::DoNotOptimize(costs);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

} // namespace

BENCHMARK_CAPTURE(BM_MonteCarloMse, serial, ExecPolicy::Serial)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK_CAPTURE(BM_MonteCarloMse, parallel, ExecPolicy::Parallel)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK_CAPTURE(BM_EstimateObjective, serial, ExecPolicy::Serial)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK_CAPTURE(BM_EstimateObjective, parallel, ExecPolicy::Parallel)->Arg(1 << 12)->Arg(1 << 15);
BENCHMARK_CAPTURE(BM_BestResponseCurve, serial, ExecPolicy::Serial)->Arg(1 << 10)->Arg(1 << 13);
BENCHMARK_CAPTURE(BM_BestResponseCurve, parallel, ExecPolicy::Parallel)->Arg(1 << 10)->Arg(1 << 13);
BENCHMARK_CAPTURE(BM_EdgeCosts, serial, ExecPolicy::Serial)->Arg(8)->Arg(32);
BENCHMARK_CAPTURE(BM_EdgeCosts, parallel, ExecPolicy::Parallel)->Arg(8)->Arg(32);

BENCHMARK_MAIN();
