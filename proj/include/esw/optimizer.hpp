#pragma once

#include <cstdint>
#include <vector>

#include "esw/exec.hpp"
#include "esw/hungarian.hpp"
#include "esw/mechanism.hpp"

namespace esw {

struct ObjectiveSpec {
    enum class Mode { Weighted, Budget };

    Mode mode = Mode::Weighted;
    double eta = 1.0;                    // scalar tradeoff weight
    std::vector<double> per_worker_etas; // optional override, one per worker
    double budget = 0.0;                 // Budget mode: cap on total effort
};

/// The planner's input: who is available, where data may be collected, which
/// estimator will be fit, and how accuracy trades off against effort.
struct PlanProblem {
    std::vector<Worker> workers;
    std::vector<Vec> fixed_points;     // fixed-vectors mode when nonempty
    std::vector<Vec> candidate_points; // candidate mode when nonempty
    int max_selected = 0;              // candidate mode: bound on the design size
    EstimatorSpec estimator;
    TestPointDistribution F;
    ObjectiveSpec objective;

    bool candidate_mode() const { return !candidate_points.empty(); }
    double eta_for(std::size_t worker_index) const;
};

/// A solved plan: which workers to hire, where to send them, and how hard
/// they should work. objective_value always satisfies
///   objective_value == mse_term + effort_term
/// and is re-derivable from the problem via objective_value(plan, problem).
struct Plan {
    std::vector<int> selected;   // indices into problem.workers, ascending
    std::vector<Vec> points;     // assigned point per selected worker
    std::vector<double> efforts; // target effort per selected worker
    double objective_value = 0.0;
    double mse_term = 0.0;
    double effort_term = 0.0;
    std::vector<std::vector<double>> edge_costs; // set when matching was used
    bool heuristic = false; // true for local-search plans (no optimality proof)
};

struct EffortSolution {
    double effort = 0.0;
    double cost = 0.0;
};

/// Local-search plans on the instances we test land on the exhaustive
/// optimum; this declared factor is the empirical bound the tests hold the
/// heuristic to. It carries no worst-case proof.
inline constexpr double kLocalSearchDeclaredFactor = 1.05;

/// Minimize h * sigma(e)^2 + eta * e over the curve's effort interval. The
/// objective is strictly convex, so bisection on its derivative finds the
/// unique minimizer; boundary solutions clamp. Ties break toward smaller
/// efforts.
EffortSolution optimal_effort(double h, const EffortCurve& curve, double eta);

/// |workers| x |workers| cost matrix for the assignment step: entry (i, j)
/// with j < k is the best achievable h_j sigma_i(e)^2 + eta_i e for worker i
/// at fixed point j; columns k.. are zero-cost dummies meaning "not hired".
std::vector<std::vector<double>> edge_costs(const PlanProblem& problem,
                                            ExecPolicy policy = ExecPolicy::Parallel);

/// Exact solution of the fixed-vectors problem via min-cost matching over
/// edge_costs. Works for ordinary least squares and, because the bias term is
/// constant when every fixed point is used, for the ridge variance term too.
Plan solve_fixed(const PlanProblem& problem, ExecPolicy policy = ExecPolicy::Parallel);

enum class SearchStrategy { Exhaustive, LocalSearch };

/// Candidate-points solver. Exhaustive enumerates every multiset of
/// candidates up to max_selected (refusing beyond 1e6 configurations) and is
/// globally optimal; local-search runs seeded first-improvement descent with
/// restarts and marks its plan heuristic.
Plan solve_candidates(const PlanProblem& problem, SearchStrategy strategy,
                      std::uint64_t seed = 0, ExecPolicy policy = ExecPolicy::Parallel);

/// Budget variant: the assignment is fixed first by the eta-weighted matching
/// at the problem's calibration eta, then efforts minimize the MSE term
/// subject to total effort <= budget, solved exactly by bisection on the
/// Lagrange multiplier. Throws InfeasibleError (naming the minimal feasible
/// budget) when the budget cannot cover minimum efforts.
Plan solve_budget(const PlanProblem& problem, ExecPolicy policy = ExecPolicy::Parallel);

/// Dispatch on the problem's mode: budget, candidates, or fixed vectors.
Plan solve(const PlanProblem& problem, SearchStrategy strategy = SearchStrategy::Exhaustive,
           std::uint64_t seed = 0, ExecPolicy policy = ExecPolicy::Parallel);

/// Independent recomputation of a plan's objective from estimator-core
/// primitives; every solver asserts its reported value against this. Throws
/// InputError naming the inconsistent component when the plan does not fit
/// the problem.
double objective_value(const Plan& plan, const PlanProblem& problem);

} // namespace esw
