#include "esw/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "esw/errors.hpp"
#include "esw/rng.hpp"

namespace esw {

namespace {

constexpr double kObjectiveTol = 1e-9;
constexpr std::size_t kExhaustiveBound = 1000000;
constexpr int kLocalSearchRestarts = 8;

Vec sensitivities_for(const PlanProblem& problem, const DesignBundle& bundle) {
    return problem.estimator.lambda == 0.0 ? sensitivity_h(problem.estimator, bundle)
                                           : ridge_sensitivity_h(problem.estimator, bundle);
}

double mse_for(const PlanProblem& problem, const DesignBundle& bundle, const Vec& sigmas) {
    return problem.estimator.lambda == 0.0 ? mse_g(problem.estimator, bundle, sigmas)
                                           : ridge_variance_g(problem.estimator, bundle, sigmas);
}

void check_workers(const PlanProblem& problem) {
    if (problem.workers.empty()) throw InputError("problem needs at least one worker");
    if (!problem.objective.per_worker_etas.empty() &&
        problem.objective.per_worker_etas.size() != problem.workers.size()) {
        throw InputError("per-worker eta list must have one entry per worker");
    }
    for (std::size_t i = 0; i < problem.workers.size(); ++i) {
        if (!(problem.eta_for(i) > 0.0)) throw InputError("tradeoff weights must be > 0");
    }
}

/// Cost matrix for a given point list: |W| x |W|, real columns first,
/// zero-cost dummies after.
std::vector<std::vector<double>> cost_matrix(const PlanProblem& problem,
                                             const std::vector<Vec>& points,
                                             const Vec& h, ExecPolicy policy) {
    const std::size_t n = problem.workers.size();
    const std::size_t k = points.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    const auto fill = [&](std::size_t i, std::size_t j) {
        cost[i][j] = optimal_effort(h(static_cast<Eigen::Index>(j)),
                                    problem.workers[i].curve, problem.eta_for(i))
                         .cost;
    };
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for collapse(2) schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < k; ++j) fill(i, j);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < k; ++j) fill(i, j);
        }
    }
    return cost;
}

/// Assemble a plan from a matching over `points`; shared by every solver.
Plan plan_from_matching(const PlanProblem& problem, const std::vector<Vec>& points,
                        const Vec& h, std::vector<std::vector<double>> cost,
                        const MatchingResult& matching) {
    const std::size_t k = points.size();
    Plan plan;
    plan.edge_costs = std::move(cost);
    for (std::size_t i = 0; i < problem.workers.size(); ++i) {
        const int j = matching.assignment[i];
        if (j < 0 || static_cast<std::size_t>(j) >= k) continue; // dummy: not hired
        const double hj = h(j);
        const EffortSolution sol =
            optimal_effort(hj, problem.workers[i].curve, problem.eta_for(i));
        plan.selected.push_back(static_cast<int>(i));
        plan.points.push_back(points[static_cast<std::size_t>(j)]);
        plan.efforts.push_back(sol.effort);
        const double sigma = problem.workers[i].curve.sigma(sol.effort);
        plan.mse_term += hj * sigma * sigma;
        plan.effort_term += problem.eta_for(i) * sol.effort;
    }
    plan.objective_value = plan.mse_term + plan.effort_term;
    return plan;
}

void cross_check(const Plan& plan, const PlanProblem& problem) {
    const double recomputed = objective_value(plan, problem);
    if (std::fabs(recomputed - plan.objective_value) >
        kObjectiveTol * (1.0 + std::fabs(recomputed))) {
        throw Error("solver self-check failed: objective " +
                    std::to_string(plan.objective_value) + " vs independent recomputation " +
                    std::to_string(recomputed));
    }
}

double multiset_count(std::size_t candidates, std::size_t size) {
    double count = 1.0;
    for (std::size_t t = 0; t < size; ++t) {
        count *= static_cast<double>(candidates + t) / static_cast<double>(t + 1);
        if (count > 1e15) return count;
    }
    return count;
}

void enumerate_multisets(std::size_t candidates, std::size_t size,
                         std::vector<std::vector<int>>& out) {
    std::vector<int> cur(size, 0);
    while (true) {
        out.push_back(cur);
        std::size_t p = size;
        while (p > 0 && cur[p - 1] == static_cast<int>(candidates) - 1) --p;
        if (p == 0) return;
        ++cur[p - 1];
        for (std::size_t q = p; q < size; ++q) cur[q] = cur[p - 1];
    }
}

/// Matching objective for one multiset of candidate indices; +inf when the
/// induced design is singular.
double config_objective(const PlanProblem& problem, const std::vector<int>& config) {
    std::vector<Vec> points;
    points.reserve(config.size());
    for (int c : config) points.push_back(problem.candidate_points[static_cast<std::size_t>(c)]);
    try {
        const DesignBundle bundle = build_design(problem.estimator, points, problem.F);
        const Vec h = sensitivities_for(problem, bundle);
        const auto cost = cost_matrix(problem, points, h, ExecPolicy::Serial);
        return min_cost_matching(cost).total_cost;
    } catch (const EstimatorUndefinedError&) {
        return std::numeric_limits<double>::infinity();
    }
}

Plan plan_for_config(const PlanProblem& problem, const std::vector<int>& config,
                     ExecPolicy policy) {
    std::vector<Vec> points;
    points.reserve(config.size());
    for (int c : config) points.push_back(problem.candidate_points[static_cast<std::size_t>(c)]);
    const DesignBundle bundle = build_design(problem.estimator, points, problem.F);
    const Vec h = sensitivities_for(problem, bundle);
    auto cost = cost_matrix(problem, points, h, policy);
    const MatchingResult matching = min_cost_matching(cost);
    Plan plan = plan_from_matching(problem, points, h, std::move(cost), matching);
    cross_check(plan, problem);
    return plan;
}

} // namespace

double PlanProblem::eta_for(std::size_t worker_index) const {
    if (!objective.per_worker_etas.empty()) {
        if (worker_index >= objective.per_worker_etas.size()) {
            throw InputError("worker index out of range for per-worker etas");
        }
        return objective.per_worker_etas[worker_index];
    }
    return objective.eta;
}

EffortSolution optimal_effort(double h, const EffortCurve& curve, double eta) {
    if (!(h >= 0.0)) throw InputError("sensitivity h must be >= 0");
    if (!(eta > 0.0)) throw InputError("effort weight must be > 0");
    const auto objective = [&](double e) {
        const double sigma = curve.sigma(e);
        return h * sigma * sigma + eta * e;
    };
    // Derivative h * (sigma^2)' + eta is strictly increasing, so the root (or
    // the nearer boundary) is the unique minimizer.
    const auto slope = [&](double e) { return h * curve.variance_slope(e) + eta; };
    double lo = curve.e_min();
    double hi = curve.e_max();
    if (slope(lo) >= 0.0) return {lo, objective(lo)};
    if (slope(hi) <= 0.0) return {hi, objective(hi)};
    const double tol = 1e-12 * (1.0 + hi - lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (slope(mid) >= 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double e = 0.5 * (lo + hi);
    return {e, objective(e)};
}

std::vector<std::vector<double>> edge_costs(const PlanProblem& problem, ExecPolicy policy) {
    check_workers(problem);
    if (problem.candidate_mode()) {
        throw InputError("edge costs are defined for fixed-vector problems");
    }
    if (problem.fixed_points.empty()) throw InputError("no fixed points to assign");
    if (problem.fixed_points.size() > problem.workers.size()) {
        throw InputError("need at least as many workers as fixed points");
    }
    const DesignBundle bundle = build_design(problem.estimator, problem.fixed_points, problem.F);
    const Vec h = sensitivities_for(problem, bundle);
    return cost_matrix(problem, problem.fixed_points, h, policy);
}

Plan solve_fixed(const PlanProblem& problem, ExecPolicy policy) {
    check_workers(problem);
    if (problem.candidate_mode()) {
        throw InputError("solve_fixed needs fixed points; use solve_candidates");
    }
    if (problem.fixed_points.empty()) throw InputError("no fixed points to assign");
    if (problem.fixed_points.size() > problem.workers.size()) {
        throw InputError("need at least as many workers as fixed points");
    }
    const DesignBundle bundle = build_design(problem.estimator, problem.fixed_points, problem.F);
    const Vec h = sensitivities_for(problem, bundle);
    auto cost = cost_matrix(problem, problem.fixed_points, h, policy);
    const MatchingResult matching = min_cost_matching(cost);
    Plan plan = plan_from_matching(problem, problem.fixed_points, h, std::move(cost), matching);
    // The matching total and the plan objective are the same sum.
    if (std::fabs(matching.total_cost - plan.objective_value) >
        kObjectiveTol * (1.0 + std::fabs(matching.total_cost))) {
        throw Error("matching total disagrees with the assembled plan objective");
    }
    cross_check(plan, problem);
    return plan;
}

Plan solve_candidates(const PlanProblem& problem, SearchStrategy strategy,
                      std::uint64_t seed, ExecPolicy policy) {
    check_workers(problem);
    if (!problem.candidate_mode()) {
        throw InputError("solve_candidates needs a candidate point set");
    }
    const std::size_t c = problem.candidate_points.size();
    std::size_t max_selected = problem.max_selected > 0
                                   ? static_cast<std::size_t>(problem.max_selected)
                                   : problem.workers.size();
    max_selected = std::min(max_selected, problem.workers.size());

    if (strategy == SearchStrategy::Exhaustive) {
        double total = 0.0;
        for (std::size_t r = 1; r <= max_selected; ++r) total += multiset_count(c, r);
        if (total > static_cast<double>(kExhaustiveBound)) {
            throw InputError("exhaustive search would visit about " +
                             std::to_string(static_cast<long long>(total)) +
                             " configurations, over the 1000000 bound; "
                             "use local-search");
        }
        std::vector<std::vector<int>> configs;
        configs.reserve(static_cast<std::size_t>(total));
        for (std::size_t r = 1; r <= max_selected; ++r) enumerate_multisets(c, r, configs);

        std::vector<double> objectives(configs.size());
        if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
            for (std::size_t t = 0; t < configs.size(); ++t) {
                objectives[t] = config_objective(problem, configs[t]);
            }
        } else {
            for (std::size_t t = 0; t < configs.size(); ++t) {
                objectives[t] = config_objective(problem, configs[t]);
            }
        }
        std::size_t best = configs.size();
        for (std::size_t t = 0; t < configs.size(); ++t) {
            if (best == configs.size() || objectives[t] < objectives[best]) best = t;
        }
        if (best == configs.size() || !std::isfinite(objectives[best])) {
            throw InfeasibleError("every candidate configuration leaves the estimator "
                                  "undefined");
        }
        return plan_for_config(problem, configs[best], policy);
    }

    // Seeded first-improvement descent over swap/add/drop moves, restarted.
    rng::Stream root(seed);
    std::vector<int> best_config;
    double best_objective = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < kLocalSearchRestarts; ++restart) {
        rng::Stream stream = root.child(static_cast<std::uint64_t>(restart));
        const std::size_t r = 1 + static_cast<std::size_t>(stream.below(max_selected));
        std::vector<int> cur(r);
        for (auto& idx : cur) idx = static_cast<int>(stream.below(c));
        std::sort(cur.begin(), cur.end());
        double cur_obj = config_objective(problem, cur);

        bool improved = true;
        while (improved) {
            improved = false;
            std::vector<std::vector<int>> neighbors;
            for (std::size_t p = 0; p < cur.size(); ++p) {
                for (std::size_t alt = 0; alt < c; ++alt) {
                    if (static_cast<int>(alt) == cur[p]) continue;
                    auto next = cur;
                    next[p] = static_cast<int>(alt);
                    std::sort(next.begin(), next.end());
                    neighbors.push_back(std::move(next));
                }
            }
            if (cur.size() < max_selected) {
                for (std::size_t alt = 0; alt < c; ++alt) {
                    auto next = cur;
                    next.push_back(static_cast<int>(alt));
                    std::sort(next.begin(), next.end());
                    neighbors.push_back(std::move(next));
                }
            }
            if (cur.size() > 1) {
                for (std::size_t p = 0; p < cur.size(); ++p) {
                    auto next = cur;
                    next.erase(next.begin() + static_cast<std::ptrdiff_t>(p));
                    neighbors.push_back(std::move(next));
                }
            }
            for (const auto& next : neighbors) {
                const double obj = config_objective(problem, next);
                if (obj < cur_obj - 1e-12) {
                    cur = next;
                    cur_obj = obj;
                    improved = true;
                    break;
                }
            }
        }
        if (cur_obj < best_objective) {
            best_objective = cur_obj;
            best_config = cur;
        }
    }
    if (!std::isfinite(best_objective)) {
        throw InfeasibleError("local search found no configuration with a well-defined "
                              "estimator");
    }
    Plan plan = plan_for_config(problem, best_config, policy);
    plan.heuristic = true;
    return plan;
}

Plan solve_budget(const PlanProblem& problem, ExecPolicy policy) {
    check_workers(problem);
    if (problem.objective.mode != ObjectiveSpec::Mode::Budget) {
        throw InputError("solve_budget needs a budget objective");
    }
    if (problem.candidate_mode()) {
        throw InputError("the budget variant needs fixed points");
    }
    const double budget = problem.objective.budget;
    if (!(budget >= 0.0)) throw InputError("budget must be >= 0");

    // Stage 1: fix selection and assignment with the eta-weighted matching at
    // the calibration eta. Exact for the effort stage below, heuristic for
    // this stage; the plan says so.
    PlanProblem calibration = problem;
    calibration.objective.mode = ObjectiveSpec::Mode::Weighted;
    Plan plan = solve_fixed(calibration, policy);
    plan.heuristic = true;

    const std::size_t k = plan.selected.size();
    const DesignBundle bundle = build_design(problem.estimator, plan.points, problem.F);
    const Vec h = sensitivities_for(problem, bundle);

    double min_total = 0.0;
    double max_total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& curve = problem.workers[static_cast<std::size_t>(plan.selected[i])].curve;
        min_total += curve.e_min();
        max_total += curve.e_max();
    }
    if (budget + 1e-12 < min_total) {
        throw InfeasibleError("budget " + std::to_string(budget) +
                              " is below the minimal feasible budget " +
                              std::to_string(min_total) + " (sum of minimum efforts)");
    }

    std::vector<double> efforts(k);
    const auto efforts_at = [&](double mu) {
        double total = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const auto& curve =
                problem.workers[static_cast<std::size_t>(plan.selected[i])].curve;
            efforts[i] = optimal_effort(h(static_cast<Eigen::Index>(i)), curve, mu).effort;
            total += efforts[i];
        }
        return total;
    };

    if (budget >= max_total) {
        // Slack budget: the pure-MSE minimum is everyone at maximum effort.
        for (std::size_t i = 0; i < k; ++i) {
            efforts[i] = problem.workers[static_cast<std::size_t>(plan.selected[i])]
                             .curve.e_max();
        }
    } else {
        // Total effort is continuous and nonincreasing in the multiplier;
        // bisect until the feasible side pins the budget.
        double lo = 0.0;
        double hi = 1.0;
        int guard = 0;
        while (efforts_at(hi) > budget && guard++ < 120) hi *= 2.0;
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (efforts_at(mid) > budget) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        efforts_at(hi);
    }

    plan.efforts = efforts;
    plan.mse_term = 0.0;
    plan.effort_term = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t w = static_cast<std::size_t>(plan.selected[i]);
        const double sigma = problem.workers[w].curve.sigma(efforts[i]);
        plan.mse_term += h(static_cast<Eigen::Index>(i)) * sigma * sigma;
        plan.effort_term += problem.eta_for(w) * efforts[i];
    }
    plan.objective_value = plan.mse_term + plan.effort_term;
    cross_check(plan, problem);
    return plan;
}

Plan solve(const PlanProblem& problem, SearchStrategy strategy, std::uint64_t seed,
           ExecPolicy policy) {
    if (problem.objective.mode == ObjectiveSpec::Mode::Budget) {
        return solve_budget(problem, policy);
    }
    if (problem.candidate_mode()) return solve_candidates(problem, strategy, seed, policy);
    return solve_fixed(problem, policy);
}

double objective_value(const Plan& plan, const PlanProblem& problem) {
    const std::size_t k = plan.selected.size();
    if (plan.points.size() != k || plan.efforts.size() != k) {
        throw InputError("plan inconsistent: selected/points/efforts lengths differ");
    }
    if (k == 0) throw InputError("plan inconsistent: no workers selected");
    for (std::size_t i = 0; i < k; ++i) {
        const int w = plan.selected[i];
        if (w < 0 || static_cast<std::size_t>(w) >= problem.workers.size()) {
            throw InputError("plan inconsistent: worker index " + std::to_string(w) +
                             " out of range");
        }
        if (i > 0 && plan.selected[i] <= plan.selected[i - 1]) {
            throw InputError("plan inconsistent: selected indices must be ascending");
        }
        if (!problem.workers[static_cast<std::size_t>(w)].curve.contains(plan.efforts[i])) {
            throw InputError("plan inconsistent: effort for worker " + std::to_string(w) +
                             " outside their interval");
        }
    }
    const DesignBundle bundle = build_design(problem.estimator, plan.points, problem.F);
    Vec sigmas(static_cast<Eigen::Index>(k));
    double effort_term = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t w = static_cast<std::size_t>(plan.selected[i]);
        sigmas(static_cast<Eigen::Index>(i)) =
            problem.workers[w].curve.sigma(plan.efforts[i]);
        effort_term += problem.eta_for(w) * plan.efforts[i];
    }
    return mse_for(problem, bundle, sigmas) + effort_term;
}

} // namespace esw
