#pragma once

#include <string>
#include <vector>

#include "esw/effort_curve.hpp"
#include "esw/estimator.hpp"

namespace esw {

struct Worker {
    std::string id;
    EffortCurve curve;
};

/// One selected worker with their assigned point, target effort, and payment
/// rule p = intercept - slope * (y - loo_prediction)^2.
struct ContractWorker {
    Worker worker;
    Vec point;
    double target_effort = 0.0;
    double slope = 0.0;     // d > 0
    double intercept = 0.0; // c
};

struct Contract {
    std::vector<ContractWorker> workers;
    EstimatorSpec estimator;
    TestPointDistribution test_distribution;
    std::vector<double> etas; // tradeoff weight per worker

    std::vector<Vec> points() const;
    /// sigma_i(target effort) for every worker.
    Vec target_sigmas() const;
};

/// Equality tolerance for "two efforts are the same equilibrium".
inline constexpr double kBestResponseTol = 1e-6;
/// Tolerance for "expected utility at the target profile is zero".
inline constexpr double kIrTightTol = 1e-9;

/// d = -1 / (2 sigma(e) sigma'(e)); positive because sigma is positive and
/// strictly decreasing. This slope makes e the unique maximizer of the
/// worker's expected utility.
double payment_slope(const EffortCurve& curve, double e_target);

/// Expected squared error at points[i] of the fit on everyone else's data
/// when the other workers' noise levels are sigmas[j] (entry i is ignored).
/// This is the opponent-controlled constant in worker i's utility.
double peer_risk(const EstimatorSpec& spec, const std::vector<Vec>& points, std::size_t i,
                 const Vec& sigmas);

/// Peer risk within a contract when opponents play `efforts` (length = number
/// of workers; entry i is ignored).
double peer_risk(const Contract& contract, std::size_t i, const std::vector<double>& efforts);

/// c = d * (sigma(e)^2 + peer risk at target efforts) + e, which makes the
/// expected utility at the target profile exactly zero.
double payment_intercept(const EstimatorSpec& spec, const std::vector<Vec>& points,
                         std::size_t i, const EffortCurve& curve, double e_target,
                         const Vec& target_sigmas, double slope);

/// Build the full payment contract for the given selection, assignment, and
/// target efforts. Throws unless the design stays well-defined with any
/// single worker removed and all efforts are interior to their intervals.
Contract synthesize_contract(const std::vector<Worker>& selected,
                             const std::vector<Vec>& points,
                             const std::vector<double>& target_efforts,
                             const EstimatorSpec& estimator,
                             const TestPointDistribution& F,
                             const std::vector<double>& etas);

/// Realized payments for one round of reports (ordered like contract.workers):
/// p_i = c_i - d_i * (y_i - loo_prediction_i)^2. Payments are unbounded below;
/// the rule has no limited-liability floor.
std::vector<double> realized_payments(const Contract& contract, const Vec& labels);

/// Expected utility of worker i when they exert e_i and opponents play
/// `efforts`: c_i - d_i (sigma_i(e_i)^2 + peer risk) - e_i.
double analytic_utility(const Contract& contract, std::size_t i, double e_i,
                        const std::vector<double>& efforts);

/// The effort maximizing analytic_utility over worker i's interval, found by
/// golden-section search (the utility is strictly concave). The result does
/// not depend on `efforts`; verify_contract checks that observably.
double best_response(const Contract& contract, std::size_t i,
                     const std::vector<double>& efforts);

struct WorkerVerdict {
    std::string id;
    double target_effort = 0.0;
    double expected_payment = 0.0; // analytic, at the target profile
    double utility_at_target = 0.0;
    double response_vs_min = 0.0;  // best response when opponents all play e_min
    double response_vs_target = 0.0;
    double response_vs_max = 0.0;
    bool dominant_strategy = false;
    bool ir_tight = false;
};

struct UtilityReport {
    std::vector<WorkerVerdict> workers;
    bool dominant_strategy = false;
    bool individually_rational = false;
    double best_response_tol = kBestResponseTol;
    double ir_tol = kIrTightTol;

    bool all_pass() const { return dominant_strategy && individually_rational; }
};

/// Analytic certification: every worker's best response against the all-min,
/// all-target, and all-max opponent profiles must agree within 1e-6 and equal
/// the target, and utility at the target profile must vanish within 1e-9.
/// Failures are verdicts in the report, not errors.
UtilityReport verify_contract(const Contract& contract);

} // namespace esw
