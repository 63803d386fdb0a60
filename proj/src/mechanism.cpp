#include "esw/mechanism.hpp"

#include <cmath>
#include <set>
#include <string>

#include "esw/errors.hpp"

namespace esw {

namespace {

std::vector<double> efforts_of(const Contract& contract,
                               double (*pick)(const ContractWorker&)) {
    std::vector<double> efforts;
    efforts.reserve(contract.workers.size());
    for (const auto& cw : contract.workers) efforts.push_back(pick(cw));
    return efforts;
}

Vec sigmas_at(const Contract& contract, const std::vector<double>& efforts) {
    Vec sigmas(static_cast<Eigen::Index>(contract.workers.size()));
    for (std::size_t j = 0; j < contract.workers.size(); ++j) {
        sigmas(static_cast<Eigen::Index>(j)) =
            contract.workers[j].worker.curve.sigma(efforts[j]);
    }
    return sigmas;
}

} // namespace

std::vector<Vec> Contract::points() const {
    std::vector<Vec> pts;
    pts.reserve(workers.size());
    for (const auto& cw : workers) pts.push_back(cw.point);
    return pts;
}

Vec Contract::target_sigmas() const {
    Vec sigmas(static_cast<Eigen::Index>(workers.size()));
    for (std::size_t j = 0; j < workers.size(); ++j) {
        sigmas(static_cast<Eigen::Index>(j)) = workers[j].worker.curve.sigma(
            workers[j].target_effort);
    }
    return sigmas;
}

double payment_slope(const EffortCurve& curve, double e_target) {
    const auto [value, slope] = curve.sigma_and_slope(e_target);
    return -1.0 / (2.0 * value * slope);
}

double peer_risk(const EstimatorSpec& spec, const std::vector<Vec>& points, std::size_t i,
                 const Vec& sigmas) {
    if (i >= points.size()) throw InputError("peer_risk index out of range");
    if (sigmas.size() != static_cast<Eigen::Index>(points.size())) {
        throw InputError("peer_risk sigma vector length does not match the point list");
    }
    std::vector<Vec> reduced;
    Vec reduced_sigmas(static_cast<Eigen::Index>(points.size() - 1));
    reduced.reserve(points.size() - 1);
    Eigen::Index r = 0;
    for (std::size_t j = 0; j < points.size(); ++j) {
        if (j == i) continue;
        reduced.push_back(points[j]);
        reduced_sigmas(r++) = sigmas(static_cast<Eigen::Index>(j));
    }
    const auto at_point = TestPointDistribution::point_mass(points[i]);
    const DesignBundle bundle = build_design(spec, reduced, at_point);
    return mse_g(spec, bundle, reduced_sigmas);
}

double peer_risk(const Contract& contract, std::size_t i, const std::vector<double>& efforts) {
    if (efforts.size() != contract.workers.size()) {
        throw InputError("effort profile length does not match the contract");
    }
    return peer_risk(contract.estimator, contract.points(), i, sigmas_at(contract, efforts));
}

double payment_intercept(const EstimatorSpec& spec, const std::vector<Vec>& points,
                         std::size_t i, const EffortCurve& curve, double e_target,
                         const Vec& target_sigmas, double slope) {
    const double sigma = curve.sigma(e_target);
    const double risk = peer_risk(spec, points, i, target_sigmas);
    return slope * (sigma * sigma + risk) + e_target;
}

Contract synthesize_contract(const std::vector<Worker>& selected,
                             const std::vector<Vec>& points,
                             const std::vector<double>& target_efforts,
                             const EstimatorSpec& estimator,
                             const TestPointDistribution& F,
                             const std::vector<double>& etas) {
    const std::size_t k = selected.size();
    if (k == 0) throw InputError("contract needs at least one selected worker");
    if (points.size() != k || target_efforts.size() != k || etas.size() != k) {
        throw InputError("selected workers, points, efforts, and etas must align");
    }
    if (estimator.lambda != 0.0) {
        throw InputError("contract synthesis requires an ordinary least-squares estimator");
    }
    std::set<std::string> ids;
    for (const auto& w : selected) {
        if (!ids.insert(w.id).second) {
            throw InputError("duplicate worker id '" + w.id + "'");
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (!selected[i].curve.contains(target_efforts[i])) {
            throw DomainError("target effort for worker '" + selected[i].id +
                              "' outside their interval");
        }
        if (etas[i] <= 0.0) throw InputError("tradeoff weights must be positive");
    }
    build_design(estimator, points, F); // flags a singular full design early
    require_loo_well_defined(estimator, points);

    Contract contract{.workers = {},
                      .estimator = estimator,
                      .test_distribution = F,
                      .etas = etas};
    contract.workers.reserve(k);
    Vec target_sigmas(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        target_sigmas(static_cast<Eigen::Index>(i)) =
            selected[i].curve.sigma(target_efforts[i]);
    }
    for (std::size_t i = 0; i < k; ++i) {
        ContractWorker cw{.worker = selected[i],
                          .point = points[i],
                          .target_effort = target_efforts[i],
                          .slope = payment_slope(selected[i].curve, target_efforts[i]),
                          .intercept = 0.0};
        cw.intercept = payment_intercept(estimator, points, i, selected[i].curve,
                                         target_efforts[i], target_sigmas, cw.slope);
        contract.workers.push_back(std::move(cw));
    }
    return contract;
}

std::vector<double> realized_payments(const Contract& contract, const Vec& labels) {
    const std::size_t k = contract.workers.size();
    if (labels.size() != static_cast<Eigen::Index>(k)) {
        throw InputError("label vector length does not match the contract");
    }
    const std::vector<Vec> pts = contract.points();
    std::vector<double> payments(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double predicted = loo_predict(contract.estimator, pts, labels, i);
        const double residual = labels(static_cast<Eigen::Index>(i)) - predicted;
        payments[i] = contract.workers[i].intercept -
                      contract.workers[i].slope * residual * residual;
    }
    return payments;
}

double analytic_utility(const Contract& contract, std::size_t i, double e_i,
                        const std::vector<double>& efforts) {
    if (i >= contract.workers.size()) throw InputError("worker index out of range");
    const ContractWorker& cw = contract.workers[i];
    const double sigma = cw.worker.curve.sigma(e_i);
    const double risk = peer_risk(contract, i, efforts);
    return cw.intercept - cw.slope * (sigma * sigma + risk) - e_i;
}

double best_response(const Contract& contract, std::size_t i,
                     const std::vector<double>& efforts) {
    if (i >= contract.workers.size()) throw InputError("worker index out of range");
    const ContractWorker& cw = contract.workers[i];
    // Opponent terms are constant in e; evaluate them once.
    const double risk = peer_risk(contract, i, efforts);
    const auto utility = [&](double e) {
        const double sigma = cw.worker.curve.sigma(e);
        return cw.intercept - cw.slope * (sigma * sigma + risk) - e;
    };
    // Golden-section search; the utility is strictly concave because sigma^2
    // is strictly convex for every valid curve.
    constexpr double kInvPhi = 0.6180339887498949;
    double lo = cw.worker.curve.e_min();
    double hi = cw.worker.curve.e_max();
    double a = hi - kInvPhi * (hi - lo);
    double b = lo + kInvPhi * (hi - lo);
    double fa = utility(a);
    double fb = utility(b);
    const double tol = 1e-11 * (1.0 + hi - lo);
    while (hi - lo > tol) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + kInvPhi * (hi - lo);
            fb = utility(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - kInvPhi * (hi - lo);
            fa = utility(a);
        }
    }
    return 0.5 * (lo + hi);
}

UtilityReport verify_contract(const Contract& contract) {
    const std::size_t k = contract.workers.size();
    const auto target = efforts_of(contract, [](const ContractWorker& cw) {
        return cw.target_effort;
    });
    const auto all_min = efforts_of(contract, [](const ContractWorker& cw) {
        return cw.worker.curve.e_min();
    });
    const auto all_max = efforts_of(contract, [](const ContractWorker& cw) {
        return cw.worker.curve.e_max();
    });

    UtilityReport report;
    report.workers.reserve(k);
    bool all_dse = true;
    bool all_ir = true;
    for (std::size_t i = 0; i < k; ++i) {
        const ContractWorker& cw = contract.workers[i];
        WorkerVerdict v;
        v.id = cw.worker.id;
        v.target_effort = cw.target_effort;
        v.utility_at_target = analytic_utility(contract, i, cw.target_effort, target);
        v.expected_payment = v.utility_at_target + cw.target_effort;
        v.response_vs_min = best_response(contract, i, all_min);
        v.response_vs_target = best_response(contract, i, target);
        v.response_vs_max = best_response(contract, i, all_max);
        const double spread =
            std::max({v.response_vs_min, v.response_vs_target, v.response_vs_max}) -
            std::min({v.response_vs_min, v.response_vs_target, v.response_vs_max});
        const double off_target =
            std::max({std::fabs(v.response_vs_min - cw.target_effort),
                      std::fabs(v.response_vs_target - cw.target_effort),
                      std::fabs(v.response_vs_max - cw.target_effort)});
        v.dominant_strategy = spread <= kBestResponseTol && off_target <= kBestResponseTol;
        v.ir_tight = std::fabs(v.utility_at_target) <=
                     kIrTightTol * std::max(1.0, std::fabs(cw.intercept));
        all_dse = all_dse && v.dominant_strategy;
        all_ir = all_ir && v.ir_tight;
        report.workers.push_back(std::move(v));
    }
    report.dominant_strategy = all_dse;
    report.individually_rational = all_ir;
    return report;
}

} // namespace esw
