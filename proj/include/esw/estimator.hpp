#pragma once

#include <cstdint>
#include <vector>

#include "esw/distribution.hpp"
#include "esw/exec.hpp"
#include "esw/feature_map.hpp"
#include "esw/noise.hpp"

namespace esw {

/// Linear-in-features estimator: ordinary least squares at lambda == 0,
/// ridge at lambda > 0.
struct EstimatorSpec {
    FeatureMap features;
    double lambda = 0.0;

    explicit EstimatorSpec(FeatureMap f, double lam = 0.0);
};

/// Design matrix plus the two Gram-type matrices every closed-form
/// quantity is built from.
struct DesignBundle {
    std::vector<Vec> points;
    Mat design;        // k x m, row i = phi(x_i)
    Mat gram;          // m x m, design' * design
    Mat second_moment; // m x m, E_{x* ~ F}[phi(x*) phi(x*)']

    int rows() const { return static_cast<int>(design.rows()); }
    int cols() const { return static_cast<int>(design.cols()); }
};

DesignBundle build_design(const EstimatorSpec& spec, const std::vector<Vec>& points,
                          const TestPointDistribution& F);

/// Closed-form expected MSE at test points drawn from F when label noise has
/// standard deviations `sigmas`: trace(A M A' diag(sigma^2)) with
/// A = design (gram)^-1. Requires lambda == 0.
double mse_g(const EstimatorSpec& spec, const DesignBundle& bundle, const Vec& sigmas);

/// Per-point coefficients h with mse_g == sum_i h_i sigma_i^2 for every sigma.
/// h_i = row_i(A) M row_i(A)'. Requires lambda == 0.
Vec sensitivity_h(const EstimatorSpec& spec, const DesignBundle& bundle);

/// Variance term of the ridge fit (lambda > 0); the bias term is constant in
/// sigma and in the point assignment, so it is deliberately not computed.
double ridge_variance_g(const EstimatorSpec& spec, const DesignBundle& bundle,
                        const Vec& sigmas);

/// Per-point coefficients of the ridge variance term, used when assigning
/// workers to fixed points under regularization.
Vec ridge_sensitivity_h(const EstimatorSpec& spec, const DesignBundle& bundle);

/// Least-squares (or ridge) fit on (points, labels), evaluated at query.
double fit_predict(const EstimatorSpec& spec, const std::vector<Vec>& points,
                   const Vec& labels, const Vec& query);

/// Weights w with loo_predict(i) == w . labels and w[i] == 0; the
/// leave-one-out prediction is a fixed linear functional of the labels.
Vec loo_weights(const EstimatorSpec& spec, const std::vector<Vec>& points, std::size_t i);

/// Fit on all examples except i, evaluated at point i.
double loo_predict(const EstimatorSpec& spec, const std::vector<Vec>& points,
                   const Vec& labels, std::size_t i);

/// Throws unless the estimator stays well-defined after removing any single
/// example (every leave-one-out system passes the condition check).
void require_loo_well_defined(const EstimatorSpec& spec, const std::vector<Vec>& points);

struct MonteCarloResult {
    double estimate;
    double std_error;
};

/// Sample-mean estimate of E[(fit(x*) - f(x*))^2] over n replications with
/// x* ~ F and y_i = f(x_i) + noise. Deterministic given the seed, independent
/// of the execution policy.
MonteCarloResult monte_carlo_mse(const EstimatorSpec& spec, const std::vector<Vec>& points,
                                 const TestPointDistribution& F, const Vec& sigmas,
                                 const GroundTruth& truth, const NoiseModel& noise,
                                 std::int64_t n, std::uint64_t seed,
                                 ExecPolicy policy = ExecPolicy::Parallel);

} // namespace esw
