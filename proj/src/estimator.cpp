#include "esw/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "esw/errors.hpp"

namespace esw {

namespace {

constexpr double kConditionLimit = 1e10;

Mat design_matrix(const FeatureMap& features, const std::vector<Vec>& points) {
    if (points.empty()) throw InputError("design needs at least one point");
    const int m = features.output_dim();
    Mat design(static_cast<int>(points.size()), m);
    for (std::size_t i = 0; i < points.size(); ++i) {
        design.row(static_cast<int>(i)) = features(points[i]).transpose();
    }
    return design;
}

/// Inverse of gram + lambda I via symmetric eigendecomposition. At lambda == 0
/// the estimator is declared undefined when the smallest eigenvalue is
/// nonpositive or the relative condition number exceeds 1e10.
Mat regularized_inverse(const Mat& gram, double lambda, const std::string& what) {
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    const Vec eigs = es.eigenvalues(); // ascending
    const int m = static_cast<int>(gram.rows());
    if (lambda == 0.0) {
        const double lo = eigs(0);
        const double hi = eigs(m - 1);
        if (!(lo > 0.0) || hi / lo > kConditionLimit) {
            throw EstimatorUndefinedError(what + ": normal equations are singular "
                                          "(relative condition threshold 1e10)");
        }
    }
    Vec inv_eigs(m);
    for (int j = 0; j < m; ++j) inv_eigs(j) = 1.0 / (eigs(j) + lambda);
    return es.eigenvectors() * inv_eigs.asDiagonal() * es.eigenvectors().transpose();
}

void check_sigmas(const DesignBundle& bundle, const Vec& sigmas) {
    if (sigmas.size() != bundle.rows()) {
        throw InputError("sigma vector length " + std::to_string(sigmas.size()) +
                         " does not match design size " + std::to_string(bundle.rows()));
    }
    for (int i = 0; i < sigmas.size(); ++i) {
        if (!(sigmas(i) >= 0.0)) throw InputError("noise standard deviations must be >= 0");
    }
}

double variance_trace(const EstimatorSpec& spec, const DesignBundle& bundle,
                      const Vec& sigmas) {
    check_sigmas(bundle, sigmas);
    const Mat inv = regularized_inverse(bundle.gram, spec.lambda, "expected MSE");
    const Mat smoother = bundle.design * inv; // k x m
    const Mat folded = smoother.transpose() * sigmas.array().square().matrix().asDiagonal() *
                       smoother; // m x m
    return bundle.second_moment.cwiseProduct(folded).sum();
}

Vec variance_sensitivities(const EstimatorSpec& spec, const DesignBundle& bundle) {
    const Mat inv = regularized_inverse(bundle.gram, spec.lambda, "sensitivities");
    const Mat smoother = bundle.design * inv;          // k x m
    const Mat projected = smoother * bundle.second_moment; // k x m
    Vec h(bundle.rows());
    for (int i = 0; i < bundle.rows(); ++i) {
        h(i) = projected.row(i).dot(smoother.row(i));
    }
    return h;
}

} // namespace

EstimatorSpec::EstimatorSpec(FeatureMap f, double lam) : features(std::move(f)), lambda(lam) {
    if (!(lambda >= 0.0)) throw InputError("regularization lambda must be >= 0");
}

DesignBundle build_design(const EstimatorSpec& spec, const std::vector<Vec>& points,
                          const TestPointDistribution& F) {
    if (F.dim() != spec.features.input_dim()) {
        throw InputError("test distribution dimension does not match the feature map");
    }
    DesignBundle bundle;
    bundle.points = points;
    bundle.design = design_matrix(spec.features, points);
    bundle.gram = bundle.design.transpose() * bundle.design;
    const int m = spec.features.output_dim();
    bundle.second_moment = Mat::Zero(m, m);
    for (std::size_t j = 0; j < F.size(); ++j) {
        const Vec phi = spec.features(F.point(j));
        bundle.second_moment += F.weight(j) * phi * phi.transpose();
    }
    if (spec.lambda == 0.0) {
        regularized_inverse(bundle.gram, 0.0, "design"); // flags rank deficiency
    }
    return bundle;
}

double mse_g(const EstimatorSpec& spec, const DesignBundle& bundle,
                    const Vec& sigmas) {
    if (spec.lambda != 0.0) {
        throw InputError("mse_g requires lambda == 0; use ridge_variance_g instead");
    }
    return variance_trace(spec, bundle, sigmas);
}

Vec sensitivity_h(const EstimatorSpec& spec, const DesignBundle& bundle) {
    if (spec.lambda != 0.0) {
        throw InputError("sensitivity_h requires lambda == 0; "
                         "use ridge_sensitivity_h instead");
    }
    return variance_sensitivities(spec, bundle);
}

double ridge_variance_g(const EstimatorSpec& spec, const DesignBundle& bundle,
                      const Vec& sigmas) {
    if (!(spec.lambda > 0.0)) throw InputError("ridge_variance_g requires lambda > 0");
    return variance_trace(spec, bundle, sigmas);
}

Vec ridge_sensitivity_h(const EstimatorSpec& spec, const DesignBundle& bundle) {
    if (!(spec.lambda > 0.0)) {
        throw InputError("ridge_sensitivity_h requires lambda > 0");
    }
    return variance_sensitivities(spec, bundle);
}

double fit_predict(const EstimatorSpec& spec, const std::vector<Vec>& points,
                   const Vec& labels, const Vec& query) {
    if (labels.size() != static_cast<Eigen::Index>(points.size())) {
        throw InputError("label vector length does not match the point list");
    }
    const Mat design = design_matrix(spec.features, points);
    const Mat gram = design.transpose() * design;
    const Mat inv = regularized_inverse(gram, spec.lambda, "fit");
    const Vec coeffs = inv * (design.transpose() * labels);
    return spec.features(query).dot(coeffs);
}

Vec loo_weights(const EstimatorSpec& spec, const std::vector<Vec>& points, std::size_t i) {
    const std::size_t k = points.size();
    if (i >= k) throw InputError("leave-one-out index out of range");
    if (k < 2) {
        throw EstimatorUndefinedError(
            "estimator is not well-defined with example " + std::to_string(i) +
            " removed: no examples left");
    }
    std::vector<Vec> reduced;
    reduced.reserve(k - 1);
    for (std::size_t j = 0; j < k; ++j) {
        if (j != i) reduced.push_back(points[j]);
    }
    const Mat design = design_matrix(spec.features, reduced);
    const Mat gram = design.transpose() * design;
    Mat inv;
    try {
        inv = regularized_inverse(gram, spec.lambda, "leave-one-out fit");
    } catch (const EstimatorUndefinedError&) {
        throw EstimatorUndefinedError("estimator is not well-defined with example " +
                                      std::to_string(i) + " removed");
    }
    const Vec at_query = design * (inv * spec.features(points[i]));
    Vec weights = Vec::Zero(static_cast<Eigen::Index>(k));
    Eigen::Index r = 0;
    for (std::size_t j = 0; j < k; ++j) {
        if (j != i) weights(static_cast<Eigen::Index>(j)) = at_query(r++);
    }
    return weights;
}

double loo_predict(const EstimatorSpec& spec, const std::vector<Vec>& points,
                   const Vec& labels, std::size_t i) {
    if (labels.size() != static_cast<Eigen::Index>(points.size())) {
        throw InputError("label vector length does not match the point list");
    }
    return loo_weights(spec, points, i).dot(labels);
}

void require_loo_well_defined(const EstimatorSpec& spec, const std::vector<Vec>& points) {
    if (spec.lambda > 0.0) return;
    for (std::size_t i = 0; i < points.size(); ++i) {
        loo_weights(spec, points, i);
    }
}

MonteCarloResult monte_carlo_mse(const EstimatorSpec& spec, const std::vector<Vec>& points,
                                 const TestPointDistribution& F, const Vec& sigmas,
                                 const GroundTruth& truth, const NoiseModel& noise,
                                 std::int64_t n, std::uint64_t seed, ExecPolicy policy) {
    if (n < 1) throw InputError("monte_carlo_mse needs n >= 1");
    const DesignBundle bundle = build_design(spec, points, F);
    check_sigmas(bundle, sigmas);
    const Mat inv = regularized_inverse(bundle.gram, spec.lambda, "Monte Carlo fit");

    const std::size_t k = points.size();
    Vec truth_at_points(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        truth_at_points(static_cast<Eigen::Index>(i)) = truth.eval(spec.features, points[i]);
    }
    // Prediction at support point s is a fixed linear functional of the labels.
    Mat predict_weights(static_cast<Eigen::Index>(F.size()), static_cast<Eigen::Index>(k));
    Vec truth_at_support(static_cast<Eigen::Index>(F.size()));
    for (std::size_t s = 0; s < F.size(); ++s) {
        predict_weights.row(static_cast<Eigen::Index>(s)) =
            (bundle.design * (inv * spec.features(F.point(s)))).transpose();
        truth_at_support(static_cast<Eigen::Index>(s)) = truth.eval(spec.features, F.point(s));
    }

    std::vector<double> sq_errors(static_cast<std::size_t>(n));
    const rng::Stream base(seed);
    auto replicate = [&](std::int64_t r) {
        rng::Stream stream = base.child(static_cast<std::uint64_t>(r));
        rng::Stream pick = stream.child(0);
        const std::size_t s = F.sample_index(pick);
        Vec labels(static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i) {
            rng::Stream noise_stream = stream.child(i + 1);
            labels(static_cast<Eigen::Index>(i)) =
                truth_at_points(static_cast<Eigen::Index>(i)) +
                noise.sample(noise_stream, sigmas(static_cast<Eigen::Index>(i)));
        }
        const double err = predict_weights.row(static_cast<Eigen::Index>(s)).dot(labels) -
                           truth_at_support(static_cast<Eigen::Index>(s));
        sq_errors[static_cast<std::size_t>(r)] = err * err;
    };
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t r = 0; r < n; ++r) replicate(r);
    } else {
        for (std::int64_t r = 0; r < n; ++r) replicate(r);
    }

    const rng::MeanSE stats = rng::mean_se(sq_errors);
    return {stats.mean, stats.std_error};
}

} // namespace esw
