#include "esw/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "esw/errors.hpp"

namespace esw {

namespace {

/// Everything an episode needs, precomputed once: leave-one-out and
/// prediction weights are fixed linear functionals of the labels, and the
/// ground truth only ever enters through its values at the design and
/// support points.
struct Kernel {
    std::size_t k = 0;
    TestPointDistribution F;
    Mat loo_w;     // k x k, row i: weights of the fit without i, evaluated at x_i
    Mat predict_w; // S x k, row s: weights of the full fit, evaluated at x*_s
    Vec truth_points;
    Vec truth_support;
    Vec intercepts;
    Vec slopes;
    Vec etas;
    std::vector<EffortCurve> curves;

    Kernel(const Contract& contract, const SimulationContext& context)
        : F(contract.test_distribution) {
        k = contract.workers.size();
        const std::vector<Vec> pts = contract.points();
        const EstimatorSpec& spec = contract.estimator;

        loo_w.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        for (std::size_t i = 0; i < k; ++i) {
            loo_w.row(static_cast<Eigen::Index>(i)) = loo_weights(spec, pts, i).transpose();
        }

        const DesignBundle bundle = build_design(spec, pts, F);
        Eigen::SelfAdjointEigenSolver<Mat> es(bundle.gram);
        // Contract designs passed the condition check at synthesis.
        Mat inv = es.eigenvectors() *
                  (es.eigenvalues().array() + spec.lambda).inverse().matrix().asDiagonal() *
                  es.eigenvectors().transpose();
        predict_w.resize(static_cast<Eigen::Index>(F.size()), static_cast<Eigen::Index>(k));
        truth_support.resize(static_cast<Eigen::Index>(F.size()));
        for (std::size_t s = 0; s < F.size(); ++s) {
            predict_w.row(static_cast<Eigen::Index>(s)) =
                (bundle.design * (inv * spec.features(F.point(s)))).transpose();
            truth_support(static_cast<Eigen::Index>(s)) =
                context.truth.eval(spec.features, F.point(s));
        }
        truth_points.resize(static_cast<Eigen::Index>(k));
        intercepts.resize(static_cast<Eigen::Index>(k));
        slopes.resize(static_cast<Eigen::Index>(k));
        etas.resize(static_cast<Eigen::Index>(k));
        curves.reserve(k);
        for (std::size_t i = 0; i < k; ++i) {
            const auto& cw = contract.workers[i];
            truth_points(static_cast<Eigen::Index>(i)) =
                context.truth.eval(spec.features, cw.point);
            intercepts(static_cast<Eigen::Index>(i)) = cw.intercept;
            slopes(static_cast<Eigen::Index>(i)) = cw.slope;
            etas(static_cast<Eigen::Index>(i)) = contract.etas[i];
            curves.push_back(cw.worker.curve);
        }
    }
};

struct ResolvedPolicy {
    EffortPolicy::Kind kind = EffortPolicy::Kind::Target;
    double value = 0.0; // all kinds except UniformRandom
};

/// Per-episode stream labels: 0 draws x*, 1..k draw worker noise, k+1..2k
/// draw randomized efforts. Fixed labels keep parallel runs bit-identical.
std::size_t episode_support(const TestPointDistribution& F, const rng::Stream& episode) {
    rng::Stream pick = episode.child(0);
    return F.sample_index(pick);
}

double episode_effort(const ResolvedPolicy& policy, const EffortCurve& curve,
                      const rng::Stream& episode, std::size_t worker, std::size_t k) {
    if (policy.kind == EffortPolicy::Kind::UniformRandom) {
        rng::Stream draw = episode.child(1 + k + worker);
        return draw.uniform(curve.e_min(), curve.e_max());
    }
    return policy.value;
}

std::vector<ResolvedPolicy> resolve_profile(const Contract& contract,
                                            const SimulationContext& context,
                                            const StrategyProfile& profile,
                                            std::uint64_t seed, ExecPolicy policy);

/// One round given resolved efforts. Fills the outcome in place so hot loops
/// can reuse buffers.
void play_episode(const Kernel& kernel, const SimulationContext& context,
                  const std::vector<ResolvedPolicy>& resolved, rng::Stream episode,
                  EpisodeOutcome& out) {
    const std::size_t k = kernel.k;
    out.efforts.resize(k);
    out.reports.resize(k);
    out.payments.resize(k);
    out.utilities.resize(k);

    out.support_index = episode_support(kernel.F, episode);
    Vec labels(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
        out.efforts[j] = episode_effort(resolved[j], kernel.curves[j], episode, j, k);
        rng::Stream noise_stream = episode.child(1 + j);
        const double sigma =
            context.noise_scale * kernel.curves[j].sigma(out.efforts[j]);
        labels(static_cast<Eigen::Index>(j)) =
            kernel.truth_points(static_cast<Eigen::Index>(j)) +
            sigma * context.noise.standard_sample(noise_stream);
        out.reports[j] = labels(static_cast<Eigen::Index>(j));
    }
    double payment_term = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double predicted =
            kernel.loo_w.row(static_cast<Eigen::Index>(i)).dot(labels);
        const double residual = labels(static_cast<Eigen::Index>(i)) - predicted;
        out.payments[i] = kernel.intercepts(static_cast<Eigen::Index>(i)) -
                          kernel.slopes(static_cast<Eigen::Index>(i)) * residual * residual;
        out.utilities[i] = out.payments[i] - out.efforts[i];
        payment_term += kernel.etas(static_cast<Eigen::Index>(i)) * out.payments[i];
    }
    const double err =
        kernel.predict_w.row(static_cast<Eigen::Index>(out.support_index)).dot(labels) -
        kernel.truth_support(static_cast<Eigen::Index>(out.support_index));
    out.squared_error = err * err;
    out.objective = out.squared_error + payment_term;
}

} // namespace

StrategyProfile StrategyProfile::uniform(EffortPolicy policy, std::size_t workers) {
    StrategyProfile profile;
    profile.policies.assign(workers, policy);
    return profile;
}

double sample_report(const FeatureMap& features, const GroundTruth& truth,
                     const NoiseModel& noise, const EffortCurve& curve, const Vec& x,
                     double e, rng::Stream& stream) {
    if (!curve.contains(e)) {
        throw DomainError("effort " + std::to_string(e) + " outside the curve interval");
    }
    return truth.eval(features, x) + noise.sample(stream, curve.sigma(e));
}

EpisodeOutcome run_episode(const Contract& contract, const SimulationContext& context,
                           const StrategyProfile& profile, std::uint64_t seed) {
    const Kernel kernel(contract, context);
    const auto resolved =
        resolve_profile(contract, context, profile, seed, ExecPolicy::Serial);
    EpisodeOutcome out;
    out.seed = seed;
    play_episode(kernel, context, resolved, rng::Stream(seed), out);
    return out;
}

ObjectiveEstimate estimate_objective(const Contract& contract,
                                     const SimulationContext& context,
                                     const StrategyProfile& profile, std::int64_t n,
                                     std::uint64_t seed, ExecPolicy policy) {
    if (n < 2) throw InputError("estimate_objective needs n >= 2");
    const Kernel kernel(contract, context);
    const auto resolved = resolve_profile(contract, context, profile, seed, policy);
    const std::size_t k = kernel.k;
    const auto nn = static_cast<std::size_t>(n);

    std::vector<double> mse(nn), pay(nn), obj(nn);
    std::vector<std::vector<double>> worker_pay(k, std::vector<double>(nn));
    std::vector<std::vector<double>> worker_util(k, std::vector<double>(nn));

    const rng::Stream base(seed);
    const auto run = [&](std::size_t r) {
        EpisodeOutcome out;
        play_episode(kernel, context, resolved, base.child(r), out);
        mse[r] = out.squared_error;
        double payment_term = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            worker_pay[i][r] = out.payments[i];
            worker_util[i][r] = out.utilities[i];
            payment_term += kernel.etas(static_cast<Eigen::Index>(i)) * out.payments[i];
        }
        pay[r] = payment_term;
        obj[r] = out.objective;
    };
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t r = 0; r < nn; ++r) run(r);
    } else {
        for (std::size_t r = 0; r < nn; ++r) run(r);
    }

    const auto stat = [](const std::vector<double>& values) {
        const rng::MeanSE s = rng::mean_se(values);
        return SummaryStat{s.mean, s.std_error};
    };
    ObjectiveEstimate estimate;
    estimate.episodes = n;
    estimate.mse_term = stat(mse);
    estimate.payment_term = stat(pay);
    estimate.objective = stat(obj);
    estimate.worker_payment.reserve(k);
    estimate.worker_utility.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        estimate.worker_payment.push_back(stat(worker_pay[i]));
        estimate.worker_utility.push_back(stat(worker_util[i]));
    }
    return estimate;
}

BestResponseCurve empirical_best_response(const Contract& contract,
                                          const SimulationContext& context, std::size_t i,
                                          const StrategyProfile& profile,
                                          const std::vector<double>& grid,
                                          std::int64_t n_per_point, std::uint64_t seed,
                                          ExecPolicy policy) {
    const std::size_t k = contract.workers.size();
    if (i >= k) throw InputError("worker index out of range");
    if (grid.size() < 2) throw InputError("effort grid needs at least two points");
    if (n_per_point < 2) throw InputError("empirical_best_response needs n >= 2");
    const EffortCurve& curve = contract.workers[i].worker.curve;
    for (double e : grid) {
        if (!curve.contains(e)) {
            throw DomainError("grid effort " + std::to_string(e) +
                              " outside worker's interval");
        }
    }
    const Kernel kernel(contract, context);
    const auto resolved = resolve_profile(contract, context, profile, seed, policy);
    const std::size_t T = grid.size();
    const auto nn = static_cast<std::size_t>(n_per_point);

    // utilities[t] holds worker i's utility per episode at grid effort t.
    // One set of draws per episode is shared by every grid point (common
    // random numbers), so curve differences are not drowned in noise.
    std::vector<std::vector<double>> utilities(T, std::vector<double>(nn));
    const rng::Stream base(seed);
    const auto run = [&](std::size_t r) {
        rng::Stream episode = base.child(r);
        Vec z(static_cast<Eigen::Index>(k));
        for (std::size_t j = 0; j < k; ++j) {
            rng::Stream noise_stream = episode.child(1 + j);
            z(static_cast<Eigen::Index>(j)) = context.noise.standard_sample(noise_stream);
        }
        Vec labels(static_cast<Eigen::Index>(k));
        std::vector<double> efforts(k);
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            efforts[j] = episode_effort(resolved[j], kernel.curves[j], episode, j, k);
            labels(static_cast<Eigen::Index>(j)) =
                kernel.truth_points(static_cast<Eigen::Index>(j)) +
                context.noise_scale * kernel.curves[j].sigma(efforts[j]) *
                    z(static_cast<Eigen::Index>(j));
        }
        for (std::size_t t = 0; t < T; ++t) {
            const double sigma_i = context.noise_scale * curve.sigma(grid[t]);
            labels(static_cast<Eigen::Index>(i)) =
                kernel.truth_points(static_cast<Eigen::Index>(i)) +
                sigma_i * z(static_cast<Eigen::Index>(i));
            const double predicted =
                kernel.loo_w.row(static_cast<Eigen::Index>(i)).dot(labels);
            const double residual = labels(static_cast<Eigen::Index>(i)) - predicted;
            const double payment = kernel.intercepts(static_cast<Eigen::Index>(i)) -
                                   kernel.slopes(static_cast<Eigen::Index>(i)) * residual *
                                       residual;
            utilities[t][r] = payment - grid[t];
        }
    };
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::size_t r = 0; r < nn; ++r) run(r);
    } else {
        for (std::size_t r = 0; r < nn; ++r) run(r);
    }

    BestResponseCurve curve_out;
    curve_out.grid = grid;
    curve_out.mean_utility.resize(T);
    curve_out.std_error.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        const rng::MeanSE s = rng::mean_se(utilities[t]);
        curve_out.mean_utility[t] = s.mean;
        curve_out.std_error[t] = s.std_error;
    }
    std::size_t best = 0;
    for (std::size_t t = 1; t < T; ++t) {
        if (curve_out.mean_utility[t] > curve_out.mean_utility[best]) best = t;
    }
    curve_out.argmax = best;
    std::size_t second = best == 0 ? 1 : 0;
    for (std::size_t t = 0; t < T; ++t) {
        if (t == best) continue;
        if (curve_out.mean_utility[t] > curve_out.mean_utility[second]) second = t;
    }
    const auto joint_se = [&](std::size_t a, std::size_t b) {
        return std::sqrt(curve_out.std_error[a] * curve_out.std_error[a] +
                         curve_out.std_error[b] * curve_out.std_error[b]);
    };
    curve_out.ambiguous_top_two =
        curve_out.mean_utility[best] - curve_out.mean_utility[second] <
        2.0 * joint_se(best, second);
    curve_out.isolated = true;
    for (std::size_t t = 0; t < T; ++t) {
        if (t + 1 >= best && t <= best + 1) continue; // argmax and its neighbors
        if (curve_out.mean_utility[best] - curve_out.mean_utility[t] <
            2.0 * joint_se(best, t)) {
            curve_out.isolated = false;
            break;
        }
    }
    return curve_out;
}

std::optional<std::vector<double>> resolved_efforts(const Contract& contract,
                                                    const SimulationContext& context,
                                                    const StrategyProfile& profile,
                                                    std::uint64_t seed) {
    const auto resolved =
        resolve_profile(contract, context, profile, seed, ExecPolicy::Serial);
    std::vector<double> efforts;
    efforts.reserve(resolved.size());
    for (const auto& r : resolved) {
        if (r.kind == EffortPolicy::Kind::UniformRandom) return std::nullopt;
        efforts.push_back(r.value);
    }
    return efforts;
}

std::vector<double> effort_grid(const Contract& contract, std::size_t i,
                                std::size_t points) {
    if (i >= contract.workers.size()) throw InputError("worker index out of range");
    if (points < 2) throw InputError("effort grid needs at least two points");
    const EffortCurve& curve = contract.workers[i].worker.curve;
    std::vector<double> grid(points);
    const double step = (curve.e_max() - curve.e_min()) / static_cast<double>(points - 1);
    for (std::size_t t = 0; t < points; ++t) {
        grid[t] = curve.e_min() + static_cast<double>(t) * step;
    }
    grid.back() = curve.e_max();
    return grid;
}

namespace {

std::vector<ResolvedPolicy> resolve_profile(const Contract& contract,
                                            const SimulationContext& context,
                                            const StrategyProfile& profile,
                                            std::uint64_t seed, ExecPolicy policy) {
    const std::size_t k = contract.workers.size();
    if (profile.policies.size() != k) {
        throw InputError("strategy profile must name one policy per contract worker");
    }
    std::vector<ResolvedPolicy> resolved(k);
    for (std::size_t j = 0; j < k; ++j) {
        const EffortCurve& curve = contract.workers[j].worker.curve;
        const EffortPolicy& p = profile.policies[j];
        switch (p.kind) {
        case EffortPolicy::Kind::Target:
            resolved[j] = {p.kind, contract.workers[j].target_effort};
            break;
        case EffortPolicy::Kind::Min:
            resolved[j] = {p.kind, curve.e_min()};
            break;
        case EffortPolicy::Kind::Max:
            resolved[j] = {p.kind, curve.e_max()};
            break;
        case EffortPolicy::Kind::Fixed:
            if (!curve.contains(p.fixed)) {
                throw DomainError("fixed effort " + std::to_string(p.fixed) +
                                  " outside worker's interval");
            }
            resolved[j] = {p.kind, p.fixed};
            break;
        case EffortPolicy::Kind::UniformRandom:
            resolved[j] = {p.kind, 0.0};
            break;
        case EffortPolicy::Kind::BestResponseEmpirical: {
            // Play the effort this worker would discover by scanning their
            // own utility curve while everyone else sits at the target.
            const auto grid = effort_grid(contract, j, 41);
            const auto opponents =
                StrategyProfile::uniform(EffortPolicy::target(), k);
            const BestResponseCurve curve_est = empirical_best_response(
                contract, context, j, opponents, grid, 2000,
                rng::mix64(seed ^ (0xb5297a4d ^ j)), policy);
            resolved[j] = {p.kind, curve_est.grid[curve_est.argmax]};
            break;
        }
        }
    }
    return resolved;
}

} // namespace

} // namespace esw
