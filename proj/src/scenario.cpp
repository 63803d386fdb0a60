#include "esw/scenario.hpp"

#include <fstream>

#include "esw/errors.hpp"

namespace esw {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InputError("scenario: " + path + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing");
    return *it;
}

double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double number_field(const json& j, const char* key, const std::string& path) {
    return number_at(require(j, key, path), path + "." + key);
}

double number_or(const json& j, const char* key, double fallback, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return number_at(j.at(key), path + "." + key);
}

std::string string_field(const json& j, const char* key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

Vec vec_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of numbers");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t t = 0; t < j.size(); ++t) {
        v(static_cast<Eigen::Index>(t)) =
            number_at(j[t], path + "[" + std::to_string(t) + "]");
    }
    return v;
}

std::vector<Vec> points_at(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of points");
    std::vector<Vec> pts;
    pts.reserve(j.size());
    for (std::size_t t = 0; t < j.size(); ++t) {
        pts.push_back(vec_at(j[t], path + "[" + std::to_string(t) + "]"));
    }
    return pts;
}

EstimatorSpec parse_estimator(const json& j) {
    const std::string path = "estimator";
    const std::string kind = string_field(j, "kind", path);
    const double lambda = number_or(j, "lambda", 0.0, path);
    if (kind == "polynomial") {
        const int degree = static_cast<int>(number_field(j, "degree", path));
        const int dim = static_cast<int>(number_or(j, "input_dim", 1.0, path));
        return EstimatorSpec(FeatureMap::polynomial(degree, dim), lambda);
    }
    if (kind == "explicit-basis") {
        const int dim = static_cast<int>(number_field(j, "input_dim", path));
        return EstimatorSpec(FeatureMap::explicit_basis(dim), lambda);
    }
    if (kind == "kernel") {
        const auto centers = points_at(require(j, "centers", path), path + ".centers");
        const double bandwidth = number_field(j, "bandwidth", path);
        return EstimatorSpec(FeatureMap::kernel(centers, bandwidth), lambda);
    }
    fail(path + ".kind", "unknown estimator kind '" + kind +
                             "' (expected polynomial, explicit-basis, or kernel)");
}

EffortCurve parse_curve(const json& j, const std::string& path) {
    const std::string family = string_field(j, "family", path);
    const double e_min = number_or(j, "e_min", 0.0, path);
    const double e_max = number_field(j, "e_max", path);
    const double scale = number_field(j, "scale", path);
    try {
        if (family == "power-decay") {
            return EffortCurve::power_decay(scale, number_field(j, "exponent", path),
                                            e_min, e_max);
        }
        if (family == "exponential-decay") {
            return EffortCurve::exponential_decay(scale, number_field(j, "rate", path),
                                                  e_min, e_max);
        }
    } catch (const InputError& e) {
        fail(path, e.what());
    }
    fail(path + ".family", "unknown curve family '" + family +
                               "' (expected power-decay or exponential-decay)");
}

std::vector<Worker> parse_workers(const json& j) {
    if (!j.is_array() || j.empty()) fail("workers", "expected a nonempty array");
    std::vector<Worker> workers;
    workers.reserve(j.size());
    for (std::size_t t = 0; t < j.size(); ++t) {
        const std::string path = "workers[" + std::to_string(t) + "]";
        const json& w = j[t];
        Worker worker{string_field(w, "id", path),
                      parse_curve(require(w, "curve", path), path + ".curve")};
        for (const auto& seen : workers) {
            if (seen.id == worker.id) fail(path + ".id", "duplicate worker id '" + worker.id + "'");
        }
        workers.push_back(std::move(worker));
    }
    return workers;
}

TestPointDistribution parse_distribution(const json& j) {
    const std::string path = "distribution";
    const auto support = points_at(require(j, "support", path), path + ".support");
    std::vector<double> weights;
    if (j.contains("weights")) {
        const json& w = j.at("weights");
        if (!w.is_array() || w.size() != support.size()) {
            fail(path + ".weights", "expected one weight per support point");
        }
        weights.reserve(w.size());
        for (std::size_t t = 0; t < w.size(); ++t) {
            weights.push_back(number_at(w[t], path + ".weights[" + std::to_string(t) + "]"));
        }
    } else {
        weights.assign(support.size(), 1.0 / static_cast<double>(support.size()));
    }
    try {
        return TestPointDistribution(support, weights);
    } catch (const InputError& e) {
        fail(path, e.what());
    }
}

ObjectiveSpec parse_objective(const json& j, std::size_t n_workers) {
    const std::string path = "objective";
    ObjectiveSpec spec;
    if (j.contains("budget")) {
        spec.mode = ObjectiveSpec::Mode::Budget;
        spec.budget = number_at(j.at("budget"), path + ".budget");
        spec.eta = number_or(j, "eta", 1.0, path);
        return spec;
    }
    if (j.contains("etas")) {
        const json& etas = j.at("etas");
        if (!etas.is_array() || etas.size() != n_workers) {
            fail(path + ".etas", "expected one eta per worker");
        }
        for (std::size_t t = 0; t < etas.size(); ++t) {
            spec.per_worker_etas.push_back(
                number_at(etas[t], path + ".etas[" + std::to_string(t) + "]"));
        }
        return spec;
    }
    if (j.contains("eta")) {
        spec.eta = number_at(j.at("eta"), path + ".eta");
        return spec;
    }
    fail(path, "expected eta, etas, or budget");
}

} // namespace

Scenario parse_scenario(const json& j) {
    if (!j.is_object()) fail("$", "expected a JSON object");

    EstimatorSpec estimator = parse_estimator(require(j, "estimator", "$"));
    std::vector<Worker> workers = parse_workers(require(j, "workers", "$"));

    const json& points = require(j, "points", "$");
    std::vector<Vec> fixed;
    std::vector<Vec> candidates;
    int max_selected = 0;
    if (points.contains("fixed") == points.contains("candidates")) {
        fail("points", "expected exactly one of 'fixed' or 'candidates'");
    }
    if (points.contains("fixed")) {
        fixed = points_at(points.at("fixed"), "points.fixed");
    } else {
        candidates = points_at(points.at("candidates"), "points.candidates");
        max_selected = static_cast<int>(number_or(points, "max_selected",
                                                  static_cast<double>(workers.size()),
                                                  "points"));
        if (max_selected < 1) fail("points.max_selected", "must be >= 1");
    }

    TestPointDistribution F = parse_distribution(require(j, "distribution", "$"));
    ObjectiveSpec objective = parse_objective(require(j, "objective", "$"), workers.size());

    NoiseModel noise(NoiseModel::Family::Gaussian);
    std::int64_t sim_n = 10000;
    std::uint64_t sim_seed = 1;
    if (j.contains("simulation")) {
        const json& sim = j.at("simulation");
        if (sim.contains("noise")) {
            noise = NoiseModel::parse(string_field(sim, "noise", "simulation"));
        }
        sim_n = static_cast<std::int64_t>(
            number_or(sim, "n", static_cast<double>(sim_n), "simulation"));
        if (sim_n < 2) fail("simulation.n", "must be >= 2");
        sim_seed = static_cast<std::uint64_t>(
            number_or(sim, "seed", static_cast<double>(sim_seed), "simulation"));
    }

    std::optional<GroundTruth> truth;
    if (j.contains("ground_truth")) {
        const Vec coeffs =
            vec_at(require(j.at("ground_truth"), "coefficients", "ground_truth"),
                   "ground_truth.coefficients");
        if (coeffs.size() != estimator.features.output_dim()) {
            fail("ground_truth.coefficients",
                 "expected " + std::to_string(estimator.features.output_dim()) +
                     " coefficients for this estimator");
        }
        truth = GroundTruth{coeffs};
    }

    std::string name;
    if (j.contains("name")) name = j.at("name").get<std::string>();

    return Scenario{std::move(name),
                    std::move(estimator),
                    std::move(workers),
                    std::move(fixed),
                    std::move(candidates),
                    max_selected,
                    std::move(F),
                    std::move(objective),
                    noise,
                    sim_n,
                    sim_seed,
                    std::move(truth)};
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError("scenario '" + path + "': " + e.what());
    }
    return parse_scenario(j);
}

namespace {

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index t = 0; t < v.size(); ++t) a.push_back(v(t));
    return a;
}

json points_json(const std::vector<Vec>& pts) {
    json a = json::array();
    for (const auto& p : pts) a.push_back(vec_json(p));
    return a;
}

json curve_json(const EffortCurve& curve) {
    json c;
    switch (curve.family()) {
    case EffortCurve::Family::PowerDecay:
        c["family"] = "power-decay";
        c["scale"] = curve.scale();
        c["exponent"] = curve.shape();
        break;
    case EffortCurve::Family::ExponentialDecay:
        c["family"] = "exponential-decay";
        c["scale"] = curve.scale();
        c["rate"] = curve.shape();
        break;
    case EffortCurve::Family::Custom:
        throw InputError("custom curves cannot be serialized to scenario files");
    }
    c["e_min"] = curve.e_min();
    c["e_max"] = curve.e_max();
    return c;
}

} // namespace

json emit_scenario(const Scenario& scenario) {
    json j;
    if (!scenario.name.empty()) j["name"] = scenario.name;

    json est;
    switch (scenario.estimator.features.kind()) {
    case FeatureMap::Kind::Polynomial:
        est["kind"] = "polynomial";
        est["degree"] = scenario.estimator.features.degree();
        est["input_dim"] = scenario.estimator.features.input_dim();
        break;
    case FeatureMap::Kind::ExplicitBasis:
        est["kind"] = "explicit-basis";
        est["input_dim"] = scenario.estimator.features.input_dim();
        break;
    case FeatureMap::Kind::Kernel:
        est["kind"] = "kernel";
        est["centers"] = points_json(scenario.estimator.features.centers());
        est["bandwidth"] = scenario.estimator.features.bandwidth();
        break;
    }
    est["lambda"] = scenario.estimator.lambda;
    j["estimator"] = std::move(est);

    json workers = json::array();
    for (const auto& w : scenario.workers) {
        json jw;
        jw["id"] = w.id;
        jw["curve"] = curve_json(w.curve);
        workers.push_back(std::move(jw));
    }
    j["workers"] = std::move(workers);

    json points;
    if (!scenario.fixed_points.empty()) {
        points["fixed"] = points_json(scenario.fixed_points);
    } else {
        points["candidates"] = points_json(scenario.candidate_points);
        points["max_selected"] = scenario.max_selected;
    }
    j["points"] = std::move(points);

    json dist;
    dist["support"] = points_json(scenario.F.support());
    json weights = json::array();
    for (double w : scenario.F.weights()) weights.push_back(w);
    dist["weights"] = std::move(weights);
    j["distribution"] = std::move(dist);

    json objective;
    if (scenario.objective.mode == ObjectiveSpec::Mode::Budget) {
        objective["budget"] = scenario.objective.budget;
        objective["eta"] = scenario.objective.eta;
    } else if (!scenario.objective.per_worker_etas.empty()) {
        json etas = json::array();
        for (double e : scenario.objective.per_worker_etas) etas.push_back(e);
        objective["etas"] = std::move(etas);
    } else {
        objective["eta"] = scenario.objective.eta;
    }
    j["objective"] = std::move(objective);

    json sim;
    sim["noise"] = scenario.noise.name();
    sim["n"] = scenario.sim_n;
    sim["seed"] = scenario.sim_seed;
    j["simulation"] = std::move(sim);

    if (scenario.truth) {
        json truth;
        truth["coefficients"] = vec_json(scenario.truth->coefficients);
        j["ground_truth"] = std::move(truth);
    }
    return j;
}

std::string scenario_digest(const Scenario& scenario) {
    const std::string canonical = emit_scenario(scenario).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char byte : canonical) {
        hash ^= byte;
        hash *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

PlanProblem plan_problem(const Scenario& scenario) {
    return PlanProblem{scenario.workers,      scenario.fixed_points,
                       scenario.candidate_points, scenario.max_selected,
                       scenario.estimator,    scenario.F,
                       scenario.objective};
}

} // namespace esw
