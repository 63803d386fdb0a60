#include "esw/noise.hpp"

#include <cmath>

#include "esw/errors.hpp"

namespace esw {

double GroundTruth::eval(const FeatureMap& features, const Vec& x) const {
    if (coefficients.size() != features.output_dim()) {
        throw InputError("ground-truth coefficient dimension does not match the feature map");
    }
    return features(x).dot(coefficients);
}

double NoiseModel::sample(rng::Stream& stream, double sigma) const {
    return sigma * standard_sample(stream);
}

double NoiseModel::standard_sample(rng::Stream& stream) const {
    switch (family_) {
    case Family::Gaussian:
        return stream.gaussian();
    case Family::CenteredUniform:
        // uniform on [-a, a] has variance a^2/3
        return stream.uniform(-std::sqrt(3.0), std::sqrt(3.0));
    case Family::TwoPoint:
        return (stream.next_u64() & 1u) ? 1.0 : -1.0;
    }
    return 0.0;
}

NoiseModel NoiseModel::parse(const std::string& name) {
    if (name == "gaussian") return NoiseModel(Family::Gaussian);
    if (name == "centered-uniform") return NoiseModel(Family::CenteredUniform);
    if (name == "symmetric-two-point") return NoiseModel(Family::TwoPoint);
    throw InputError("unknown noise family '" + name +
                     "' (expected gaussian, centered-uniform, or symmetric-two-point)");
}

std::string NoiseModel::name() const {
    switch (family_) {
    case Family::Gaussian: return "gaussian";
    case Family::CenteredUniform: return "centered-uniform";
    case Family::TwoPoint: return "symmetric-two-point";
    }
    return "?";
}

} // namespace esw
