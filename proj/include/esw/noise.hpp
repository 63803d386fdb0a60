#pragma once

#include <string>

#include "esw/feature_map.hpp"
#include "esw/rng.hpp"

namespace esw {

/// Ground truth used only by simulation oracles: a coefficient vector in the
/// estimator's feature basis, so the true function lies in the hypothesis
/// class by construction.
struct GroundTruth {
    Vec coefficients;

    double eval(const FeatureMap& features, const Vec& x) const;
};

/// Mean-zero noise scaled at sample time to a requested standard deviation.
/// Every family has variance sigma^2 exactly.
class NoiseModel {
  public:
    enum class Family { Gaussian, CenteredUniform, TwoPoint };

    explicit NoiseModel(Family family) : family_(family) {}

    Family family() const { return family_; }

    double sample(rng::Stream& stream, double sigma) const;

    /// Unit-variance draw; sample(stream, sigma) == sigma * standard_sample.
    /// Separating the draw from the scale lets callers reuse one draw across
    /// several sigma values (common random numbers).
    double standard_sample(rng::Stream& stream) const;

    static NoiseModel parse(const std::string& name);
    std::string name() const;

  private:
    Family family_;
};

} // namespace esw
