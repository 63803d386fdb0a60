#pragma once

#include <vector>

#include "esw/feature_map.hpp"
#include "esw/rng.hpp"

namespace esw {

/// Finitely supported distribution of the test point: support points with
/// nonnegative weights summing to 1 (within 1e-12). A point mass is the
/// single-support case.
class TestPointDistribution {
  public:
    TestPointDistribution(std::vector<Vec> support, std::vector<double> weights);

    static TestPointDistribution point_mass(Vec x);

    std::size_t size() const { return support_.size(); }
    int dim() const { return static_cast<int>(support_.front().size()); }
    const Vec& point(std::size_t j) const { return support_[j]; }
    double weight(std::size_t j) const { return weights_[j]; }
    const std::vector<Vec>& support() const { return support_; }
    const std::vector<double>& weights() const { return weights_; }

    /// Draw a support index by inverse-CDF walk.
    std::size_t sample_index(rng::Stream& stream) const;

  private:
    std::vector<Vec> support_;
    std::vector<double> weights_;
};

} // namespace esw
