#include "esw/distribution.hpp"

#include <cmath>
#include <string>

#include "esw/errors.hpp"

namespace esw {

TestPointDistribution::TestPointDistribution(std::vector<Vec> support,
                                             std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
    if (support_.empty()) throw InputError("test distribution needs nonempty support");
    if (support_.size() != weights_.size()) {
        throw InputError("test distribution support/weights size mismatch");
    }
    const auto dim = support_.front().size();
    double total = 0.0;
    for (std::size_t j = 0; j < support_.size(); ++j) {
        if (support_[j].size() != dim) {
            throw InputError("test distribution support points must share one dimension");
        }
        if (!(weights_[j] >= 0.0)) {
            throw InputError("test distribution weight " + std::to_string(j) +
                             " is negative");
        }
        total += weights_[j];
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw InputError("test distribution weights sum to " + std::to_string(total) +
                         ", expected 1 within 1e-12");
    }
}

TestPointDistribution TestPointDistribution::point_mass(Vec x) {
    std::vector<Vec> support;
    support.push_back(std::move(x));
    return TestPointDistribution(std::move(support), {1.0});
}

std::size_t TestPointDistribution::sample_index(rng::Stream& stream) const {
    const double u = stream.uniform01();
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < support_.size(); ++j) {
        acc += weights_[j];
        if (u < acc) return j;
    }
    return support_.size() - 1;
}

} // namespace esw
