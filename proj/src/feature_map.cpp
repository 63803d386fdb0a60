#include "esw/feature_map.hpp"

#include <cmath>
#include <string>

#include "esw/errors.hpp"

namespace esw {

FeatureMap FeatureMap::explicit_basis(int input_dim) {
    if (input_dim < 1) throw InputError("explicit-basis feature map needs input_dim >= 1");
    FeatureMap m;
    m.kind_ = Kind::ExplicitBasis;
    m.input_dim_ = input_dim;
    m.output_dim_ = input_dim;
    return m;
}

namespace {

// Multi-indices with |alpha| <= degree in graded lexicographic order,
// constant term first.
void enumerate_monomials(int dim, int degree, std::vector<std::vector<int>>& out) {
    std::vector<int> alpha(dim, 0);
    for (int total = 0; total <= degree; ++total) {
        // all alpha with sum == total, lexicographic
        std::fill(alpha.begin(), alpha.end(), 0);
        alpha[dim - 1] = total;
        while (true) {
            std::vector<int> rev(alpha.rbegin(), alpha.rend());
            out.push_back(rev);
            // next composition of `total` into dim parts
            int i = dim - 1;
            while (i > 0 && alpha[i] == 0) --i;
            if (i == 0) break;
            const int rest = alpha[i] - 1;
            ++alpha[i - 1];
            alpha[i] = 0;
            alpha[dim - 1] = rest;
        }
    }
}

} // namespace

FeatureMap FeatureMap::polynomial(int degree, int input_dim) {
    if (degree < 0) throw InputError("polynomial feature map needs degree >= 0");
    if (input_dim < 1) throw InputError("polynomial feature map needs input_dim >= 1");
    FeatureMap m;
    m.kind_ = Kind::Polynomial;
    m.input_dim_ = input_dim;
    m.degree_ = degree;
    enumerate_monomials(input_dim, degree, m.exponents_);
    m.output_dim_ = static_cast<int>(m.exponents_.size());
    return m;
}

FeatureMap FeatureMap::kernel(std::vector<Vec> centers, double bandwidth) {
    if (centers.empty()) throw InputError("kernel feature map needs at least one center");
    if (!(bandwidth > 0.0)) throw InputError("kernel bandwidth must be positive");
    const auto dim = centers.front().size();
    for (const auto& c : centers) {
        if (c.size() != dim) throw InputError("kernel centers must share one dimension");
    }
    FeatureMap m;
    m.kind_ = Kind::Kernel;
    m.input_dim_ = static_cast<int>(dim);
    m.output_dim_ = static_cast<int>(centers.size());
    m.centers_ = std::move(centers);
    m.bandwidth_ = bandwidth;
    return m;
}

Vec FeatureMap::operator()(const Vec& x) const {
    if (x.size() != input_dim_) {
        throw InputError("feature map expects input of dimension " +
                         std::to_string(input_dim_) + ", got " + std::to_string(x.size()));
    }
    Vec out(output_dim_);
    switch (kind_) {
    case Kind::ExplicitBasis:
        out = x;
        break;
    case Kind::Polynomial:
        for (int j = 0; j < output_dim_; ++j) {
            double v = 1.0;
            for (int a = 0; a < input_dim_; ++a) {
                for (int p = 0; p < exponents_[j][a]; ++p) v *= x[a];
            }
            out[j] = v;
        }
        break;
    case Kind::Kernel: {
        const double inv2w2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
        for (int j = 0; j < output_dim_; ++j) {
            out[j] = std::exp(-(x - centers_[j]).squaredNorm() * inv2w2);
        }
        break;
    }
    }
    return out;
}

} // namespace esw
