#pragma once

#include <Eigen/Dense>
#include <vector>

namespace esw {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Finite-dimensional feature map phi: R^n -> R^m. All estimators in this
/// library are linear in these features.
///
/// Kinds:
///  - ExplicitBasis: phi(x) = x; the caller supplies points already in
///    feature space (m = n).
///  - Polynomial: all monomials of total degree <= d, constant first,
///    graded-lex order. Over R^1 this is (1, x, x^2, ..., x^d).
///  - Kernel: phi_j(x) = exp(-|x - c_j|^2 / (2 w^2)) for a finite center set.
class FeatureMap {
  public:
    enum class Kind { ExplicitBasis, Polynomial, Kernel };

    static FeatureMap explicit_basis(int input_dim);
    static FeatureMap polynomial(int degree, int input_dim);
    static FeatureMap kernel(std::vector<Vec> centers, double bandwidth);

    int input_dim() const { return input_dim_; }
    int output_dim() const { return output_dim_; }
    Kind kind() const { return kind_; }
    int degree() const { return degree_; }
    const std::vector<Vec>& centers() const { return centers_; }
    double bandwidth() const { return bandwidth_; }

    /// Evaluate the feature vector. Throws InputError on dimension mismatch.
    Vec operator()(const Vec& x) const;

  private:
    FeatureMap() = default;

    Kind kind_ = Kind::ExplicitBasis;
    int input_dim_ = 0;
    int output_dim_ = 0;
    int degree_ = 0;
    std::vector<std::vector<int>> exponents_; // polynomial kind only
    std::vector<Vec> centers_;                // kernel kind only
    double bandwidth_ = 0.0;
};

inline Vec feature_vector(const FeatureMap& map, const Vec& x) { return map(x); }

} // namespace esw
