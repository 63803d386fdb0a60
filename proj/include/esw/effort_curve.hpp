#pragma once

#include <functional>
#include <string>
#include <utility>

namespace esw {

/// Map from a worker's effort to the standard deviation of their report's
/// noise. Valid curves are positive, strictly decreasing, and convex on the
/// effort interval; the built-in families satisfy this for all admissible
/// parameters, and custom curves are certified on a 1000-point grid at
/// construction. Under those conditions sigma^2 is strictly convex, which is
/// what makes every 1-D effort problem in this library unimodal.
class EffortCurve {
  public:
    enum class Family { PowerDecay, ExponentialDecay, Custom };

    /// sigma(e) = scale * (1 + e)^(-exponent), scale > 0, exponent > 0.
    static EffortCurve power_decay(double scale, double exponent, double e_min,
                                   double e_max);

    /// sigma(e) = scale * exp(-rate * e), scale > 0, rate > 0.
    static EffortCurve exponential_decay(double scale, double rate, double e_min,
                                         double e_max);

    /// User-supplied (sigma, sigma') pair. Positivity, strict decrease, and
    /// convexity are checked numerically on a 1000-point grid over the
    /// interval; failures throw InputError.
    static EffortCurve custom(std::function<double(double)> sigma,
                              std::function<double(double)> sigma_prime, double e_min,
                              double e_max, std::string label = "custom");

    Family family() const { return family_; }
    double scale() const { return scale_; }
    double shape() const { return shape_; } // exponent or rate
    double e_min() const { return e_min_; }
    double e_max() const { return e_max_; }
    const std::string& label() const { return label_; }

    /// (sigma(e), sigma'(e)). Throws DomainError when e is outside the
    /// effort interval.
    std::pair<double, double> sigma_and_slope(double e) const;

    double sigma(double e) const { return sigma_and_slope(e).first; }

    /// d/de sigma(e)^2 = 2 sigma sigma'; strictly negative on the interval.
    double variance_slope(double e) const;

    /// True when e lies in [e_min, e_max] (with a tiny slack for roundoff).
    bool contains(double e) const;

    /// Clamp an effort to the interval.
    double clamp(double e) const;

  private:
    EffortCurve() = default;

    void check_interval(double e) const;

    Family family_ = Family::PowerDecay;
    double scale_ = 1.0;
    double shape_ = 1.0;
    double e_min_ = 0.0;
    double e_max_ = 1.0;
    std::string label_;
    std::function<double(double)> custom_sigma_;
    std::function<double(double)> custom_prime_;
};

} // namespace esw
