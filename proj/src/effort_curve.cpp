#include "esw/effort_curve.hpp"

#include <cmath>
#include <string>

#include "esw/errors.hpp"

namespace esw {

namespace {

constexpr double kIntervalSlack = 1e-12;

void check_bounds(double e_min, double e_max) {
    if (!(e_min >= 0.0) || !(e_min < e_max) || !std::isfinite(e_max)) {
        throw InputError("effort interval must satisfy 0 <= e_min < e_max < inf");
    }
}

} // namespace

EffortCurve EffortCurve::power_decay(double scale, double exponent, double e_min,
                                     double e_max) {
    if (!(scale > 0.0) || !(exponent > 0.0)) {
        throw InputError("power-decay curve needs scale > 0 and exponent > 0");
    }
    check_bounds(e_min, e_max);
    EffortCurve c;
    c.family_ = Family::PowerDecay;
    c.scale_ = scale;
    c.shape_ = exponent;
    c.e_min_ = e_min;
    c.e_max_ = e_max;
    c.label_ = "power-decay";
    return c;
}

EffortCurve EffortCurve::exponential_decay(double scale, double rate, double e_min,
                                           double e_max) {
    if (!(scale > 0.0) || !(rate > 0.0)) {
        throw InputError("exponential-decay curve needs scale > 0 and rate > 0");
    }
    check_bounds(e_min, e_max);
    EffortCurve c;
    c.family_ = Family::ExponentialDecay;
    c.scale_ = scale;
    c.shape_ = rate;
    c.e_min_ = e_min;
    c.e_max_ = e_max;
    c.label_ = "exponential-decay";
    return c;
}

EffortCurve EffortCurve::custom(std::function<double(double)> sigma,
                                std::function<double(double)> sigma_prime, double e_min,
                                double e_max, std::string label) {
    if (!sigma || !sigma_prime) throw InputError("custom curve needs sigma and sigma'");
    check_bounds(e_min, e_max);

    // Certify positivity, strict decrease, and convexity on a uniform grid.
    constexpr int kGrid = 1000;
    const double step = (e_max - e_min) / (kGrid - 1);
    double prev_slope = 0.0;
    for (int j = 0; j < kGrid; ++j) {
        const double e = e_min + j * step;
        const double value = sigma(e);
        const double slope = sigma_prime(e);
        if (!(value > 0.0)) {
            throw InputError(label + " curve: sigma(e) must be > 0 on the interval "
                             "(failed at e = " + std::to_string(e) + ")");
        }
        if (!(slope < 0.0)) {
            throw InputError(label + " curve: sigma'(e) must be < 0 on the interval "
                             "(failed at e = " + std::to_string(e) + ")");
        }
        // Convexity of sigma: the slope must be nondecreasing along the grid.
        if (j > 0 && slope < prev_slope - 1e-9 * (1.0 + std::fabs(prev_slope))) {
            throw InputError(label + " curve: sigma must be convex on the interval "
                             "(slope decreased near e = " + std::to_string(e) + ")");
        }
        prev_slope = slope;
    }

    EffortCurve c;
    c.family_ = Family::Custom;
    c.e_min_ = e_min;
    c.e_max_ = e_max;
    c.label_ = std::move(label);
    c.custom_sigma_ = std::move(sigma);
    c.custom_prime_ = std::move(sigma_prime);
    return c;
}

void EffortCurve::check_interval(double e) const {
    if (!contains(e)) {
        throw DomainError("effort " + std::to_string(e) + " outside the interval [" +
                          std::to_string(e_min_) + ", " + std::to_string(e_max_) + "]");
    }
}

bool EffortCurve::contains(double e) const {
    const double slack = kIntervalSlack * (1.0 + e_max_);
    return e >= e_min_ - slack && e <= e_max_ + slack;
}

double EffortCurve::clamp(double e) const {
    if (e < e_min_) return e_min_;
    if (e > e_max_) return e_max_;
    return e;
}

std::pair<double, double> EffortCurve::sigma_and_slope(double e) const {
    check_interval(e);
    switch (family_) {
    case Family::PowerDecay: {
        const double base = 1.0 + e;
        const double value = scale_ * std::pow(base, -shape_);
        return {value, -shape_ * value / base};
    }
    case Family::ExponentialDecay: {
        const double value = scale_ * std::exp(-shape_ * e);
        return {value, -shape_ * value};
    }
    case Family::Custom:
        return {custom_sigma_(e), custom_prime_(e)};
    }
    throw DomainError("unreachable curve family");
}

double EffortCurve::variance_slope(double e) const {
    const auto [value, slope] = sigma_and_slope(e);
    return 2.0 * value * slope;
}

} // namespace esw
