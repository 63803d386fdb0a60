#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace esw::rng {

/// 64-bit finalizer (murmur3 variant). Used both to advance streams and to
/// derive statistically independent child streams from (seed, label) pairs.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

/// Counter-based pseudo-random stream (SplitMix64). Streams derived via
/// `child` are independent of each other and of the parent's draw sequence,
/// so work items can be seeded hierarchically and executed in any order.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    /// Independent substream labelled by `label`.
    [[nodiscard]] Stream child(std::uint64_t label) const {
        return Stream(mix64(state_ ^ mix64(label + 0x9e3779b97f4a7c15ULL)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_open01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller. Two uniforms per draw, no cached state,
    /// so the draw sequence depends only on the stream position.
    double gaussian();

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

/// Deterministic pairwise summation. The result depends only on the array
/// contents, never on thread count or accumulation schedule.
double pairwise_sum(std::span<const double> values);

struct MeanSE {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and standard error of the mean, two-pass, pairwise-summed.
MeanSE mean_se(std::span<const double> values);

} // namespace esw::rng
