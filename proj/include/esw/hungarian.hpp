#pragma once

#include <vector>

namespace esw {

struct MatchingResult {
    std::vector<int> assignment; // row i is matched to column assignment[i]
    double total_cost = 0.0;
};

/// Exact min-cost perfect matching on a square nonnegative cost matrix,
/// O(n^3) via shortest augmenting paths with potentials. Ties resolve toward
/// lower column indices for the earlier rows, so results are deterministic.
/// Rectangular problems must be padded with zero columns by the caller.
MatchingResult min_cost_matching(const std::vector<std::vector<double>>& cost);

} // namespace esw
