#include "esw/hungarian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "esw/errors.hpp"

namespace esw {

MatchingResult min_cost_matching(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    if (n == 0) throw InputError("matching needs a nonempty cost matrix");
    for (const auto& row : cost) {
        if (row.size() != n) {
            throw InputError("matching needs a square cost matrix; pad rectangular "
                             "problems with zero columns");
        }
        for (double c : row) {
            if (!std::isfinite(c) || c < 0.0) {
                throw InputError("matching costs must be finite and nonnegative");
            }
        }
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    // 1-indexed potentials; column 0 is the virtual unmatched column.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0); // match[j] = row assigned to column j
    std::vector<std::size_t> way(n + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> min_reduced(n + 1, kInf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double reduced = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (reduced < min_reduced[j]) {
                    min_reduced[j] = reduced;
                    way[j] = j0;
                }
                if (min_reduced[j] < delta) {
                    delta = min_reduced[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_reduced[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    MatchingResult result;
    result.assignment.assign(n, -1);
    for (std::size_t j = 1; j <= n; ++j) {
        result.assignment[match[j] - 1] = static_cast<int>(j - 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
        result.total_cost += cost[i][static_cast<std::size_t>(result.assignment[i])];
    }
    return result;
}

} // namespace esw
