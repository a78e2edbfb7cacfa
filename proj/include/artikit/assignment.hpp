#pragma once

#include <limits>
#include <vector>

#include "artikit/errors.hpp"

namespace artikit {

struct Assignment {
    // row_to_col[i] = column matched to row i, or -1 when the row is unmatched
    // (only possible for rectangular inputs with more rows than columns).
    std::vector<int> row_to_col;
    double total_cost = 0.0;
};

// Minimum-cost assignment (Kuhn-Munkres with potentials, O(n^3)). Rectangular
// matrices are padded with zero-cost dummies, so exactly min(rows, cols) real
// pairs are produced and their summed cost is minimal.
inline Assignment solve_assignment(const std::vector<std::vector<double>>& cost) {
    const int rows = static_cast<int>(cost.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(cost[0].size());
    for (const auto& row : cost)
        if (static_cast<int>(row.size()) != cols)
            throw DimensionMismatchError("cost matrix rows have differing lengths");
    if (rows == 0 || cols == 0) return {std::vector<int>(static_cast<std::size_t>(rows), -1), 0.0};

    const int n = std::max(rows, cols);
    auto at = [&](int r, int c) -> double {
        if (r < rows && c < cols) return cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        return 0.0;  // dummy row or column
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = at(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                                   v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment result;
    result.row_to_col.assign(static_cast<std::size_t>(rows), -1);
    for (int j = 1; j <= n; ++j) {
        const int i = p[static_cast<std::size_t>(j)];
        if (i >= 1 && i <= rows && j <= cols) {
            result.row_to_col[static_cast<std::size_t>(i - 1)] = j - 1;
            result.total_cost += cost[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
        }
    }
    return result;
}

}  // namespace artikit
