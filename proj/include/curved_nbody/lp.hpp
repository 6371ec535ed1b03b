/**
 * @file lp.hpp
 * @brief Phase-I simplex for small dense feasibility problems
 *   find x >= 0 with A x = b.
 *
 * Dense tableau, Bland's rule. Intended for systems with a few dozen rows
 * and columns.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace curved_nbody::lp {

using Matrix = std::vector<std::vector<double>>;

struct FeasibilityOutcome {
    bool feasible = false;
    std::vector<double> x;
    /// Optimal phase-I objective: sum of artificial variables (0 when feasible).
    double infeasibility = 0.0;
};

inline FeasibilityOutcome find_nonnegative_solution(const Matrix& a, const std::vector<double>& b,
                                                    double tol = 1e-9) {
    const std::size_t m = a.size();
    if (b.size() != m) throw std::invalid_argument("lp: row count mismatch");
    const std::size_t n = m == 0 ? 0 : a.front().size();
    for (const auto& row : a)
        if (row.size() != n) throw std::invalid_argument("lp: ragged matrix");

    // columns: n structural, m artificial, 1 right-hand side
    const std::size_t cols = n + m + 1;
    const std::size_t rhs = n + m;
    Matrix t(m + 1, std::vector<double>(cols, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = b[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * a[i][j];
        t[i][n + i] = 1.0;
        t[i][rhs] = sign * b[i];
        basis[i] = n + i;
    }
    // objective row holds reduced costs of w = sum of artificials
    auto& obj = t[m];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) obj[j] -= t[i][j];
    for (std::size_t i = 0; i < m; ++i) obj[rhs] -= t[i][rhs];

    const std::size_t max_iter = 50 * (n + m + 1);
    for (std::size_t iter = 0;; ++iter) {
        if (iter > max_iter) throw std::runtime_error("lp: iteration limit reached");
        std::size_t enter = cols;
        for (std::size_t j = 0; j < rhs; ++j)
            if (obj[j] < -tol) {
                enter = j;
                break;
            }
        if (enter == cols) break;

        std::size_t leave = m;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= tol) continue;
            const double ratio = t[i][rhs] / t[i][enter];
            if (leave == m || ratio < best - tol) {
                best = ratio;
                leave = i;
            } else if (ratio <= best + tol && basis[i] < basis[leave]) {
                best = std::min(best, ratio);
                leave = i;
            }
        }
        // unbounded direction cannot occur in phase I (objective bounded below by 0)
        if (leave == m) break;

        const double piv = t[leave][enter];
        for (double& v : t[leave]) v /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const double f = t[i][enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    FeasibilityOutcome out;
    out.infeasibility = std::max(0.0, -obj[rhs]);
    out.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) out.x[basis[i]] = std::max(0.0, t[i][rhs]);
    out.feasible = out.infeasibility <= tol;
    return out;
}

}  // namespace curved_nbody::lp
