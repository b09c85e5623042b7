#include "canopy/change/assignment.hpp"

#include <cmath>
#include <limits>

#include "canopy/util/error.hpp"

namespace canopy::change {

std::vector<int> solve_assignment(const raster::Grid<double>& cost) {
    const int n = cost.height();
    if (n != cost.width()) throw DomainError("assignment cost matrix must be square");
    if (n == 0) return {};
    for (const double c : cost.data()) {
        if (!std::isfinite(c)) throw DomainError("assignment cost matrix must be finite");
    }

    constexpr double kInf = std::numeric_limits<double>::infinity();
    // 1-indexed with column 0 as the virtual start of each augmenting path.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost.at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

double assignment_cost(const raster::Grid<double>& cost, const std::vector<int>& row_to_col) {
    double total = 0.0;
    for (std::size_t r = 0; r < row_to_col.size(); ++r) {
        total += cost.at(static_cast<int>(r), row_to_col[r]);
    }
    return total;
}

} // namespace canopy::change
