#include "mk/assignment.hpp"

#include <cmath>
#include <limits>

#include "mk/errors.hpp"

namespace mk {

Assignment solve_assignment(const Matrix& cost) {
    if (!cost.square()) throw DimensionError("assignment needs a square cost matrix");
    for (double v : cost.data())
        if (!std::isfinite(v)) throw DomainError("assignment cost has a non-finite entry");
    const std::size_t n = cost.rows();
    Assignment out;
    if (n == 0) return out;

    // Shortest augmenting paths with row/column potentials; index 0 is a sentinel column and
    // rows/columns are 1-based inside the loop.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
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

    out.permutation.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) out.permutation[match[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i) out.value += cost(i, out.permutation[i]);
    return out;
}

double strong_mk_empirical(std::span<const double> xs, std::span<const double> ys,
                           const std::function<double(double, double)>& metric) {
    if (xs.size() != ys.size()) throw InputError("strong MK estimate needs samples of equal size");
    if (xs.empty()) throw InputError("strong MK estimate needs at least one sample point");
    const std::size_t n = xs.size();
    Matrix cost(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost(i, j) = metric(xs[i], ys[j]);
    return solve_assignment(cost).value / static_cast<double>(n);
}

}  // namespace mk
