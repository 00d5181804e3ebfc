#include "dense_simplex.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mk::detail {

LpResult maximize_from_origin(const Matrix& a, const std::vector<double>& b, const std::vector<double>& c) {
    const std::size_t rows = a.rows(), cols = a.cols();
    constexpr double kEps = 1e-12;

    // t(r, k) for r < rows: basic_r = t(r, cols) - sum_k t(r, k) nonbasic_k.
    // Row `rows` holds the objective: z = t(rows, cols) - sum_k t(rows, k) nonbasic_k.
    Matrix t(rows + 1, cols + 1);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < cols; ++k) t(r, k) = a(r, k);
        t(r, cols) = b[r];
    }
    for (std::size_t k = 0; k < cols; ++k) t(rows, k) = -c[k];

    // Labels: structural variables 0..cols-1, slacks cols..cols+rows-1.
    std::vector<std::size_t> nonbasic(cols), basic(rows);
    std::iota(nonbasic.begin(), nonbasic.end(), 0);
    std::iota(basic.begin(), basic.end(), cols);

    LpResult result;
    std::size_t degenerate = 0;
    const std::size_t cap = 50 * (rows + cols) * (cols + 1) + 1000;
    while (true) {
        const bool bland = degenerate > rows + cols;
        std::size_t q = cols;
        double best = -kEps;
        for (std::size_t k = 0; k < cols; ++k) {
            const double d = t(rows, k);
            if (d >= -kEps) continue;
            if (bland) {
                if (q == cols || nonbasic[k] < nonbasic[q]) q = k;
            } else if (d < best) {
                best = d;
                q = k;
            }
        }
        if (q == cols) break;

        std::size_t p = rows;
        double ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < rows; ++r) {
            if (t(r, q) <= kEps) continue;
            const double rr = std::max(0.0, t(r, cols)) / t(r, q);
            if (rr < ratio - kEps || (rr <= ratio + kEps && p < rows && basic[r] < basic[p])) {
                ratio = std::min(ratio, rr);
                p = r;
            }
        }
        if (p == rows) throw std::runtime_error("linear program is unbounded");
        if (++result.pivots > cap) throw std::runtime_error("simplex iteration cap reached");
        degenerate = ratio <= kEps ? degenerate + 1 : 0;

        const double piv = t(p, q);
        for (std::size_t k = 0; k <= cols; ++k)
            if (k != q) t(p, k) /= piv;
        t(p, q) = 1.0 / piv;
        for (std::size_t r = 0; r <= rows; ++r) {
            if (r == p) continue;
            const double f = t(r, q);
            if (f == 0.0) continue;
            for (std::size_t k = 0; k <= cols; ++k)
                if (k != q) t(r, k) -= f * t(p, k);
            t(r, q) = -f * t(p, q);
        }
        std::swap(basic[p], nonbasic[q]);
    }

    result.x.assign(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        if (basic[r] < cols) result.x[basic[r]] = std::max(0.0, t(r, cols));
    result.objective = t(rows, cols);
    return result;
}

}  // namespace mk::detail
