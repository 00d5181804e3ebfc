#pragma once

// Test-only reference computations. Nothing here calls into the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "mk/matrix.hpp"

namespace mk::oracle {

/// Solves A x = b in place (Gaussian elimination, partial pivoting). False when singular.
inline bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

struct VertexOptimum {
    double value = std::numeric_limits<double>::infinity();
    Matrix plan;
    std::size_t vertices = 0;
};

/// Minimum of sum c_ij x_ij over every vertex of the transportation polytope, found by
/// trying each set of n + m - 1 cells as a basis. Feasible for n * m <= 16 or so.
inline VertexOptimum transport_by_vertices(const Matrix& cost, std::span<const double> a,
                                           std::span<const double> b) {
    const std::size_t n = a.size(), m = b.size(), cells = n * m, k = n + m - 1;
    VertexOptimum best;
    std::vector<bool> choose(cells, false);
    std::fill(choose.begin(), choose.begin() + static_cast<long>(k), true);
    std::vector<std::size_t> basis;
    do {
        basis.clear();
        for (std::size_t c = 0; c < cells; ++c)
            if (choose[c]) basis.push_back(c);
        // Row constraints for every row, column constraints for all but the last column.
        std::vector<std::vector<double>> eq(k, std::vector<double>(k, 0.0));
        std::vector<double> rhs(k, 0.0);
        for (std::size_t v = 0; v < k; ++v) {
            const std::size_t i = basis[v] / m, j = basis[v] % m;
            eq[i][v] = 1.0;
            if (j + 1 < m) eq[n + j][v] = 1.0;
        }
        for (std::size_t i = 0; i < n; ++i) rhs[i] = a[i];
        for (std::size_t j = 0; j + 1 < m; ++j) rhs[n + j] = b[j];
        std::vector<double> x;
        if (!solve_linear(eq, rhs, x)) continue;
        if (std::any_of(x.begin(), x.end(), [](double v) { return v < -1e-12; })) continue;
        ++best.vertices;
        double value = 0.0;
        for (std::size_t v = 0; v < k; ++v) value += x[v] * cost(basis[v] / m, basis[v] % m);
        if (value < best.value) {
            best.value = value;
            best.plan = Matrix(n, m);
            for (std::size_t v = 0; v < k; ++v) best.plan(basis[v] / m, basis[v] % m) = std::max(0.0, x[v]);
        }
    } while (std::prev_permutation(choose.begin(), choose.end()));
    return best;
}

/// Minimum of sum_i cost(i, sigma(i)) over all n! permutations.
inline double assignment_by_permutations(const Matrix& cost) {
    std::vector<std::size_t> p(cost.rows());
    std::iota(p.begin(), p.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) s += cost(i, p[i]);
        best = std::min(best, s);
    } while (std::next_permutation(p.begin(), p.end()));
    return best;
}

/// Random metric: Euclidean distances between points in [0,1]^dim.
inline Matrix random_euclidean_metric(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
    for (auto& p : pts)
        for (auto& x : p) x = u(rng);
    Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) s += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
            c(i, j) = std::sqrt(s);
        }
    return c;
}

/// Random shortest-path metric on a complete graph with random edge weights in [0.1, 1].
/// Produces plenty of tight triangles, unlike point clouds.
inline Matrix random_graph_metric(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) c(i, j) = c(j, i) = u(rng);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c(i, j) = std::min(c(i, j), c(i, k) + c(k, j));
    return c;
}

/// Random probability vector; each atom is zero with probability `sparsity`.
inline std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng, double sparsity = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) {
        x = u(rng) < sparsity ? 0.0 : u(rng);
        total += x;
    }
    if (total == 0.0) {
        w[0] = 1.0;
        return w;
    }
    for (auto& x : w) x /= total;
    return w;
}

inline double entropy(std::span<const double> w) {
    double h = 0.0;
    for (double x : w)
        if (x > 0.0) h -= x * std::log(x);
    return h;
}

}  // namespace mk::oracle
