#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mk/matrix.hpp"

namespace mk {

struct Assignment {
    std::vector<std::size_t> permutation;  // row i is matched to column permutation[i]
    double value = 0.0;
};

/// Exact minimum-cost perfect matching on a square matrix (Hungarian method, O(n^3)).
/// Throws DimensionError on non-square input and DomainError on non-finite entries.
Assignment solve_assignment(const Matrix& cost);

/// (1/n) * optimal assignment value for the cost matrix metric(xs[i], ys[j]).
/// Throws InputError on size mismatch or empty samples.
double strong_mk_empirical(std::span<const double> xs, std::span<const double> ys,
                           const std::function<double(double, double)>& metric);

}  // namespace mk
