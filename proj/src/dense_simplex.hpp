#pragma once

#include <cstddef>
#include <vector>

#include "mk/matrix.hpp"

namespace mk::detail {

struct LpResult {
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;
};

/// maximize c.x subject to A x <= b, x >= 0, for b >= 0 (the origin is feasible).
/// Condensed (Tucker) tableau: one column per nonbasic variable, so a pivot costs
/// O(rows * cols) regardless of the number of slacks. Throws std::runtime_error if unbounded.
LpResult maximize_from_origin(const Matrix& a, const std::vector<double>& b, const std::vector<double>& c);

}  // namespace mk::detail
