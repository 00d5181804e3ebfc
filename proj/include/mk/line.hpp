#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mk/measures.hpp"

namespace mk {

/// Finitely supported probability measure on [0,1] with strictly increasing positions.
class LineDistribution {
public:
    LineDistribution() = default;
    /// Positions must lie in [0,1] and be nondecreasing; repeated positions are merged.
    /// Throws InputError when unsorted or out of range, DomainError on bad weights.
    LineDistribution(std::vector<double> positions, std::vector<double> weights);

    std::size_t size() const noexcept { return positions_.size(); }
    std::span<const double> positions() const noexcept { return positions_; }
    const FiniteDistribution& weights() const noexcept { return weights_; }

    /// Left-continuous inverse of the distribution function, u in [0,1].
    double quantile(double u) const;

private:
    std::vector<double> positions_;
    FiniteDistribution weights_;
};

/// Integral over [0,1] of |F_a(t) - F_b(t)|, evaluated exactly on the merged breakpoints.
double k1_line(const LineDistribution& a, const LineDistribution& b);

struct QuantilePair {
    double from;
    double to;
    double mass;
};

/// Monotone rearrangement of `a` onto `b`: mass is matched quantile by quantile.
/// Pairs are ordered by source position; their masses sum to 1.
std::vector<QuantilePair> quantile_map(const LineDistribution& a, const LineDistribution& b);

/// Equal-mass atoms at q((i + 1/2) / atoms), i < atoms, for a nondecreasing quantile function q.
LineDistribution discretize_quantile(const std::function<double(double)>& quantile, std::size_t atoms);

/// Cost matrix |x_i - y_j| between the supports of two line distributions.
Matrix line_cost(const LineDistribution& a, const LineDistribution& b);

}  // namespace mk
