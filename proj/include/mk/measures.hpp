#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mk/matrix.hpp"

namespace mk {

/// Absolute tolerances shared by all modules (unit-mass data).
namespace tol {
inline constexpr double mass = 1e-9;
inline constexpr double marginal = 1e-9;
inline constexpr double metric = 1e-12;
inline constexpr double objective = 1e-9;
inline constexpr double gap = 1e-9;
}  // namespace tol

/// Probability vector over the dense support 0..n-1.
class FiniteDistribution {
public:
    FiniteDistribution() = default;
    /// Throws DomainError on negative or non-finite weights or mass off by more than tol::mass.
    explicit FiniteDistribution(std::vector<double> weights,
                                std::vector<std::string> labels = {});

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const noexcept { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Shannon entropy -sum w log w, natural log, with 0 log 0 = 0.
    double entropy() const;

    bool operator==(const FiniteDistribution& other) const { return weights_ == other.weights_; }

private:
    std::vector<double> weights_;
    std::vector<std::string> labels_;
};

/// Signed mass vector; a member of the zero-charge space when it sums to 0.
struct SignedMeasure {
    std::vector<double> weights;

    double charge() const;
    bool zero_charge(double tolerance = tol::mass) const;
};

/// Square nonnegative cost matrix, optionally carrying a metric certificate.
class CostSpace {
public:
    CostSpace() = default;
    /// Throws DimensionError unless square, DomainError on negative or non-finite entries.
    /// `is_metric` is the caller's claim; see validate_metric to check it.
    CostSpace(Matrix costs, bool is_metric);

    std::size_t size() const noexcept { return costs_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return costs_(i, j); }
    const Matrix& matrix() const noexcept { return costs_; }
    bool is_metric() const noexcept { return is_metric_; }

private:
    Matrix costs_;
    bool is_metric_ = false;
};

/// Coupling matrix. Marginals are checked by `feasible`, not on construction,
/// so that perturbed or hand-built plans can be represented and rejected.
struct TransportPlan {
    Matrix entries;

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
    /// Largest absolute marginal deviation; infinity on shape mismatch or negative entries.
    double marginal_error(std::span<const double> source, std::span<const double> target) const;
    bool feasible(std::span<const double> source, std::span<const double> target,
                  double tolerance = tol::marginal) const;
};

/// Potential defined up to an additive constant; stored normalized with values[0] = 0.
struct DualPotential {
    std::vector<double> values;

    /// Largest violation of values_i - values_j <= cost_ij (0 when feasible).
    double lipschitz_violation(const CostSpace& cost) const;
};

/// Empirical metric triple (X, rho, mu): a reentrant point sampler plus a cost evaluator.
/// Points are real numbers; every builtin space is one-dimensional.
struct SampledTriple {
    /// Pure function of (seed, draw index).
    std::function<double(std::uint64_t seed, std::uint64_t index)> sampler;
    std::function<double(double, double)> metric;
    std::string description;
    bool is_metric = true;
    /// Quantile function of mu on [0,1], when the law is known in closed form.
    /// Enables exact 1D references and quantile-based measure-preserving maps.
    std::function<double(double)> quantile;
    /// Distribution function of mu, when known; needed for quantile-based maps.
    std::function<double(double)> cdf;
    /// True when `metric` is |x - y| on [0,1], so k1_line applies.
    bool unit_line = false;
    /// True when mu has no atoms (required to realize a measure-preserving map).
    bool continuous = true;
};

struct JordanParts {
    std::vector<double> pos;
    std::vector<double> neg;
    double mass = 0.0;  // sum(pos)
};

JordanParts jordan_decompose(const SignedMeasure& m);

struct MetricViolation {
    enum class Kind { diagonal, symmetry, triangle };
    Kind kind;
    std::size_t i = 0, j = 0;  // offending pair
    std::size_t via = 0;       // intermediate point of a triangle violation
    double excess;
};

struct MetricReport {
    std::vector<MetricViolation> violations;
    bool exhaustive = true;  // false when triangles were sampled
    bool valid() const noexcept { return violations.empty(); }
};

/// Exhaustive triangle check up to this many points; sampled beyond.
inline constexpr std::size_t kExhaustiveTriangleLimit = 256;

/// Throws DimensionError on non-square input.
MetricReport validate_metric(const Matrix& costs, double tolerance = tol::metric,
                             std::uint64_t sample_seed = 1);
MetricReport validate_metric(const CostSpace& cost, double tolerance = tol::metric);

/// Uniform weights 1/n. Throws InputError for n = 0.
FiniteDistribution empirical_distribution(std::size_t n);

}  // namespace mk
