#include "mk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "mk/errors.hpp"

namespace mk {

FiniteDistribution::FiniteDistribution(std::vector<double> weights, std::vector<std::string> labels)
    : weights_(std::move(weights)), labels_(std::move(labels)) {
    if (!labels_.empty() && labels_.size() != weights_.size())
        throw DimensionError("label count does not match weight count");
    double total = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        if (!std::isfinite(w) || w < 0.0) {
            std::ostringstream msg;
            msg << "weight " << i << " = " << w << " is not a finite nonnegative number";
            throw DomainError(msg.str());
        }
        total += w;
    }
    if (std::abs(total - 1.0) > tol::mass) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "distribution mass " << total << " differs from 1";
        throw DomainError(msg.str());
    }
}

double FiniteDistribution::entropy() const {
    double h = 0.0;
    for (double w : weights_)
        if (w > 0.0) h -= w * std::log(w);
    return h;
}

double SignedMeasure::charge() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

bool SignedMeasure::zero_charge(double tolerance) const {
    return std::abs(charge()) <= tolerance;
}

CostSpace::CostSpace(Matrix costs, bool is_metric) : costs_(std::move(costs)), is_metric_(is_metric) {
    if (!costs_.square()) throw DimensionError("cost matrix must be square");
    for (double c : costs_.data())
        if (!std::isfinite(c) || c < 0.0)
            throw DomainError("cost entries must be finite and nonnegative");
}

std::vector<double> TransportPlan::row_sums() const {
    std::vector<double> out(entries.rows(), 0.0);
    for (std::size_t i = 0; i < entries.rows(); ++i)
        for (double v : entries.row(i)) out[i] += v;
    return out;
}

std::vector<double> TransportPlan::col_sums() const {
    std::vector<double> out(entries.cols(), 0.0);
    for (std::size_t i = 0; i < entries.rows(); ++i)
        for (std::size_t j = 0; j < entries.cols(); ++j) out[j] += entries(i, j);
    return out;
}

double TransportPlan::marginal_error(std::span<const double> source,
                                     std::span<const double> target) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (source.size() != entries.rows() || target.size() != entries.cols()) return inf;
    for (double v : entries.data())
        if (!(v >= 0.0)) return inf;
    double err = 0.0;
    const auto rs = row_sums();
    const auto cs = col_sums();
    for (std::size_t i = 0; i < rs.size(); ++i) err = std::max(err, std::abs(rs[i] - source[i]));
    for (std::size_t j = 0; j < cs.size(); ++j) err = std::max(err, std::abs(cs[j] - target[j]));
    return err;
}

bool TransportPlan::feasible(std::span<const double> source, std::span<const double> target,
                             double tolerance) const {
    return marginal_error(source, target) <= tolerance;
}

double DualPotential::lipschitz_violation(const CostSpace& cost) const {
    if (values.size() != cost.size()) throw DimensionError("potential length does not match cost space");
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = 0; j < values.size(); ++j)
            worst = std::max(worst, values[i] - values[j] - cost(i, j));
    return worst;
}

JordanParts jordan_decompose(const SignedMeasure& m) {
    JordanParts parts;
    parts.pos.resize(m.weights.size());
    parts.neg.resize(m.weights.size());
    for (std::size_t i = 0; i < m.weights.size(); ++i) {
        parts.pos[i] = std::max(m.weights[i], 0.0);
        parts.neg[i] = std::max(-m.weights[i], 0.0);
        parts.mass += parts.pos[i];
    }
    return parts;
}

namespace {

void check_triangle(const Matrix& c, std::size_t i, std::size_t j, std::size_t k, double tolerance,
                    MetricReport& report) {
    const double excess = c(i, k) - (c(i, j) + c(j, k));
    if (excess > tolerance)
        report.violations.push_back({MetricViolation::Kind::triangle, i, k, j, excess});
}

}  // namespace

MetricReport validate_metric(const Matrix& c, double tolerance, std::uint64_t sample_seed) {
    if (!c.square()) throw DimensionError("metric check needs a square matrix");
    const std::size_t n = c.rows();
    MetricReport report;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(c(i, i)) > tolerance)
            report.violations.push_back({MetricViolation::Kind::diagonal, i, i, i, std::abs(c(i, i))});
        for (std::size_t j = i + 1; j < n; ++j) {
            const double asym = std::abs(c(i, j) - c(j, i));
            if (asym > tolerance)
                report.violations.push_back({MetricViolation::Kind::symmetry, i, j, j, asym});
        }
    }
    if (n <= kExhaustiveTriangleLimit) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t j = 0; j < n; ++j) check_triangle(c, i, j, k, tolerance, report);
    } else {
        report.exhaustive = false;
        std::mt19937_64 rng(sample_seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        constexpr std::size_t kSamples = 2'000'000;
        for (std::size_t s = 0; s < kSamples; ++s) check_triangle(c, pick(rng), pick(rng), pick(rng), tolerance, report);
    }
    return report;
}

MetricReport validate_metric(const CostSpace& cost, double tolerance) {
    return validate_metric(cost.matrix(), tolerance);
}

FiniteDistribution empirical_distribution(std::size_t n) {
    if (n == 0) throw InputError("empirical distribution needs at least one atom");
    return FiniteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

}  // namespace mk
