#include "mk/line.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mk/errors.hpp"

namespace mk {

namespace {

constexpr double kResidual = 1e-15;

}  // namespace

LineDistribution::LineDistribution(std::vector<double> positions, std::vector<double> weights) {
    if (positions.size() != weights.size())
        throw DimensionError("line distribution needs one weight per position");
    if (positions.empty()) throw InputError("line distribution has no atoms");
    std::vector<double> merged_pos, merged_w;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const double x = positions[i];
        if (!(x >= 0.0 && x <= 1.0)) {
            std::ostringstream msg;
            msg << "position " << x << " lies outside [0,1]";
            throw InputError(msg.str());
        }
        if (!merged_pos.empty() && x < merged_pos.back())
            throw InputError("line positions must be sorted in increasing order");
        if (!merged_pos.empty() && x == merged_pos.back()) {
            merged_w.back() += weights[i];
        } else {
            merged_pos.push_back(x);
            merged_w.push_back(weights[i]);
        }
    }
    weights_ = FiniteDistribution(std::move(merged_w));
    positions_ = std::move(merged_pos);
}

double LineDistribution::quantile(double u) const {
    double cumulative = 0.0;
    for (std::size_t i = 0; i < positions_.size(); ++i) {
        cumulative += weights_[i];
        if (weights_[i] > 0.0 && u <= cumulative) return positions_[i];
    }
    for (std::size_t i = positions_.size(); i-- > 0;)
        if (weights_[i] > 0.0) return positions_[i];
    return positions_.back();
}

double k1_line(const LineDistribution& a, const LineDistribution& b) {
    const auto xa = a.positions(), xb = b.positions();
    const auto wa = a.weights().weights(), wb = b.weights().weights();
    std::size_t i = 0, j = 0;
    double fa = 0.0, fb = 0.0, total = 0.0;
    double t = 0.0;
    while (i < xa.size() || j < xb.size()) {
        const double next = std::min(i < xa.size() ? xa[i] : 1.0, j < xb.size() ? xb[j] : 1.0);
        total += std::abs(fa - fb) * (next - t);
        t = next;
        while (i < xa.size() && xa[i] == t) fa += wa[i++];
        while (j < xb.size() && xb[j] == t) fb += wb[j++];
    }
    total += std::abs(fa - fb) * (1.0 - t);
    return total;
}

std::vector<QuantilePair> quantile_map(const LineDistribution& a, const LineDistribution& b) {
    const auto xa = a.positions(), xb = b.positions();
    const auto wa = a.weights().weights(), wb = b.weights().weights();
    std::vector<QuantilePair> pairs;
    std::size_t i = 0, j = 0;
    double ra = wa[0], rb = wb[0];
    while (i < xa.size() && j < xb.size()) {
        const double take = std::min(ra, rb);
        if (take > 0.0) pairs.push_back({xa[i], xb[j], take});
        ra -= take;
        rb -= take;
        if (ra <= kResidual && ++i < xa.size()) ra = wa[i];
        if (rb <= kResidual && ++j < xb.size()) rb = wb[j];
    }
    return pairs;
}

LineDistribution discretize_quantile(const std::function<double(double)>& quantile, std::size_t atoms) {
    if (atoms == 0) throw InputError("discretization needs at least one atom");
    std::vector<double> pos(atoms), w(atoms, 1.0 / static_cast<double>(atoms));
    for (std::size_t i = 0; i < atoms; ++i)
        pos[i] = quantile((static_cast<double>(i) + 0.5) / static_cast<double>(atoms));
    return LineDistribution(std::move(pos), std::move(w));
}

Matrix line_cost(const LineDistribution& a, const LineDistribution& b) {
    Matrix c(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c(i, j) = std::abs(a.positions()[i] - b.positions()[j]);
    return c;
}

}  // namespace mk
