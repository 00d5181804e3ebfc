#include "mk/kr_norm.hpp"

#include <cmath>
#include <sstream>

#include "dense_simplex.hpp"
#include "mk/errors.hpp"
#include "mk/transport.hpp"

namespace mk {

namespace {

void check_inputs(const SignedMeasure& m, const CostSpace& cost) {
    if (m.weights.size() != cost.size()) throw DimensionError("signed measure does not match the cost space");
    if (!cost.is_metric()) throw DomainError("the KR norm is defined for metric costs");
    for (double w : m.weights)
        if (!std::isfinite(w)) throw DomainError("signed measure has a non-finite weight");
    if (!m.zero_charge()) {
        std::ostringstream msg;
        msg << "measure has charge " << m.charge() << "; the KR norm needs zero charge";
        throw DomainError(msg.str());
    }
}

}  // namespace

double kr_norm(const SignedMeasure& m, const CostSpace& cost) {
    check_inputs(m, cost);
    auto parts = jordan_decompose(m);
    double neg_mass = 0.0;
    for (double w : parts.neg) neg_mass += w;
    if (parts.mass == 0.0 || neg_mass == 0.0) return 0.0;
    for (double& w : parts.pos) w /= parts.mass;
    for (double& w : parts.neg) w /= neg_mass;
    const auto sol = solve_mk(cost, FiniteDistribution(std::move(parts.pos)), FiniteDistribution(std::move(parts.neg)));
    return sol.value * parts.mass;
}

LipschitzDual lipschitz_dual(const SignedMeasure& m, const CostSpace& cost) {
    check_inputs(m, cost);
    const std::size_t n = cost.size();
    LipschitzDual out;
    out.witness.values.assign(n, 0.0);
    if (n == 1) return out;

    // Substitute w_i = u_i + c(0, i) >= 0 for i >= 1 (u_0 = 0). Then u_i - u_j <= c_ij reads
    // w_i - w_j <= c_ij + c_0i - c_0j, whose right side is >= 0 by the triangle inequality,
    // so the origin is a feasible start.
    const std::size_t vars = n - 1;
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (std::size_t i = 1; i < n; ++i) {
        std::vector<double> row(vars, 0.0);
        row[i - 1] = 1.0;
        rows.push_back(row);
        rhs.push_back(cost(i, 0) + cost(0, i));
    }
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < n; ++j) {
            if (i == j) continue;
            std::vector<double> row(vars, 0.0);
            row[i - 1] = 1.0;
            row[j - 1] = -1.0;
            rows.push_back(row);
            const double r = cost(i, j) + cost(0, i) - cost(0, j);
            if (r < -tol::metric) throw DomainError("cost violates the triangle inequality");
            rhs.push_back(std::max(0.0, r));
        }
    std::vector<double> objective(vars);
    for (std::size_t i = 1; i < n; ++i) objective[i - 1] = m.weights[i];

    const auto lp = detail::maximize_from_origin(Matrix::from_rows(rows), rhs, objective);
    for (std::size_t i = 1; i < n; ++i) out.witness.values[i] = lp.x[i - 1] - cost(0, i);
    for (std::size_t i = 0; i < n; ++i) out.value += out.witness.values[i] * m.weights[i];
    out.pivots = lp.pivots;
    return out;
}

}  // namespace mk
