#pragma once

#include "mk/measures.hpp"

namespace mk {

/// Kantorovich-Rubinshtein norm of a zero-charge measure: the transport distance between its
/// positive and negative parts (each rescaled to unit mass, the result scaled back).
/// Throws DomainError when the charge exceeds tol::mass or the cost is not a metric.
double kr_norm(const SignedMeasure& m, const CostSpace& cost);

struct LipschitzDual {
    double value = 0.0;
    DualPotential witness;  // witness.values[0] == 0
    std::size_t pivots = 0;
};

/// max sum_i u_i m_i subject to u_i - u_j <= cost_ij, solved as an explicit linear program
/// (independent of the transport solver). Same preconditions as kr_norm.
LipschitzDual lipschitz_dual(const SignedMeasure& m, const CostSpace& cost);

}  // namespace mk
