#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mk/measures.hpp"

namespace mk {

/// Optimal plan for the finite Monge-Kantorovich problem together with its dual certificates.
struct TransportSolution {
    TransportPlan plan;
    double value = 0.0;
    /// Lipschitz-1 potential (normalized to 0 at index 0) when `lipschitz` is set; otherwise
    /// a copy of the row duals.
    DualPotential potential;
    /// LP duals with row_dual[i] + col_dual[j] <= cost(i, j), tight on the basis.
    std::vector<double> row_dual;
    std::vector<double> col_dual;
    /// The potential certifies optimality in the metric sense (square metric cost).
    bool lipschitz = false;
    std::size_t iterations = 0;
};

/// Exact solver for min sum cost_ij L_ij over couplings of `mu` and `nu`.
///
/// Works on any nonnegative rectangular cost; marginals need equal mass within tol::mass
/// (the target is rescaled to the source mass before solving). Zero-mass atoms keep their
/// index and receive zero rows or columns.
TransportSolution solve_mk(const Matrix& cost, std::span<const double> mu, std::span<const double> nu);

/// Square overload. When `cost.is_metric()` the returned potential is a Lipschitz-1 function
/// that is tight on the plan's support.
TransportSolution solve_mk(const CostSpace& cost, const FiniteDistribution& mu,
                           const FiniteDistribution& nu);

struct OptimalityReport {
    bool optimal = false;
    double lipschitz_violation = 0.0;  // max(U_i - U_j - c_ij)
    double support_violation = 0.0;    // max |U_i - U_j - c_ij| over plan_ij > 0
    std::vector<std::string> violations;
};

/// Checks the metric optimality certificate: the potential is Lipschitz-1 everywhere and
/// U_i - U_j = c_ij on every atom of the plan with positive mass.
/// Throws DomainError for non-metric costs and InputError when the plan is not a coupling of
/// the given marginals.
OptimalityReport verify_optimal(const TransportSolution& sol, const CostSpace& cost,
                                const FiniteDistribution& mu, const FiniteDistribution& nu);

/// Same check against the plan's own marginals; the plan must be nonnegative with unit mass.
OptimalityReport verify_optimal(const TransportSolution& sol, const CostSpace& cost);

/// Primal value minus dual objective. Uses sum U_i (mu_i - nu_i) for Lipschitz potentials and
/// the LP dual objective otherwise.
double duality_gap(const TransportSolution& sol, std::span<const double> mu, std::span<const double> nu);

/// [min_L sum c_ij^p L_ij]^(1/p). Throws DomainError when p < 1.
double solve_kp(const CostSpace& cost, const FiniteDistribution& mu, const FiniteDistribution& nu,
                double p);

}  // namespace mk
