#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mk/measures.hpp"

namespace mk {

/// Largest word space s^n the process tools will enumerate.
inline constexpr std::size_t kWordCap = 4096;

/// s^n, or ResourceError when it exceeds `cap`.
std::size_t word_count(std::size_t alphabet, std::size_t horizon, std::size_t cap = kWordCap);

/// First-order stationary Markov chain on states 0..s-1.
class MarkovChain {
public:
    /// Validates a row-stochastic transition matrix. The stationary law is solved from
    /// pi P = pi when omitted (InputError if it is not unique) and checked when given.
    explicit MarkovChain(Matrix transition, std::optional<std::vector<double>> stationary = std::nullopt);

    std::size_t states() const noexcept { return transition_.rows(); }
    const Matrix& transition() const noexcept { return transition_; }
    const FiniteDistribution& stationary() const noexcept { return stationary_; }

    /// Every row equal to `row`: an i.i.d. process.
    static MarkovChain iid(std::vector<double> row);
    /// Two states that stay put with probability `stay`.
    static MarkovChain symmetric_binary(double stay);

private:
    Matrix transition_;
    FiniteDistribution stationary_;
};

/// Law of the next `horizon` symbols given the current state, over the s^n words in
/// lexicographic order (first symbol most significant).
struct FutureDistribution {
    std::size_t horizon = 0;
    std::size_t alphabet = 0;
    FiniteDistribution weights;
};

/// Normalized Hamming metric on s^n words, certified as a metric. ResourceError above the cap.
CostSpace hamming_cost(std::size_t horizon, std::size_t alphabet);

FutureDistribution conditional_future(const MarkovChain& chain, std::size_t state, std::size_t horizon);

/// sum_{a,b} pi_a pi_b k_{h_n}(P(.|a), P(.|b)): the pasts-averaged transport distance between
/// conditional futures. State pairs are solved in parallel and summed in a fixed order.
double dbar_criterion(const MarkovChain& chain, std::size_t horizon);
/// Serial reference for dbar_criterion.
double dbar_criterion_serial(const MarkovChain& chain, std::size_t horizon);

/// Kantorovich distances between the conditional futures of every pair of states.
Matrix future_distance_matrix(const MarkovChain& chain, std::size_t horizon);

struct EntropySearch {
    std::size_t max_atoms = 4;  // candidate supports are subsets of supp(nu) of this size or less
    std::size_t grid = 1000;    // atom weights are multiples of 1/grid
};

struct EntropyResult {
    double value = 0.0;
    FiniteDistribution measure;  // minimizer found, on the index space of the cost
    /// Always true: the search covers a finite family, so value bounds the infimum from above.
    bool upper_bound = true;
    /// No searched measure beat nu itself.
    bool fallback = false;
};

/// Smallest entropy H(l) over searched measures l with k(l, nu) <= eps - 1e-12 (the strict
/// inequality made closed). The search family is every measure supported on at most
/// `max_atoms` points of supp(nu) with weights on the 1/grid lattice, plus nu itself.
/// Throws DomainError for eps <= 0.
EntropyResult epsilon_entropy(const FiniteDistribution& nu, const CostSpace& cost, double eps,
                              const EntropySearch& search = {});
/// Serial reference for epsilon_entropy.
EntropyResult epsilon_entropy_serial(const FiniteDistribution& nu, const CostSpace& cost, double eps,
                                     const EntropySearch& search = {});

/// h_eps(M_n^+) for each horizon: M_n^+ puts mass pi_a on the conditional future of state a,
/// with ground metric the transport distance between futures under the Hamming cost.
std::vector<double> secondary_entropy_curve(const MarkovChain& chain, const std::vector<std::size_t>& horizons,
                                            double eps, const EntropySearch& search = {});

}  // namespace mk
