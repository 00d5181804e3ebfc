#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mk/errors.hpp"
#include "mk/line.hpp"
#include "mk/measures.hpp"

namespace mk {

/// Raised when no measure-preserving map realizes the requested target law.
class UnsupportedPairError : public InputError {
public:
    explicit UnsupportedPairError(const std::string& what) : InputError(what) {}
};

/// uniform[0,1] with |x - y|.
SampledTriple uniform01_triple();
/// Law of t^2 for t uniform on [0,1], with the metric |x - y|.
SampledTriple square_triple();
/// uniform[0, scale] with |x - y| / scale: the same metric triple as uniform01 in other coordinates.
SampledTriple rescaled_uniform_triple(double scale);
/// Two atoms {0, 1} with P(1) = p and |x - y|.
SampledTriple twopoint_triple(double p);
/// A single atom at x in [0,1].
SampledTriple dirac_triple(double x);
/// Parses "uniform01", "square", "twopoint(p)", "dirac(x)" or "uniform(scale)". Throws InputError.
SampledTriple builtin_triple(const std::string& name);

/// Measure-preserving map S used in the shifted cost f(x, y) = rho(x, S y).
struct MapSpec {
    enum class Kind { identity, square, quantile };
    Kind kind = Kind::identity;
    /// Target law for Kind::quantile; S = Q_target o F_mu.
    std::optional<LineDistribution> target;
    std::string name = "identity";

    static MapSpec identity() { return {}; }
    static MapSpec square() { return {Kind::square, std::nullopt, "square"}; }
    static MapSpec quantile_to(LineDistribution target) {
        return {Kind::quantile, std::move(target), "quantile"};
    }
    /// "identity" or "square". Throws InputError otherwise.
    static MapSpec parse(const std::string& name);
};

/// Realizes S for the given triple. Non-identity maps need an atomless law (and a cdf for the
/// quantile kind); otherwise throws UnsupportedPairError.
std::function<double(double)> realize_map(const SampledTriple& triple, const MapSpec& map);

struct MatrixSample {
    Matrix entries;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    bool symmetric = false;
    std::vector<double> points;  // the draws x_1..x_n behind the matrix
};

/// r_ij = rho(x_i, x_j) for x_i = sampler(seed, i). Throws InputError when n = 0.
MatrixSample sample_matrix(const SampledTriple& triple, std::size_t n, std::uint64_t seed);

/// r_ij = rho(x_i, S x_j) on one draw sequence x_1..x_n from mu.
MatrixSample shifted_matrix(const SampledTriple& triple, const MapSpec& map, std::size_t n, std::uint64_t seed);

/// (1/n) * min over permutations of sum_i r_{i, sigma(i)}; equals the bistochastic optimum.
double k_n_estimate(const MatrixSample& sample);

struct ConvergenceReport {
    std::vector<std::size_t> n_grid;
    std::vector<std::vector<double>> estimates;  // [grid index][trial]
    std::optional<double> exact;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    /// k_n on growing prefixes of one draw stream, one value per grid entry (descriptive only).
    std::optional<std::vector<double>> nested;

    bool operator==(const ConvergenceReport&) const = default;
};

/// Exact k for 1D triples on the unit line: k1_line between fine quantile discretizations of
/// mu and S#mu. Empty when the triple has no closed-form quantile or is not on [0,1].
std::optional<double> exact_line_reference(const SampledTriple& triple, const MapSpec& map);

/// Atoms per law in exact_line_reference; discretization error is at most 1/(2 * atoms).
inline constexpr std::size_t kReferenceAtoms = 1 << 16;

/// Trial seeds are derive_seed(master_seed, n, trial). Trials run in parallel (OpenMP);
/// results are stored by (grid index, trial) so the report does not depend on scheduling.
ConvergenceReport run_convergence(const SampledTriple& triple, const MapSpec& map,
                                  const std::vector<std::size_t>& n_grid, std::size_t trials,
                                  std::uint64_t master_seed);
/// Serial reference for run_convergence.
ConvergenceReport run_convergence_serial(const SampledTriple& triple, const MapSpec& map,
                                         const std::vector<std::size_t>& n_grid, std::size_t trials,
                                         std::uint64_t master_seed);

/// k_n on the first n draws of the single stream keyed by `seed`, for each n in the grid.
std::vector<double> nested_fragments(const SampledTriple& triple, const MapSpec& map,
                                     const std::vector<std::size_t>& n_grid, std::uint64_t seed);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Median of |estimate - exact| per grid entry. Throws InputError without an exact value.
std::vector<double> median_errors(const ConvergenceReport& report);
/// Fraction of trials with |estimate - exact| > threshold per grid entry.
std::vector<double> exceedance_fractions(const ConvergenceReport& report, double threshold);

}  // namespace mk
