#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mk/measures.hpp"

namespace mk {

/// Leaves with masses and a base cost, plus a decreasing sequence of partitions:
/// levels[k][leaf] is the class of `leaf` at level k + 1. Level 0 is the leaves themselves.
class PartitionTree {
public:
    /// Class ids at each level must be 0..C-1 with every id used, and each level must
    /// coarsen the one below (leaves sharing a class stay together). InputError otherwise.
    PartitionTree(FiniteDistribution masses, CostSpace base_cost, std::vector<std::vector<std::size_t>> levels);

    std::size_t leaves() const noexcept { return masses_.size(); }
    std::size_t depth() const noexcept { return levels_.size(); }
    const FiniteDistribution& masses() const noexcept { return masses_; }
    const CostSpace& base_cost() const noexcept { return base_cost_; }
    const std::vector<std::vector<std::size_t>>& levels() const noexcept { return levels_; }
    std::size_t classes(std::size_t level) const;

    /// Class of each level-k class at level k + 1, for k < depth.
    std::vector<std::size_t> next_partition(std::size_t level) const;

private:
    FiniteDistribution masses_;
    CostSpace base_cost_;
    std::vector<std::vector<std::size_t>> levels_;
    std::vector<std::size_t> class_counts_;
};

/// Quotient points at one level with their masses and a (semi)metric between them.
struct LevelMetricSpace {
    std::size_t level = 0;
    std::vector<std::size_t> class_ids;  // id of each kept class in the tree's numbering
    std::vector<double> masses;
    Matrix metric;
    /// conditionals[a][j]: share of class a's mass on class j of the previous level
    /// (empty at level 0).
    std::vector<std::vector<double>> conditionals;
    std::vector<std::string> warnings;  // zero-mass classes dropped on the way here
};

LevelMetricSpace base_space(const PartitionTree& tree);

/// Merges the classes of `space` by `next_partition` (class index -> new class id, ids
/// 0..C-1) and measures new classes by the Kantorovich distance between their conditional
/// measures. Zero-mass classes are dropped with a warning. Pairs are solved in parallel.
LevelMetricSpace quotient_step(const LevelMetricSpace& space, std::span<const std::size_t> next_partition);
/// Serial reference for quotient_step.
LevelMetricSpace quotient_step_serial(const LevelMetricSpace& space, std::span<const std::size_t> next_partition);

/// Every level 0..depth of the tree.
std::vector<LevelMetricSpace> build_tower(const PartitionTree& tree);

/// sum_{a,b} m_a m_b metric(a, b): zero exactly when the quotient law is a metric point mass.
double spread(const LevelMetricSpace& space);

/// spread at level k. DimensionError when k exceeds the depth.
double tower_statistic(const PartitionTree& tree, std::size_t level);
/// spread at every level 0..depth.
std::vector<double> tower_statistics(const PartitionTree& tree);

/// Mixes the class conditionals: result_j = sum_a weights_a conditional_a(j).
FiniteDistribution barycenter_project(std::span<const double> weights, const LevelMetricSpace& space);

/// Law of the quotient point: the class masses. barycenter_project of it returns the
/// previous level's masses.
FiniteDistribution canonical_lift(const LevelMetricSpace& space);

/// Tree over all words of `coordinates` i.i.d. fair bits with the normalized Hamming cost;
/// level k forgets the first k coordinates (classes are the remaining suffixes).
PartitionTree dyadic_hamming_tree(std::size_t coordinates);

}  // namespace mk
