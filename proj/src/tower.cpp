#include "mk/tower.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

#include "mk/dbar.hpp"
#include "mk/errors.hpp"
#include "mk/transport.hpp"

namespace mk {

PartitionTree::PartitionTree(FiniteDistribution masses, CostSpace base_cost,
                             std::vector<std::vector<std::size_t>> levels)
    : masses_(std::move(masses)), base_cost_(std::move(base_cost)), levels_(std::move(levels)) {
    const std::size_t n = masses_.size();
    if (n == 0) throw InputError("tree has no leaves");
    if (base_cost_.size() != n) throw DimensionError("base cost does not match the number of leaves");
    std::vector<std::size_t> below(n);
    for (std::size_t i = 0; i < n; ++i) below[i] = i;
    std::size_t below_count = n;
    for (std::size_t k = 0; k < levels_.size(); ++k) {
        const auto& level = levels_[k];
        if (level.size() != n) {
            std::ostringstream msg;
            msg << "level " << k + 1 << " labels " << level.size() << " leaves, expected " << n;
            throw DimensionError(msg.str());
        }
        std::size_t count = 0;
        for (std::size_t c : level) count = std::max(count, c + 1);
        std::vector<bool> used(count, false);
        for (std::size_t c : level) used[c] = true;
        for (std::size_t c = 0; c < count; ++c)
            if (!used[c]) {
                std::ostringstream msg;
                msg << "level " << k + 1 << " skips class id " << c;
                throw InputError(msg.str());
            }
        // Each class below must land in exactly one class here.
        std::vector<std::size_t> image(below_count, count);
        for (std::size_t leaf = 0; leaf < n; ++leaf) {
            auto& slot = image[below[leaf]];
            if (slot == count) slot = level[leaf];
            else if (slot != level[leaf]) {
                std::ostringstream msg;
                msg << "level " << k + 1 << " splits a class of level " << k << " (leaf " << leaf << ")";
                throw InputError(msg.str());
            }
        }
        class_counts_.push_back(count);
        below = level;
        below_count = count;
    }
}

std::size_t PartitionTree::classes(std::size_t level) const {
    if (level > depth()) throw DimensionError("level exceeds the tree depth");
    return level == 0 ? leaves() : class_counts_[level - 1];
}

std::vector<std::size_t> PartitionTree::next_partition(std::size_t level) const {
    if (level >= depth()) throw DimensionError("no partition above the top level");
    std::vector<std::size_t> map(classes(level));
    for (std::size_t leaf = 0; leaf < leaves(); ++leaf) {
        const std::size_t from = level == 0 ? leaf : levels_[level - 1][leaf];
        map[from] = levels_[level][leaf];
    }
    return map;
}

LevelMetricSpace base_space(const PartitionTree& tree) {
    LevelMetricSpace s;
    s.level = 0;
    s.class_ids.resize(tree.leaves());
    for (std::size_t i = 0; i < tree.leaves(); ++i) s.class_ids[i] = i;
    s.masses.assign(tree.masses().weights().begin(), tree.masses().weights().end());
    s.metric = tree.base_cost().matrix();
    return s;
}

namespace {

struct Grouping {
    LevelMetricSpace next;
    std::vector<std::vector<std::size_t>> members;  // indices into the current space
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

Grouping group(const LevelMetricSpace& space, std::span<const std::size_t> next_partition) {
    const std::size_t n = space.masses.size();
    if (next_partition.size() != n) throw DimensionError("partition does not label every class");
    std::size_t count = 0;
    for (std::size_t c : next_partition) count = std::max(count, c + 1);
    std::vector<std::vector<std::size_t>> by_id(count);
    for (std::size_t i = 0; i < n; ++i) by_id[next_partition[i]].push_back(i);

    Grouping g;
    g.next.level = space.level + 1;
    g.next.warnings = space.warnings;
    for (std::size_t id = 0; id < count; ++id) {
        if (by_id[id].empty()) continue;
        double mass = 0.0;
        for (std::size_t i : by_id[id]) mass += space.masses[i];
        if (mass <= 0.0) {
            std::ostringstream msg;
            msg << "level " << g.next.level << " class " << id << " has zero mass and was dropped";
            g.next.warnings.push_back(msg.str());
            continue;
        }
        std::vector<double> cond(n, 0.0);
        for (std::size_t i : by_id[id]) cond[i] = space.masses[i] / mass;
        g.next.class_ids.push_back(id);
        g.next.masses.push_back(mass);
        g.next.conditionals.push_back(std::move(cond));
        g.members.push_back(std::move(by_id[id]));
    }
    const std::size_t m = g.members.size();
    g.next.metric = Matrix(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) g.pairs.emplace_back(a, b);
    return g;
}

double class_distance(const LevelMetricSpace& space, const Grouping& g, std::size_t a, std::size_t b) {
    const auto& ra = g.members[a];
    const auto& rb = g.members[b];
    Matrix sub(ra.size(), rb.size());
    std::vector<double> wa(ra.size()), wb(rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        wa[i] = g.next.conditionals[a][ra[i]];
        for (std::size_t j = 0; j < rb.size(); ++j) sub(i, j) = space.metric(ra[i], rb[j]);
    }
    for (std::size_t j = 0; j < rb.size(); ++j) wb[j] = g.next.conditionals[b][rb[j]];
    return solve_mk(sub, wa, wb).value;
}

void fill(Grouping& g, std::size_t k, double value) {
    const auto [a, b] = g.pairs[k];
    g.next.metric(a, b) = g.next.metric(b, a) = value;
}

}  // namespace

LevelMetricSpace quotient_step(const LevelMetricSpace& space, std::span<const std::size_t> next_partition) {
    auto g = group(space, next_partition);
    std::vector<double> values(g.pairs.size());
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < static_cast<long>(g.pairs.size()); ++k) {
        try {
            const auto [a, b] = g.pairs[static_cast<std::size_t>(k)];
            values[static_cast<std::size_t>(k)] = class_distance(space, g, a, b);
        } catch (...) {
#pragma omp critical(mk_tower_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t k = 0; k < g.pairs.size(); ++k) fill(g, k, values[k]);
    return std::move(g.next);
}

LevelMetricSpace quotient_step_serial(const LevelMetricSpace& space, std::span<const std::size_t> next_partition) {
    auto g = group(space, next_partition);
    for (std::size_t k = 0; k < g.pairs.size(); ++k) fill(g, k, class_distance(space, g, g.pairs[k].first, g.pairs[k].second));
    return std::move(g.next);
}

std::vector<LevelMetricSpace> build_tower(const PartitionTree& tree) {
    std::vector<LevelMetricSpace> tower{base_space(tree)};
    for (std::size_t k = 0; k < tree.depth(); ++k) {
        const auto& cur = tower.back();
        const auto full = tree.next_partition(k);
        std::vector<std::size_t> map(cur.class_ids.size());
        for (std::size_t i = 0; i < map.size(); ++i) map[i] = full[cur.class_ids[i]];
        tower.push_back(quotient_step(cur, map));
    }
    return tower;
}

double spread(const LevelMetricSpace& space) {
    double total = 0.0;
    const std::size_t n = space.masses.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) total += space.masses[a] * space.masses[b] * space.metric(a, b);
    return total;
}

double tower_statistic(const PartitionTree& tree, std::size_t level) {
    if (level > tree.depth()) throw DimensionError("level exceeds the tree depth");
    auto space = base_space(tree);
    for (std::size_t k = 0; k < level; ++k) {
        const auto full = tree.next_partition(k);
        std::vector<std::size_t> map(space.class_ids.size());
        for (std::size_t i = 0; i < map.size(); ++i) map[i] = full[space.class_ids[i]];
        space = quotient_step(space, map);
    }
    return spread(space);
}

std::vector<double> tower_statistics(const PartitionTree& tree) {
    std::vector<double> out;
    for (const auto& level : build_tower(tree)) out.push_back(spread(level));
    return out;
}

FiniteDistribution barycenter_project(std::span<const double> weights, const LevelMetricSpace& space) {
    if (space.level == 0) throw InputError("level 0 has no class conditionals");
    if (weights.size() != space.conditionals.size()) throw DimensionError("weights do not match the classes");
    const std::size_t n = space.conditionals.front().size();
    std::vector<double> out(n, 0.0);
    for (std::size_t a = 0; a < weights.size(); ++a)
        for (std::size_t j = 0; j < n; ++j) out[j] += weights[a] * space.conditionals[a][j];
    return FiniteDistribution(std::move(out));
}

FiniteDistribution canonical_lift(const LevelMetricSpace& space) { return FiniteDistribution(space.masses); }

PartitionTree dyadic_hamming_tree(std::size_t coordinates) {
    const std::size_t words = word_count(2, coordinates);
    std::vector<std::vector<std::size_t>> levels;
    for (std::size_t k = 1; k <= coordinates; ++k) {
        const std::size_t suffixes = std::size_t{1} << (coordinates - k);
        std::vector<std::size_t> level(words);
        for (std::size_t w = 0; w < words; ++w) level[w] = w % suffixes;
        levels.push_back(std::move(level));
    }
    return PartitionTree(empirical_distribution(words), hamming_cost(coordinates, 2), std::move(levels));
}

}  // namespace mk
