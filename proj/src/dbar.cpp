#include "mk/dbar.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "mk/errors.hpp"
#include "mk/transport.hpp"

namespace mk {

std::size_t word_count(std::size_t alphabet, std::size_t horizon, std::size_t cap) {
    if (alphabet == 0) throw InputError("alphabet is empty");
    if (horizon == 0) throw InputError("horizon must be at least 1");
    std::size_t words = 1;
    for (std::size_t k = 0; k < horizon; ++k) {
        if (words > cap / alphabet) {
            std::ostringstream msg;
            msg << alphabet << "^" << horizon << " words exceed the enumeration cap " << cap;
            throw ResourceError(msg.str());
        }
        words *= alphabet;
    }
    return words;
}

namespace {

std::vector<double> solve_stationary(const Matrix& p) {
    const std::size_t s = p.rows();
    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    std::vector<std::vector<double>> a(s, std::vector<double>(s + 1, 0.0));
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) a[i][j] = p(j, i) - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < s; ++j) a[s - 1][j] = 1.0;
    a[s - 1][s] = 1.0;
    for (std::size_t col = 0; col < s; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < s; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12)
            throw InputError("chain has no unique stationary distribution; pass one explicitly");
        std::swap(a[piv], a[col]);
        for (std::size_t r = 0; r < s; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k <= s; ++k) a[r][k] -= f * a[col][k];
        }
    }
    std::vector<double> pi(s);
    double total = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        pi[i] = std::max(0.0, a[i][s] / a[i][i]);
        total += pi[i];
    }
    for (double& x : pi) x /= total;
    return pi;
}

}  // namespace

MarkovChain::MarkovChain(Matrix transition, std::optional<std::vector<double>> stationary)
    : transition_(std::move(transition)) {
    if (!transition_.square() || transition_.rows() == 0)
        throw DimensionError("transition matrix must be square and nonempty");
    const std::size_t s = transition_.rows();
    for (std::size_t i = 0; i < s; ++i) {
        double row = 0.0;
        for (double v : transition_.row(i)) {
            if (!std::isfinite(v) || v < 0.0) throw DomainError("transition probabilities must be nonnegative");
            row += v;
        }
        if (std::abs(row - 1.0) > tol::mass) {
            std::ostringstream msg;
            msg << "transition row " << i << " sums to " << row;
            throw DomainError(msg.str());
        }
    }
    if (stationary && stationary->size() != s) throw DimensionError("stationary law has the wrong length");
    stationary_ = FiniteDistribution(stationary ? *stationary : solve_stationary(transition_));
    for (std::size_t j = 0; j < s; ++j) {
        double v = 0.0;
        for (std::size_t i = 0; i < s; ++i) v += stationary_[i] * transition_(i, j);
        if (std::abs(v - stationary_[j]) > tol::mass) throw DomainError("stationary law is not invariant under the chain");
    }
}

MarkovChain MarkovChain::iid(std::vector<double> row) {
    Matrix p(row.size(), row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
        for (std::size_t j = 0; j < row.size(); ++j) p(i, j) = row[j];
    return MarkovChain(std::move(p), row);
}

MarkovChain MarkovChain::symmetric_binary(double stay) {
    return MarkovChain(Matrix{{stay, 1.0 - stay}, {1.0 - stay, stay}}, std::vector<double>{0.5, 0.5});
}

CostSpace hamming_cost(std::size_t horizon, std::size_t alphabet) {
    const std::size_t words = word_count(alphabet, horizon);
    std::vector<std::vector<std::size_t>> digits(words, std::vector<std::size_t>(horizon));
    for (std::size_t w = 0; w < words; ++w) {
        std::size_t rest = w;
        for (std::size_t k = horizon; k-- > 0;) {
            digits[w][k] = rest % alphabet;
            rest /= alphabet;
        }
    }
    Matrix c(words, words);
    const double unit = 1.0 / static_cast<double>(horizon);
    for (std::size_t a = 0; a < words; ++a)
        for (std::size_t b = 0; b < words; ++b) {
            std::size_t diff = 0;
            for (std::size_t k = 0; k < horizon; ++k) diff += digits[a][k] != digits[b][k];
            c(a, b) = static_cast<double>(diff) * unit;
        }
    return CostSpace(std::move(c), true);
}

FutureDistribution conditional_future(const MarkovChain& chain, std::size_t state, std::size_t horizon) {
    const std::size_t s = chain.states();
    if (state >= s) throw InputError("state index out of range");
    word_count(s, horizon);
    const Matrix& p = chain.transition();
    std::vector<double> w(p.row(state).begin(), p.row(state).end());
    for (std::size_t k = 1; k < horizon; ++k) {
        std::vector<double> next(w.size() * s);
        for (std::size_t word = 0; word < w.size(); ++word) {
            const std::size_t last = word % s;
            for (std::size_t x = 0; x < s; ++x) next[word * s + x] = w[word] * p(last, x);
        }
        w = std::move(next);
    }
    return {horizon, s, FiniteDistribution(std::move(w))};
}

namespace {

struct FuturePairs {
    CostSpace cost;
    std::vector<FutureDistribution> futures;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // a < b with pi_a pi_b > 0
};

FuturePairs future_pairs(const MarkovChain& chain, std::size_t horizon, bool all_pairs) {
    FuturePairs fp{hamming_cost(horizon, chain.states()), {}, {}};
    for (std::size_t a = 0; a < chain.states(); ++a) fp.futures.push_back(conditional_future(chain, a, horizon));
    for (std::size_t a = 0; a < chain.states(); ++a)
        for (std::size_t b = a + 1; b < chain.states(); ++b)
            if (all_pairs || chain.stationary()[a] * chain.stationary()[b] > 0.0) fp.pairs.emplace_back(a, b);
    return fp;
}

double pair_distance(const FuturePairs& fp, std::size_t k) {
    const auto [a, b] = fp.pairs[k];
    return solve_mk(fp.cost, fp.futures[a].weights, fp.futures[b].weights).value;
}

double weighted_sum(const MarkovChain& chain, const FuturePairs& fp, const std::vector<double>& dist) {
    double total = 0.0;
    for (std::size_t k = 0; k < fp.pairs.size(); ++k) {
        const auto [a, b] = fp.pairs[k];
        total += 2.0 * chain.stationary()[a] * chain.stationary()[b] * dist[k];
    }
    return total;
}

template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < static_cast<long>(count); ++k) {
        try {
            body(static_cast<std::size_t>(k));
        } catch (...) {
#pragma omp critical(mk_dbar_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

double dbar_criterion(const MarkovChain& chain, std::size_t horizon) {
    const auto fp = future_pairs(chain, horizon, false);
    std::vector<double> dist(fp.pairs.size());
    parallel_for(fp.pairs.size(), [&](std::size_t k) { dist[k] = pair_distance(fp, k); });
    return weighted_sum(chain, fp, dist);
}

double dbar_criterion_serial(const MarkovChain& chain, std::size_t horizon) {
    const auto fp = future_pairs(chain, horizon, false);
    std::vector<double> dist(fp.pairs.size());
    for (std::size_t k = 0; k < fp.pairs.size(); ++k) dist[k] = pair_distance(fp, k);
    return weighted_sum(chain, fp, dist);
}

Matrix future_distance_matrix(const MarkovChain& chain, std::size_t horizon) {
    const auto fp = future_pairs(chain, horizon, true);
    std::vector<double> dist(fp.pairs.size());
    parallel_for(fp.pairs.size(), [&](std::size_t k) { dist[k] = pair_distance(fp, k); });
    Matrix d(chain.states(), chain.states());
    for (std::size_t k = 0; k < fp.pairs.size(); ++k) {
        const auto [a, b] = fp.pairs[k];
        d(a, b) = d(b, a) = dist[k];
    }
    return d;
}

// ---------------------------------------------------------------------------------------------
// epsilon-entropy search

namespace {

constexpr double kStrictMargin = 1e-12;

struct Candidate {
    double h = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> key;    // enumeration position; smaller wins ties
    std::vector<std::size_t> atoms;  // indices into the cost space
    std::vector<std::size_t> units;  // weights in multiples of 1/grid

    bool better_than(const Candidate& o) const { return h < o.h || (h == o.h && key < o.key); }
};

class EntropySearcher {
public:
    EntropySearcher(const FiniteDistribution& nu, const CostSpace& cost, double eps, const EntropySearch& search)
        : cost_(cost), grid_(search.grid), threshold_(eps - kStrictMargin) {
        if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
        if (nu.size() != cost.size()) throw DimensionError("measure does not match the cost space");
        if (grid_ < 1) throw InputError("entropy grid must be positive");
        for (std::size_t i = 0; i < nu.size(); ++i)
            if (nu[i] > 0.0) {
                support_.push_back(i);
                nu_support_.push_back(nu[i]);
            }
        max_atoms_ = std::min(search.max_atoms, support_.size());
        hlog_.resize(grid_ + 1, 0.0);
        for (std::size_t u = 1; u <= grid_; ++u) {
            const double w = static_cast<double>(u) / static_cast<double>(grid_);
            hlog_[u] = -w * std::log(w);
        }
        // U = c(., y) is 1-Lipschitz when the cost satisfies the triangle inequality.
        if (cost.is_metric()) {
            nu_potential_.assign(support_.size(), 0.0);
            for (std::size_t y = 0; y < support_.size(); ++y)
                for (std::size_t z = 0; z < support_.size(); ++z)
                    nu_potential_[y] += cost(support_[z], support_[y]) * nu_support_[z];
        }
    }

    std::size_t levels() const { return max_atoms_; }

    std::vector<std::vector<std::size_t>> subsets(std::size_t k) const {
        std::vector<std::vector<std::size_t>> out;
        std::vector<std::size_t> pick(k);
        for (std::size_t i = 0; i < k; ++i) pick[i] = i;
        const std::size_t n = support_.size();
        while (true) {
            std::vector<std::size_t> atoms(k);
            for (std::size_t i = 0; i < k; ++i) atoms[i] = support_[pick[i]];
            out.push_back(std::move(atoms));
            std::size_t i = k;
            while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
            if (i == 0) break;
            ++pick[i - 1];
            for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
        }
        return out;
    }

    /// Lowest entropy any k-atom lattice measure can have.
    double level_floor(std::size_t k) const {
        if (k > grid_) return std::numeric_limits<double>::infinity();
        return static_cast<double>(k - 1) * hlog_[1] + hlog_[grid_ - (k - 1)];
    }

    /// Number of outer jobs for a subset of size k: one per first weight when k >= 3.
    std::size_t jobs_per_subset(std::size_t k) const { return k >= 3 ? grid_ : 1; }

    /// Explores every lattice line under (subset, job) and improves `best` in place.
    /// `prune_at` is an entropy that is known to be achieved; lines bounded strictly above it are skipped.
    void run_job(std::size_t k, std::size_t subset_index, const std::vector<std::size_t>& atoms, std::size_t job,
                 Candidate& best) const {
        std::vector<std::size_t> units(k, 0);
        if (k == 1) {
            units[0] = grid_;
            consider(subset_index, atoms, units, {}, best);
            return;
        }
        if (k == 2) {
            line(subset_index, atoms, units, 0, grid_, 0.0, best);
            return;
        }
        const std::size_t first = job + 1;  // weight of the first atom in grid units
        if (first + (k - 1) > grid_) return;
        units[0] = first;
        prefix(subset_index, atoms, units, 1, grid_ - first, hlog_[first], best);
    }

    double distance(const std::vector<std::size_t>& atoms, const std::vector<std::size_t>& units) const {
        Matrix sub(atoms.size(), support_.size());
        for (std::size_t i = 0; i < atoms.size(); ++i)
            for (std::size_t j = 0; j < support_.size(); ++j) sub(i, j) = cost_(atoms[i], support_[j]);
        std::vector<double> l(atoms.size());
        for (std::size_t i = 0; i < atoms.size(); ++i)
            l[i] = static_cast<double>(units[i]) / static_cast<double>(grid_);
        return solve_mk(sub, l, nu_support_).value;
    }

    double entropy(const std::vector<std::size_t>& units) const {
        double h = 0.0;
        for (std::size_t u : units) h += hlog_[u];
        return h;
    }

private:
    void consider(std::size_t subset_index, const std::vector<std::size_t>& atoms,
                  const std::vector<std::size_t>& units, std::vector<std::size_t> key_tail, Candidate& best) const {
        Candidate c;
        c.h = entropy(units);
        c.key = {atoms.size(), subset_index};
        c.key.insert(c.key.end(), key_tail.begin(), key_tail.end());
        if (!c.better_than(best)) return;
        if (distance(atoms, units) > threshold_) return;
        c.atoms = atoms;
        c.units = units;
        best = std::move(c);
    }

    // Fixes units[pos] for pos < k - 2 recursively, then scans the final two-atom line.
    void prefix(std::size_t subset_index, const std::vector<std::size_t>& atoms, std::vector<std::size_t>& units,
                std::size_t pos, std::size_t remaining, double h_fixed, Candidate& best) const {
        const std::size_t k = atoms.size();
        if (prefix_infeasible(atoms, units, pos, remaining)) return;
        if (pos == k - 2) {
            line(subset_index, atoms, units, pos, remaining, h_fixed, best);
            return;
        }
        const std::size_t atoms_left = k - pos;
        for (std::size_t u = 1; u + (atoms_left - 1) <= remaining; ++u) {
            units[pos] = u;
            prefix(subset_index, atoms, units, pos + 1, remaining - u, h_fixed + hlog_[u], best);
        }
    }

    // Atoms pos and pos + 1 share `remaining` units: t and remaining - t, t in [1, remaining - 1].
    // The feasible t form an interval (k(., nu) is convex) and the entropy is concave in t, so
    // only the two ends of the feasible interval can be optimal.
    void line(std::size_t subset_index, const std::vector<std::size_t>& atoms, std::vector<std::size_t>& units,
              std::size_t pos, std::size_t remaining, double h_fixed, Candidate& best) const {
        if (remaining < 2) return;
        const double floor = h_fixed + hlog_[1] + hlog_[remaining - 1];
        if (floor > best.h) return;
        if (lower_bound_infeasible(atoms, units, pos, remaining)) return;

        auto f = [&](std::size_t t) {
            units[pos] = t;
            units[pos + 1] = remaining - t;
            return distance(atoms, units);
        };
        std::size_t lo = 1, hi = remaining - 1;
        std::size_t feasible = 0;
        // Ternary search on the convex function until some point is feasible.
        while (hi - lo > 2 && feasible == 0) {
            const std::size_t m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            const double f1 = f(m1), f2 = f(m2);
            if (f1 <= threshold_) feasible = m1;
            else if (f2 <= threshold_) feasible = m2;
            else if (f1 < f2) hi = m2 - 1;
            else if (f1 > f2) lo = m1 + 1;
            else {
                lo = m1;
                hi = m2;
            }
        }
        for (std::size_t t = lo; t <= hi && feasible == 0; ++t)
            if (f(t) <= threshold_) feasible = t;
        if (feasible == 0) return;

        // Binary searches for both ends of the feasible interval.
        std::size_t a = 1, b = feasible;
        while (a < b) {
            const std::size_t mid = a + (b - a) / 2;
            if (f(mid) <= threshold_) b = mid;
            else a = mid + 1;
        }
        const std::size_t left = a;
        a = feasible;
        b = remaining - 1;
        while (a < b) {
            const std::size_t mid = a + (b - a + 1) / 2;
            if (f(mid) <= threshold_) a = mid;
            else b = mid - 1;
        }
        const std::size_t right = a;

        for (std::size_t t : {left, right}) {
            units[pos] = t;
            units[pos + 1] = remaining - t;
            Candidate c;
            c.h = entropy(units);
            c.key = {atoms.size(), subset_index};
            c.key.insert(c.key.end(), units.begin(), units.end());
            if (c.better_than(best)) {
                c.atoms = atoms;
                c.units = units;
                best = std::move(c);
            }
        }
    }

    // The bound below with the unassigned mass placed anywhere on atoms pos..k-1: if even the
    // most favourable placement breaks it for some y, no completion of the prefix is feasible.
    bool prefix_infeasible(const std::vector<std::size_t>& atoms, const std::vector<std::size_t>& units,
                           std::size_t pos, std::size_t remaining) const {
        if (nu_potential_.empty()) return false;
        const double g = static_cast<double>(grid_), r = static_cast<double>(remaining);
        for (std::size_t y = 0; y < support_.size(); ++y) {
            double fixed = 0.0;
            for (std::size_t x = 0; x < pos; ++x) fixed += cost_(atoms[x], support_[y]) * static_cast<double>(units[x]);
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (std::size_t x = pos; x < atoms.size(); ++x) {
                lo = std::min(lo, cost_(atoms[x], support_[y]));
                hi = std::max(hi, cost_(atoms[x], support_[y]));
            }
            const double low = (fixed + r * lo) / g, high = (fixed + r * hi) / g;
            if (low - nu_potential_[y] > threshold_ + 1e-12 || nu_potential_[y] - high > threshold_ + 1e-12) return true;
        }
        return false;
    }

    // max_y |sum_x c(x, y) (l - nu)_x| <= k(l, nu). True when that bound exceeds the threshold at
    // every t on the line, found by ternary search on the convex bound.
    bool lower_bound_infeasible(const std::vector<std::size_t>& atoms, const std::vector<std::size_t>& units,
                                std::size_t pos, std::size_t remaining) const {
        if (nu_potential_.empty()) return false;
        const double g = static_cast<double>(grid_);
        auto bound = [&](std::size_t t) {
            double worst = 0.0;
            for (std::size_t y = 0; y < support_.size(); ++y) {
                double lv = 0.0;
                for (std::size_t x = 0; x < pos; ++x) lv += cost_(atoms[x], support_[y]) * static_cast<double>(units[x]);
                lv += cost_(atoms[pos], support_[y]) * static_cast<double>(t);
                lv += cost_(atoms[pos + 1], support_[y]) * static_cast<double>(remaining - t);
                worst = std::max(worst, std::abs(lv / g - nu_potential_[y]));
            }
            return worst;
        };
        std::size_t lo = 1, hi = remaining - 1;
        while (hi - lo > 2) {
            const std::size_t m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            const double b1 = bound(m1), b2 = bound(m2);
            if (b1 <= threshold_ || b2 <= threshold_) return false;
            if (b1 < b2) hi = m2 - 1;
            else if (b1 > b2) lo = m1 + 1;
            else {
                lo = m1;
                hi = m2;
            }
        }
        for (std::size_t t = lo; t <= hi; ++t)
            if (bound(t) <= threshold_ + 1e-12) return false;
        return true;
    }

    const CostSpace& cost_;
    std::size_t grid_;
    double threshold_;
    std::size_t max_atoms_ = 0;
    std::vector<std::size_t> support_;
    std::vector<double> nu_support_;
    std::vector<double> hlog_;
    std::vector<double> nu_potential_;
};

EntropyResult finish(const FiniteDistribution& nu, const Candidate& best, std::size_t grid) {
    EntropyResult r;
    if (best.atoms.empty()) {
        r.value = nu.entropy();
        r.measure = nu;
        r.fallback = true;
        return r;
    }
    std::vector<double> w(nu.size(), 0.0);
    for (std::size_t i = 0; i < best.atoms.size(); ++i)
        w[best.atoms[i]] = static_cast<double>(best.units[i]) / static_cast<double>(grid);
    r.value = best.h;
    r.measure = FiniteDistribution(std::move(w));
    return r;
}

Candidate fallback_candidate(const FiniteDistribution& nu) {
    Candidate c;
    c.h = nu.entropy();
    c.key = {std::numeric_limits<std::size_t>::max()};
    return c;
}

}  // namespace

EntropyResult epsilon_entropy(const FiniteDistribution& nu, const CostSpace& cost, double eps,
                              const EntropySearch& search) {
    EntropySearcher searcher(nu, cost, eps, search);
    Candidate best = fallback_candidate(nu);
    for (std::size_t k = 1; k <= searcher.levels() && best.h > 0.0; ++k) {
        if (searcher.level_floor(k) > best.h) break;
        const auto subsets = searcher.subsets(k);
        const std::size_t per = searcher.jobs_per_subset(k);
        const std::size_t jobs = subsets.size() * per;
        const Candidate level_start = best;
        std::vector<Candidate> found(jobs, level_start);
        parallel_for(jobs, [&](std::size_t j) {
            searcher.run_job(k, j / per, subsets[j / per], j % per, found[j]);
        });
        for (const auto& c : found)
            if (c.better_than(best)) best = c;
    }
    return finish(nu, best, search.grid);
}

EntropyResult epsilon_entropy_serial(const FiniteDistribution& nu, const CostSpace& cost, double eps,
                                     const EntropySearch& search) {
    EntropySearcher searcher(nu, cost, eps, search);
    Candidate best = fallback_candidate(nu);
    for (std::size_t k = 1; k <= searcher.levels() && best.h > 0.0; ++k) {
        if (searcher.level_floor(k) > best.h) break;
        const auto subsets = searcher.subsets(k);
        const std::size_t per = searcher.jobs_per_subset(k);
        for (std::size_t j = 0; j < subsets.size() * per; ++j) searcher.run_job(k, j / per, subsets[j / per], j % per, best);
    }
    return finish(nu, best, search.grid);
}

std::vector<double> secondary_entropy_curve(const MarkovChain& chain, const std::vector<std::size_t>& horizons,
                                            double eps, const EntropySearch& search) {
    std::vector<double> out;
    for (std::size_t n : horizons) {
        CostSpace ground(future_distance_matrix(chain, n), true);
        out.push_back(epsilon_entropy(chain.stationary(), ground, eps, search).value);
    }
    return out;
}

}  // namespace mk
