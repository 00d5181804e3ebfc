#include "mk/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mk/errors.hpp"

namespace mk {

namespace {

// Transportation simplex on the bipartite graph rows + columns. The basis is a spanning
// tree of n + m - 1 cells (degenerate zero-flow cells included); node ids are rows 0..n-1
// followed by columns n..n+m-1.
class TransportSimplex {
public:
    TransportSimplex(const Matrix& cost, std::span<const double> supply, std::span<const double> demand)
        : c_(cost), n_(cost.rows()), m_(cost.cols()), in_basis_(n_ * m_, -1) {
        double max_cost = 0.0;
        for (double v : c_.data()) max_cost = std::max(max_cost, v);
        eps_ = 1e-13 * std::max(1.0, max_cost);
        northwest_corner(supply, demand);
        rebuild_tree();
    }

    std::size_t run() {
        const std::size_t nodes = n_ + m_;
        const std::size_t cap = 200 * nodes * nodes + 10'000;
        std::size_t degenerate_streak = 0;
        std::size_t iterations = 0;
        while (true) {
            const bool bland = degenerate_streak > 4 * nodes;
            const long entering = bland ? price_bland() : price_block();
            if (entering < 0) break;
            if (++iterations > cap) throw std::runtime_error("transport simplex did not converge");
            const double theta = pivot(static_cast<std::size_t>(entering), bland);
            degenerate_streak = theta > 0.0 ? 0 : degenerate_streak + 1;
            rebuild_tree();
        }
        return iterations;
    }

    Matrix plan() const {
        Matrix p(n_, m_);
        for (const auto& cell : basis_) p(cell.row, cell.col) = cell.flow;
        return p;
    }
    std::vector<double> row_duals() const { return {pot_.begin(), pot_.begin() + n_}; }
    std::vector<double> col_duals() const { return {pot_.begin() + n_, pot_.end()}; }

private:
    struct Cell {
        std::size_t row, col;
        double flow;
    };

    void add_cell(std::size_t i, std::size_t j, double flow) {
        in_basis_[i * m_ + j] = static_cast<long>(basis_.size());
        basis_.push_back({i, j, flow});
    }

    void northwest_corner(std::span<const double> supply, std::span<const double> demand) {
        std::vector<double> a(supply.begin(), supply.end());
        std::vector<double> b(demand.begin(), demand.end());
        std::size_t i = 0, j = 0;
        basis_.reserve(n_ + m_ - 1);
        while (true) {
            const double x = std::max(0.0, std::min(a[i], b[j]));
            add_cell(i, j, x);
            a[i] -= x;
            b[j] -= x;
            if (i + 1 == n_ && j + 1 == m_) break;
            if (i + 1 == n_) ++j;
            else if (j + 1 == m_) ++i;
            else if (a[i] <= b[j]) ++i;
            else ++j;
        }
    }

    // Recomputes parent links, depths and potentials (u_root = 0 at row 0) from the basis.
    void rebuild_tree() {
        const std::size_t nodes = n_ + m_;
        adj_start_.assign(nodes + 1, 0);
        for (const auto& cell : basis_) {
            ++adj_start_[cell.row + 1];
            ++adj_start_[n_ + cell.col + 1];
        }
        std::partial_sum(adj_start_.begin(), adj_start_.end(), adj_start_.begin());
        adj_.resize(2 * basis_.size());
        std::vector<std::size_t> fill(adj_start_.begin(), adj_start_.end() - 1);
        for (std::size_t e = 0; e < basis_.size(); ++e) {
            adj_[fill[basis_[e].row]++] = e;
            adj_[fill[n_ + basis_[e].col]++] = e;
        }

        parent_edge_.assign(nodes, kNone);
        depth_.assign(nodes, kNone);
        pot_.assign(nodes, 0.0);
        queue_.clear();
        queue_.push_back(0);
        depth_[0] = 0;
        for (std::size_t head = 0; head < queue_.size(); ++head) {
            const std::size_t u = queue_[head];
            for (std::size_t k = adj_start_[u]; k < adj_start_[u + 1]; ++k) {
                const std::size_t e = adj_[k];
                const Cell& cell = basis_[e];
                const std::size_t row_node = cell.row, col_node = n_ + cell.col;
                const std::size_t v = (u == row_node) ? col_node : row_node;
                if (depth_[v] != kNone) continue;
                depth_[v] = depth_[u] + 1;
                parent_edge_[v] = e;
                pot_[v] = c_(cell.row, cell.col) - pot_[u];
                queue_.push_back(v);
            }
        }
        if (queue_.size() != nodes) throw std::logic_error("transport basis is not a spanning tree");
    }

    double reduced(std::size_t i, std::size_t j) const { return c_(i, j) - pot_[i] - pot_[n_ + j]; }

    // Block search: most negative reduced cost within the first block that has any.
    long price_block() {
        const std::size_t total = n_ * m_;
        const std::size_t block = std::max<std::size_t>(64, static_cast<std::size_t>(std::sqrt(double(total))));
        long best = -1;
        double best_d = -eps_;
        std::size_t seen_in_block = 0;
        for (std::size_t step = 0; step < total; ++step) {
            const std::size_t idx = next_price_;
            next_price_ = (next_price_ + 1 == total) ? 0 : next_price_ + 1;
            if (in_basis_[idx] < 0) {
                const double d = reduced(idx / m_, idx % m_);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<long>(idx);
                }
            }
            if (++seen_in_block == block) {
                if (best >= 0) return best;
                seen_in_block = 0;
            }
        }
        return best;
    }

    long price_bland() const {
        for (std::size_t idx = 0; idx < n_ * m_; ++idx)
            if (in_basis_[idx] < 0 && reduced(idx / m_, idx % m_) < -eps_) return static_cast<long>(idx);
        return -1;
    }

    std::size_t other_end(std::size_t e, std::size_t node) const {
        const Cell& cell = basis_[e];
        return node == cell.row ? n_ + cell.col : cell.row;
    }

    // Pushes flow around the cycle closed by the entering cell and swaps the leaving cell out.
    double pivot(std::size_t entering, bool bland) {
        const std::size_t er = entering / m_, ec = entering % m_;
        std::size_t p = er, q = n_ + ec;
        path_.clear();
        tail_.clear();
        while (depth_[p] > depth_[q]) {
            path_.push_back(parent_edge_[p]);
            p = other_end(parent_edge_[p], p);
        }
        while (depth_[q] > depth_[p]) {
            tail_.push_back(parent_edge_[q]);
            q = other_end(parent_edge_[q], q);
        }
        while (p != q) {
            path_.push_back(parent_edge_[p]);
            p = other_end(parent_edge_[p], p);
            tail_.push_back(parent_edge_[q]);
            q = other_end(parent_edge_[q], q);
        }
        path_.insert(path_.end(), tail_.rbegin(), tail_.rend());

        // Edges at even positions lose flow, odd positions gain it.
        std::size_t leave_pos = kNone;
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < path_.size(); k += 2) {
            const Cell& cell = basis_[path_[k]];
            const bool better = cell.flow < theta ||
                                (bland && cell.flow == theta &&
                                 cell.row * m_ + cell.col <
                                     basis_[path_[leave_pos]].row * m_ + basis_[path_[leave_pos]].col);
            if (better) {
                theta = cell.flow;
                leave_pos = k;
            }
        }
        for (std::size_t k = 0; k < path_.size(); ++k) {
            Cell& cell = basis_[path_[k]];
            cell.flow = (k % 2 == 0) ? cell.flow - theta : cell.flow + theta;
        }
        const std::size_t leave = path_[leave_pos];
        Cell& out = basis_[leave];
        in_basis_[out.row * m_ + out.col] = -1;
        out = {er, ec, theta};
        in_basis_[entering] = static_cast<long>(leave);
        return theta;
    }

    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    const Matrix& c_;
    std::size_t n_, m_;
    double eps_ = 0.0;
    std::vector<Cell> basis_;
    std::vector<long> in_basis_;
    std::vector<std::size_t> adj_start_, adj_, parent_edge_, depth_, queue_, path_, tail_;
    std::vector<double> pot_;
    std::size_t next_price_ = 0;
};

void check_marginal(std::span<const double> w, const char* name) {
    for (double v : w)
        if (!std::isfinite(v) || v < 0.0)
            throw DomainError(std::string(name) + " has a negative or non-finite weight");
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double plan_cost(const Matrix& plan, const Matrix& cost) {
    double s = 0.0;
    for (std::size_t i = 0; i < plan.rows(); ++i)
        for (std::size_t j = 0; j < plan.cols(); ++j)
            if (plan(i, j) != 0.0) s += plan(i, j) * cost(i, j);
    return s;
}

}  // namespace

TransportSolution solve_mk(const Matrix& cost, std::span<const double> mu, std::span<const double> nu) {
    if (cost.rows() != mu.size() || cost.cols() != nu.size()) {
        std::ostringstream msg;
        msg << "cost is " << cost.rows() << "x" << cost.cols() << " but marginals have sizes " << mu.size()
            << " and " << nu.size();
        throw DimensionError(msg.str());
    }
    if (mu.empty() || nu.empty()) throw DimensionError("empty marginal");
    for (double v : cost.data())
        if (!std::isfinite(v)) throw DomainError("cost matrix has a non-finite entry");
    check_marginal(mu, "source");
    check_marginal(nu, "target");
    const double mass_mu = std::accumulate(mu.begin(), mu.end(), 0.0);
    const double mass_nu = std::accumulate(nu.begin(), nu.end(), 0.0);
    if (std::abs(mass_mu - mass_nu) > tol::mass)
        throw DomainError("source and target masses differ");

    std::vector<double> target(nu.begin(), nu.end());
    if (mass_nu > 0.0)
        for (double& t : target) t *= mass_mu / mass_nu;

    TransportSimplex simplex(cost, mu, target);
    TransportSolution sol;
    sol.iterations = simplex.run();
    sol.plan.entries = simplex.plan();
    sol.row_dual = simplex.row_duals();
    sol.col_dual = simplex.col_duals();
    sol.value = plan_cost(sol.plan.entries, cost);
    sol.potential.values = sol.row_dual;
    return sol;
}

TransportSolution solve_mk(const CostSpace& cost, const FiniteDistribution& mu, const FiniteDistribution& nu) {
    const std::size_t n = cost.size();
    if (mu.size() != n || nu.size() != n) throw DimensionError("marginals must match the cost space size");

    if (cost.is_metric() && mu == nu) {
        // k(mu, mu) = 0 with the diagonal coupling and the zero potential.
        TransportSolution sol;
        sol.plan.entries = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) sol.plan.entries(i, i) = mu[i];
        sol.potential.values.assign(n, 0.0);
        sol.row_dual.assign(n, 0.0);
        sol.col_dual.assign(n, 0.0);
        sol.lipschitz = true;
        return sol;
    }

    TransportSolution sol = solve_mk(cost.matrix(), mu.weights(), nu.weights());
    if (cost.is_metric()) {
        // c-transform of the column duals; 1-Lipschitz because each c(., k) is.
        std::vector<double> u(n, std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) u[i] = std::min(u[i], cost(i, k) - sol.col_dual[k]);
        const double shift = u[0];
        for (double& x : u) x -= shift;
        sol.potential.values = std::move(u);
        sol.lipschitz = true;
    }
    return sol;
}

OptimalityReport verify_optimal(const TransportSolution& sol, const CostSpace& cost,
                                const FiniteDistribution& mu, const FiniteDistribution& nu) {
    if (!sol.plan.feasible(mu.weights(), nu.weights()))
        throw InputError("plan is not a coupling of the given marginals");
    return verify_optimal(sol, cost);
}

OptimalityReport verify_optimal(const TransportSolution& sol, const CostSpace& cost) {
    if (!cost.is_metric()) throw DomainError("the Lipschitz optimality certificate needs a metric cost");
    const Matrix& plan = sol.plan.entries;
    const std::size_t n = cost.size();
    if (plan.rows() != n || plan.cols() != n || sol.potential.values.size() != n)
        throw DimensionError("plan or potential does not match the cost space");
    double mass = 0.0;
    for (double v : plan.data()) {
        if (!(v >= 0.0)) throw InputError("plan has a negative or non-finite entry");
        mass += v;
    }
    if (std::abs(mass - 1.0) > tol::marginal) throw InputError("plan does not have unit mass");

    OptimalityReport report;
    const auto& u = sol.potential.values;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double slack = u[i] - u[j] - cost(i, j);
            report.lipschitz_violation = std::max(report.lipschitz_violation, slack);
            if (slack > tol::gap) {
                std::ostringstream msg;
                msg << "Lipschitz bound fails at (" << i << "," << j << ") by " << slack;
                report.violations.push_back(msg.str());
            }
            if (plan(i, j) > 0.0) {
                const double gap = std::abs(slack);
                report.support_violation = std::max(report.support_violation, gap);
                if (gap > tol::gap) {
                    std::ostringstream msg;
                    msg << "potential not tight on plan support at (" << i << "," << j << "): U_i - U_j = "
                        << u[i] - u[j] << ", cost = " << cost(i, j);
                    report.violations.push_back(msg.str());
                }
            }
        }
    }
    report.optimal = report.violations.empty();
    return report;
}

double duality_gap(const TransportSolution& sol, std::span<const double> mu, std::span<const double> nu) {
    if (sol.lipschitz) {
        const auto& u = sol.potential.values;
        if (u.size() != mu.size() || u.size() != nu.size()) throw DimensionError("potential size mismatch");
        double dual = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) dual += u[i] * (mu[i] - nu[i]);
        return sol.value - dual;
    }
    if (sol.row_dual.size() != mu.size() || sol.col_dual.size() != nu.size())
        throw DimensionError("dual size mismatch");
    return sol.value - (dot(sol.row_dual, mu) + dot(sol.col_dual, nu));
}

double solve_kp(const CostSpace& cost, const FiniteDistribution& mu, const FiniteDistribution& nu, double p) {
    if (!(p >= 1.0)) throw DomainError("k_p needs p >= 1");
    if (p == 1.0) return solve_mk(cost, mu, nu).value;
    Matrix powered = cost.matrix();
    for (std::size_t i = 0; i < powered.rows(); ++i)
        for (double& v : powered.row(i)) v = std::pow(v, p);
    const double v = solve_mk(powered, mu.weights(), nu.weights()).value;
    return std::pow(v, 1.0 / p);
}

}  // namespace mk
