#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mk/assignment.hpp"
#include "mk/errors.hpp"
#include "mk/transport.hpp"
#include "oracles.hpp"

using namespace mk;

namespace {

Matrix random_matrix(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (double& x : c.row(i)) x = u(rng);
    return c;
}

bool is_permutation(const std::vector<std::size_t>& p) {
    std::vector<std::size_t> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        if (sorted[i] != i) return false;
    return true;
}

const auto kAbs = [](double x, double y) { return std::abs(x - y); };

}  // namespace

TEST_CASE("solve_assignment examples") {
    Matrix identity_friendly{{0, 2, 3}, {1, 0, 4}, {5, 6, 0}};
    auto a = solve_assignment(identity_friendly);
    CHECK(a.value == 0.0);
    CHECK(a.permutation == std::vector<std::size_t>{0, 1, 2});

    auto one = solve_assignment(Matrix{{4.5}});
    CHECK(one.permutation == std::vector<std::size_t>{0});
    CHECK(one.value == 4.5);

    std::mt19937_64 rng(42);
    auto c = random_matrix(5, rng);
    const double brute = oracle::assignment_by_permutations(c);
    auto sol = solve_assignment(c);
    CHECK(std::abs(sol.value - brute) <= 1e-12);
    CHECK(is_permutation(sol.permutation));

    CHECK_THROWS_AS(solve_assignment(Matrix(2, 3)), DimensionError);
    CHECK(solve_assignment(Matrix()).permutation.empty());
}

TEST_CASE("solve_assignment matches permutation enumeration") {
    std::mt19937_64 rng(9);
    for (std::size_t n = 1; n <= 7; ++n)
        for (int rep = 0; rep < 10; ++rep) {
            auto c = random_matrix(n, rng);
            if (rep % 3 == 0)  // ties
                for (std::size_t i = 0; i < n; ++i)
                    for (double& x : c.row(i)) x = std::round(x * 3.0);
            auto sol = solve_assignment(c);
            CHECK(is_permutation(sol.permutation));
            CHECK(std::abs(sol.value - oracle::assignment_by_permutations(c)) <= 1e-12);
            double recomputed = 0.0;
            for (std::size_t i = 0; i < n; ++i) recomputed += c(i, sol.permutation[i]);
            CHECK(std::abs(recomputed - sol.value) <= tol::objective);
        }
}

TEST_CASE("assignment value shifts with row and column constants") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> k(-2.0, 2.0);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rng() % 30;
        auto c = random_matrix(n, rng);
        auto base = solve_assignment(c);
        const std::size_t r = rng() % n;
        const double shift = k(rng);
        Matrix moved = c;
        if (rep % 2)
            for (double& x : moved.row(r)) x += shift;
        else
            for (std::size_t i = 0; i < n; ++i) moved(i, r) += shift;
        auto after = solve_assignment(moved);
        CHECK(std::abs(after.value - (base.value + shift)) <= 1e-9);
        // The old optimum is still optimal after the shift.
        double old_perm_cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) old_perm_cost += moved(i, base.permutation[i]);
        CHECK(std::abs(old_perm_cost - after.value) <= 1e-9);
    }
}

TEST_CASE("Birkhoff: assignment equals transport on uniform marginals") {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 15; ++rep) {
        const std::size_t n = 1 + rng() % 60;
        auto c = random_matrix(n, rng);
        const auto uniform = empirical_distribution(n);
        const double lp = solve_mk(c, uniform.weights(), uniform.weights()).value;
        CHECK(std::abs(solve_assignment(c).value / static_cast<double>(n) - lp) <= 1e-9);
    }
}

TEST_CASE("permutation-induced plans never beat the transport optimum") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 2 + rng() % 20;
        auto c = random_matrix(n, rng);
        const auto uniform = empirical_distribution(n);
        const double k = solve_mk(c, uniform.weights(), uniform.weights()).value;
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (int s = 0; s < 20; ++s) {
            std::shuffle(perm.begin(), perm.end(), rng);
            double induced = 0.0;
            for (std::size_t i = 0; i < n; ++i) induced += c(i, perm[i]) / static_cast<double>(n);
            CHECK(induced >= k - 1e-12);
        }
    }
}

TEST_CASE("strong_mk_empirical examples") {
    std::vector<double> xs{0.1, 0.5, 0.9};
    CHECK(strong_mk_empirical(xs, xs, kAbs) == 0.0);
    CHECK(strong_mk_empirical(std::vector<double>{0.2}, std::vector<double>{0.7}, kAbs) == doctest::Approx(0.5));
    CHECK_THROWS_AS(strong_mk_empirical(xs, std::vector<double>{0.1}, kAbs), InputError);
    CHECK_THROWS_AS(strong_mk_empirical(std::vector<double>{}, std::vector<double>{}, kAbs), InputError);

    std::mt19937_64 rng(100);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> a(100), b(100);
    for (auto& x : a) x = u(rng);
    for (auto& y : b) y = u(rng);
    Matrix c(100, 100);
    for (std::size_t i = 0; i < 100; ++i)
        for (std::size_t j = 0; j < 100; ++j) c(i, j) = std::abs(a[i] - b[j]);
    const auto uniform = empirical_distribution(100);
    const double lp = solve_mk(c, uniform.weights(), uniform.weights()).value;
    CHECK(std::abs(strong_mk_empirical(a, b, kAbs) - lp) <= 1e-9);
}
