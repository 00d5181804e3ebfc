#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mk/errors.hpp"
#include "mk/line.hpp"
#include "mk/transport.hpp"
#include "oracles.hpp"

using namespace mk;

namespace {

LineDistribution dirac_at(double x) { return LineDistribution({x}, {1.0}); }

LineDistribution random_line(std::size_t atoms, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> pos(atoms);
    for (auto& x : pos) x = u(rng);
    std::sort(pos.begin(), pos.end());
    return LineDistribution(pos, oracle::random_weights(atoms, rng, 0.1));
}

double via_transport(const LineDistribution& a, const LineDistribution& b) {
    return solve_mk(line_cost(a, b), a.weights().weights(), b.weights().weights()).value;
}

}  // namespace

TEST_CASE("k1_line examples") {
    for (double t : {0.0, 0.25, 0.7, 1.0}) CHECK(k1_line(dirac_at(0.0), dirac_at(t)) == doctest::Approx(t));
    LineDistribution a({0.1, 0.4, 0.9}, {0.2, 0.5, 0.3});
    CHECK(k1_line(a, a) == 0.0);

    LineDistribution ends({0.0, 1.0}, {0.5, 0.5});
    CHECK(k1_line(ends, dirac_at(0.5)) == doctest::Approx(0.5).epsilon(1e-15));
    // Cross-check on the 3-point discretization {0, 1/2, 1} with Euclidean costs.
    CostSpace three(Matrix{{0, 0.5, 1}, {0.5, 0, 0.5}, {1, 0.5, 0}}, true);
    const double exact = solve_mk(three, FiniteDistribution({0.5, 0, 0.5}), FiniteDistribution({0, 1, 0})).value;
    CHECK(std::abs(exact - 0.5) <= 1e-12);
}

TEST_CASE("k1_line on Dirac pairs is the distance") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        const double x = u(rng), y = u(rng);
        CHECK(std::abs(k1_line(dirac_at(x), dirac_at(y)) - std::abs(x - y)) <= 1e-15);
    }
}

TEST_CASE("k1_line matches exact transport with |x - y| costs") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 40; ++t) {
        auto a = random_line(1 + rng() % 200, rng), b = random_line(1 + rng() % 200, rng);
        CHECK(std::abs(k1_line(a, b) - via_transport(a, b)) <= 1e-9);
    }
}

TEST_CASE("k1_line is translation covariant on interior supports") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 100; ++t) {
        auto a = random_line(1 + rng() % 30, rng, 0.2, 0.6), b = random_line(1 + rng() % 30, rng, 0.2, 0.6);
        const double shift = 0.3 * (static_cast<double>(rng() % 1000) / 1000.0) - 0.15;
        auto moved = [&](const LineDistribution& d) {
            std::vector<double> pos(d.positions().begin(), d.positions().end());
            for (auto& x : pos) x += shift;
            return LineDistribution(pos, {d.weights().weights().begin(), d.weights().weights().end()});
        };
        CHECK(std::abs(k1_line(a, b) - k1_line(moved(a), moved(b))) <= 1e-12);
    }
}

TEST_CASE("LineDistribution validation and merging") {
    CHECK_THROWS_AS(LineDistribution({0.5, 0.2}, {0.5, 0.5}), InputError);
    CHECK_THROWS_AS(LineDistribution({0.5, 1.2}, {0.5, 0.5}), InputError);
    CHECK_THROWS_AS(LineDistribution({0.5}, {0.5, 0.5}), DimensionError);
    CHECK_THROWS_AS(LineDistribution({0.1, 0.5}, {0.5, 0.6}), DomainError);
    LineDistribution merged({0.2, 0.2, 0.7}, {0.25, 0.25, 0.5});
    REQUIRE(merged.size() == 2);
    CHECK(merged.weights()[0] == 0.5);
    CHECK(k1_line(merged, LineDistribution({0.2, 0.7}, {0.5, 0.5})) == 0.0);
}

TEST_CASE("quantile_map examples") {
    LineDistribution a({0.1, 0.4, 0.9}, {0.2, 0.5, 0.3});
    auto id = quantile_map(a, a);
    REQUIRE(id.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(id[i].from == id[i].to);
        CHECK(id[i].mass == a.weights()[i]);
    }

    auto single = quantile_map(dirac_at(0.0), dirac_at(1.0));
    REQUIRE(single.size() == 1);
    CHECK(single[0].from == 0.0);
    CHECK(single[0].to == 1.0);
    CHECK(single[0].mass == 1.0);

    const double third = 1.0 / 3.0;
    auto shifted = quantile_map(LineDistribution({0, 0.5, 1}, {third, third, third}),
                                LineDistribution({0.25, 0.5, 0.75}, {third, third, third}));
    REQUIRE(shifted.size() == 3);
    CHECK(shifted[0].from == 0.0);
    CHECK(shifted[0].to == 0.25);
    CHECK(shifted[1].from == 0.5);
    CHECK(shifted[1].to == 0.5);
    CHECK(shifted[2].from == 1.0);
    CHECK(shifted[2].to == 0.75);
}

TEST_CASE("quantile_map pushes source weights onto the target and is optimal") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 50; ++t) {
        auto a = random_line(1 + rng() % 40, rng), b = random_line(1 + rng() % 40, rng);
        auto pairs = quantile_map(a, b);
        std::vector<double> out(b.size(), 0.0), in(a.size(), 0.0);
        double cost = 0.0;
        for (const auto& p : pairs) {
            const auto j = std::find(b.positions().begin(), b.positions().end(), p.to) - b.positions().begin();
            const auto i = std::find(a.positions().begin(), a.positions().end(), p.from) - a.positions().begin();
            out[static_cast<std::size_t>(j)] += p.mass;
            in[static_cast<std::size_t>(i)] += p.mass;
            cost += p.mass * std::abs(p.from - p.to);
        }
        for (std::size_t j = 0; j < b.size(); ++j) CHECK(std::abs(out[j] - b.weights()[j]) <= 1e-12);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(in[i] - a.weights()[i]) <= 1e-12);
        CHECK(std::abs(cost - k1_line(a, b)) <= 1e-12);
        for (std::size_t k = 1; k < pairs.size(); ++k) CHECK(pairs[k].to >= pairs[k - 1].to);
    }
}

TEST_CASE("discretized uniform against its square pushforward") {
    // Analytic value: integral of sqrt(t) - t over [0,1] = 1/6.
    auto uniform = discretize_quantile([](double u) { return u; }, 20000);
    auto square = discretize_quantile([](double u) { return u * u; }, 20000);
    CHECK(std::abs(k1_line(uniform, square) - 1.0 / 6.0) <= 1e-4);
}
