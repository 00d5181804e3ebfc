#include "mk/matrix_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <regex>
#include <sstream>

#include "mk/assignment.hpp"
#include "mk/random.hpp"

namespace mk {

namespace {

SampledTriple quantile_triple(std::function<double(double)> q, std::string description) {
    SampledTriple t;
    t.quantile = q;
    t.sampler = [q](std::uint64_t seed, std::uint64_t index) { return q(uniform_draw(seed, index)); };
    t.metric = [](double x, double y) { return std::abs(x - y); };
    t.description = std::move(description);
    t.unit_line = true;
    return t;
}

void check_grid(const std::vector<std::size_t>& n_grid, std::size_t trials) {
    if (n_grid.empty()) throw InputError("n grid is empty");
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
        if (n_grid[k] == 0) throw InputError("n grid entries must be positive");
        if (k > 0 && n_grid[k] <= n_grid[k - 1]) throw InputError("n grid must be strictly ascending");
    }
    if (trials == 0) throw InputError("at least one trial is required");
}

ConvergenceReport empty_report(const SampledTriple& triple, const MapSpec& map,
                               const std::vector<std::size_t>& n_grid, std::size_t trials,
                               std::uint64_t master_seed) {
    check_grid(n_grid, trials);
    realize_map(triple, map);  // fail fast on unsupported pairs
    ConvergenceReport report;
    report.n_grid = n_grid;
    report.trials = trials;
    report.seed = master_seed;
    report.estimates.assign(n_grid.size(), std::vector<double>(trials, 0.0));
    report.exact = exact_line_reference(triple, map);
    return report;
}

double trial_estimate(const SampledTriple& triple, const MapSpec& map, std::size_t n, std::size_t trial,
                      std::uint64_t master_seed) {
    return k_n_estimate(shifted_matrix(triple, map, n, derive_seed(master_seed, n, trial)));
}

}  // namespace

SampledTriple uniform01_triple() {
    auto t = quantile_triple([](double u) { return u; }, "uniform01");
    t.cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    return t;
}

SampledTriple square_triple() {
    auto t = quantile_triple([](double u) { return u * u; }, "square");
    t.cdf = [](double x) { return std::sqrt(std::clamp(x, 0.0, 1.0)); };
    return t;
}

SampledTriple rescaled_uniform_triple(double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InputError("uniform scale must be positive");
    SampledTriple t;
    t.quantile = [scale](double u) { return scale * u; };
    t.cdf = [scale](double x) { return std::clamp(x / scale, 0.0, 1.0); };
    t.sampler = [scale](std::uint64_t seed, std::uint64_t index) { return scale * uniform_draw(seed, index); };
    t.metric = [scale](double x, double y) { return std::abs(x - y) / scale; };
    std::ostringstream name;
    name << "uniform(" << scale << ")";
    t.description = name.str();
    t.unit_line = scale == 1.0;
    return t;
}

SampledTriple twopoint_triple(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("twopoint probability must lie in [0,1]");
    std::ostringstream name;
    name << "twopoint(" << p << ")";
    auto t = quantile_triple([p](double u) { return u < 1.0 - p ? 0.0 : 1.0; }, name.str());
    t.continuous = false;
    return t;
}

SampledTriple dirac_triple(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw InputError("dirac position must lie in [0,1]");
    std::ostringstream name;
    name << "dirac(" << x << ")";
    auto t = quantile_triple([x](double) { return x; }, name.str());
    t.continuous = false;
    return t;
}

SampledTriple builtin_triple(const std::string& name) {
    if (name == "uniform01") return uniform01_triple();
    if (name == "square") return square_triple();
    static const std::regex call(R"(^\s*(twopoint|dirac|uniform)\(\s*([-+0-9.eE]+)\s*\)\s*$)");
    std::smatch m;
    if (std::regex_match(name, m, call)) {
        double arg = 0.0;
        try {
            arg = std::stod(m[2].str());
        } catch (const std::exception&) {
            throw InputError("bad numeric argument in sampler '" + name + "'");
        }
        if (m[1] == "twopoint") return twopoint_triple(arg);
        if (m[1] == "dirac") return dirac_triple(arg);
        return rescaled_uniform_triple(arg);
    }
    throw InputError("unknown sampler '" + name + "' (expected uniform01, square, twopoint(p), dirac(x), uniform(s))");
}

MapSpec MapSpec::parse(const std::string& name) {
    if (name == "identity") return identity();
    if (name == "square") return square();
    throw InputError("unknown map '" + name + "' (expected identity or square)");
}

std::function<double(double)> realize_map(const SampledTriple& triple, const MapSpec& map) {
    if (map.kind == MapSpec::Kind::identity) return [](double y) { return y; };
    if (!triple.continuous)
        throw UnsupportedPairError("no measure-preserving map '" + map.name + "' exists on the atomic law " +
                                   triple.description);
    if (map.kind == MapSpec::Kind::square) return [](double y) { return y * y; };
    if (!map.target) throw UnsupportedPairError("quantile map without a target law");
    if (!triple.cdf)
        throw UnsupportedPairError("quantile map needs the distribution function of " + triple.description);
    return [target = *map.target, cdf = triple.cdf](double y) { return target.quantile(cdf(y)); };
}

MatrixSample sample_matrix(const SampledTriple& triple, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InputError("matrix sample needs n >= 1");
    MatrixSample s;
    s.n = n;
    s.seed = seed;
    s.symmetric = triple.is_metric;
    s.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.points[i] = triple.sampler(seed, i);
    s.entries = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s.entries(i, j) = triple.metric(s.points[i], s.points[j]);
    return s;
}

MatrixSample shifted_matrix(const SampledTriple& triple, const MapSpec& map, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InputError("matrix sample needs n >= 1");
    if (map.kind == MapSpec::Kind::identity) return sample_matrix(triple, n, seed);
    const auto shift = realize_map(triple, map);
    MatrixSample s;
    s.n = n;
    s.seed = seed;
    s.symmetric = false;
    s.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.points[i] = triple.sampler(seed, i);
    std::vector<double> moved(n);
    for (std::size_t j = 0; j < n; ++j) moved[j] = shift(s.points[j]);
    s.entries = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s.entries(i, j) = triple.metric(s.points[i], moved[j]);
    return s;
}

double k_n_estimate(const MatrixSample& sample) {
    return solve_assignment(sample.entries).value / static_cast<double>(sample.entries.rows());
}

std::optional<double> exact_line_reference(const SampledTriple& triple, const MapSpec& map) {
    if (!triple.unit_line || !triple.quantile) return std::nullopt;
    const auto shift = realize_map(triple, map);
    const auto& q = triple.quantile;
    const auto source = discretize_quantile(q, kReferenceAtoms);
    const auto target = discretize_quantile([&](double u) { return shift(q(u)); }, kReferenceAtoms);
    return k1_line(source, target);
}

ConvergenceReport run_convergence(const SampledTriple& triple, const MapSpec& map,
                                  const std::vector<std::size_t>& n_grid, std::size_t trials,
                                  std::uint64_t master_seed) {
    auto report = empty_report(triple, map, n_grid, trials, master_seed);
    const long jobs = static_cast<long>(n_grid.size() * trials);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long job = 0; job < jobs; ++job) {
        const auto g = static_cast<std::size_t>(job) / trials, t = static_cast<std::size_t>(job) % trials;
        try {
            report.estimates[g][t] = trial_estimate(triple, map, n_grid[g], t, master_seed);
        } catch (...) {
#pragma omp critical(mk_convergence_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return report;
}

ConvergenceReport run_convergence_serial(const SampledTriple& triple, const MapSpec& map,
                                         const std::vector<std::size_t>& n_grid, std::size_t trials,
                                         std::uint64_t master_seed) {
    auto report = empty_report(triple, map, n_grid, trials, master_seed);
    for (std::size_t g = 0; g < n_grid.size(); ++g)
        for (std::size_t t = 0; t < trials; ++t)
            report.estimates[g][t] = trial_estimate(triple, map, n_grid[g], t, master_seed);
    return report;
}

std::vector<double> nested_fragments(const SampledTriple& triple, const MapSpec& map,
                                     const std::vector<std::size_t>& n_grid, std::uint64_t seed) {
    check_grid(n_grid, 1);
    // One stream: the largest matrix holds every prefix as its leading block.
    const auto full = shifted_matrix(triple, map, n_grid.back(), seed);
    std::vector<double> out;
    for (std::size_t n : n_grid) {
        Matrix block(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) block(i, j) = full.entries(i, j);
        out.push_back(solve_assignment(block).value / static_cast<double>(n));
    }
    return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InputError("KS statistic needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

std::vector<double> median_errors(const ConvergenceReport& report) {
    if (!report.exact) throw InputError("report has no exact reference value");
    std::vector<double> out;
    for (const auto& row : report.estimates) {
        std::vector<double> err;
        for (double v : row) err.push_back(std::abs(v - *report.exact));
        std::sort(err.begin(), err.end());
        const std::size_t k = err.size();
        out.push_back(k % 2 ? err[k / 2] : 0.5 * (err[k / 2 - 1] + err[k / 2]));
    }
    return out;
}

std::vector<double> exceedance_fractions(const ConvergenceReport& report, double threshold) {
    if (!report.exact) throw InputError("report has no exact reference value");
    std::vector<double> out;
    for (const auto& row : report.estimates) {
        std::size_t over = 0;
        for (double v : row) over += std::abs(v - *report.exact) > threshold;
        out.push_back(static_cast<double>(over) / static_cast<double>(row.size()));
    }
    return out;
}

}  // namespace mk
