#include "mk/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mk/errors.hpp"

namespace mk::io {

namespace {

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed ") + what + " JSON: " + e.what());
    }
}

const json& field(const json& j, const char* key) {
    if (!j.is_object()) throw InputError("expected a JSON object");
    auto it = j.find(key);
    if (it == j.end()) throw InputError(std::string("missing field \"") + key + "\"");
    return *it;
}

Matrix matrix_of(const json& j, const char* key) {
    auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw DimensionError(std::string("\"") + key + "\" is empty");
    for (const auto& r : rows)
        if (r.size() != rows.front().size()) throw DimensionError(std::string("\"") + key + "\" rows differ in length");
    return Matrix::from_rows(rows);
}

json matrix_json(const Matrix& m) { return m.to_rows(); }

double parse_number(const std::string& token, std::size_t line) {
    std::size_t a = token.find_first_not_of(" \t\r");
    std::size_t b = token.find_last_not_of(" \t\r");
    if (a == std::string::npos) throw InputError("empty CSV field on line " + std::to_string(line));
    const std::string t = token.substr(a, b - a + 1);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw InputError("bad number '" + t + "' on CSV line " + std::to_string(line));
    return x;
}

// Splits CSV data lines into numeric fields. A non-numeric first line is taken as a header.
std::vector<std::vector<double>> numeric_rows(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string text;
    std::size_t line = 0;
    bool first = true;
    while (std::getline(in, text)) {
        ++line;
        const auto start = text.find_first_not_of(" \t\r");
        if (start == std::string::npos || text[start] == '#') continue;
        const bool header_allowed = first;
        first = false;
        std::vector<std::string> tokens;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) tokens.push_back(tok);
        std::vector<double> row;
        try {
            for (const auto& t : tokens) row.push_back(parse_number(t, line));
        } catch (const InputError&) {
            if (header_allowed) continue;
            throw;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

json read_json_file(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError("cannot parse " + path + ": " + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

Instance instance_from_json(const json& j) {
    return guarded("instance", [&] {
        CostSpace cost = cost_from_json(j);
        FiniteDistribution mu(field(j, "mu").get<std::vector<double>>());
        FiniteDistribution nu(field(j, "nu").get<std::vector<double>>());
        if (mu.size() != cost.size() || nu.size() != cost.size())
            throw DimensionError("marginals do not match the cost matrix");
        return Instance{std::move(cost), std::move(mu), std::move(nu)};
    });
}

CostSpace cost_from_json(const json& j) {
    return guarded("instance", [&] {
        Matrix c = matrix_of(field(j, "cost"), "cost");
        if (j.contains("n") && j.at("n").get<std::size_t>() != c.rows())
            throw DimensionError("\"n\" does not match the cost matrix");
        const bool metric = j.contains("metric") && j.at("metric").get<bool>();
        return CostSpace(std::move(c), metric);
    });
}

json to_json(const Instance& inst) {
    return json{{"n", inst.cost.size()},
                {"cost", matrix_json(inst.cost.matrix())},
                {"mu", std::vector<double>(inst.mu.weights().begin(), inst.mu.weights().end())},
                {"nu", std::vector<double>(inst.nu.weights().begin(), inst.nu.weights().end())},
                {"metric", inst.cost.is_metric()}};
}

SignedMeasure signed_measure_from_json(const json& j) {
    return guarded("signed measure", [&] {
        SignedMeasure m{field(j, "weights").get<std::vector<double>>()};
        for (double w : m.weights)
            if (!std::isfinite(w)) throw DomainError("signed measure weights must be finite");
        return m;
    });
}

json to_json(const SignedMeasure& m) { return json{{"weights", m.weights}}; }

json solution_to_json(const TransportSolution& sol, double gap) {
    json j{{"value", sol.value}, {"plan", matrix_json(sol.plan.entries)}, {"gap", gap}};
    if (sol.lipschitz) {
        j["potential"] = sol.potential.values;
    } else {
        j["potential"] = sol.row_dual;
        j["col_dual"] = sol.col_dual;
    }
    return j;
}

TransportSolution solution_from_json(const json& j) {
    return guarded("solution", [&] {
        TransportSolution sol;
        sol.value = field(j, "value").get<double>();
        sol.plan.entries = matrix_of(field(j, "plan"), "plan");
        auto potential = field(j, "potential").get<std::vector<double>>();
        if (j.contains("col_dual")) {
            sol.lipschitz = false;
            sol.row_dual = std::move(potential);
            sol.col_dual = j.at("col_dual").get<std::vector<double>>();
        } else {
            sol.lipschitz = true;
            sol.potential.values = potential;
            sol.row_dual = potential;
            sol.col_dual.resize(potential.size());
            for (std::size_t k = 0; k < potential.size(); ++k) sol.col_dual[k] = -potential[k];
        }
        return sol;
    });
}

std::string plan_csv(const TransportPlan& plan) {
    std::string out = "row,col,mass\n";
    for (std::size_t i = 0; i < plan.entries.rows(); ++i)
        for (std::size_t k = 0; k < plan.entries.cols(); ++k)
            if (plan.entries(i, k) > 0.0)
                out += std::to_string(i) + "," + std::to_string(k) + "," + format_double(plan.entries(i, k)) + "\n";
    return out;
}

LineDistribution line_from_csv(std::istream& in) {
    std::vector<double> pos, w;
    for (const auto& row : numeric_rows(in)) {
        if (row.size() != 2) throw InputError("line CSV rows must be position,weight");
        pos.push_back(row[0]);
        w.push_back(row[1]);
    }
    if (pos.empty()) throw InputError("line CSV has no atoms");
    return LineDistribution(std::move(pos), std::move(w));
}

json kr_to_json(double norm, const LipschitzDual& dual) {
    return json{{"norm", norm}, {"dual", dual.value}, {"witness", dual.witness.values}};
}

Matrix matrix_from_json(const json& j) {
    return guarded("cost matrix", [&] { return j.is_object() ? matrix_of(field(j, "cost"), "cost") : matrix_of(j, "cost"); });
}

Matrix matrix_from_csv(std::istream& in) {
    auto rows = numeric_rows(in);
    if (rows.empty()) throw DimensionError("cost CSV is empty");
    for (const auto& r : rows)
        if (r.size() != rows.front().size()) throw DimensionError("cost CSV rows differ in length");
    return Matrix::from_rows(rows);
}

json to_json(const Assignment& a) { return json{{"value", a.value}, {"permutation", a.permutation}}; }

Assignment assignment_from_json(const json& j) {
    return guarded("assignment", [&] {
        return Assignment{field(j, "permutation").get<std::vector<std::size_t>>(), field(j, "value").get<double>()};
    });
}

json to_json(const ConvergenceReport& r) {
    json j{{"n_grid", r.n_grid},
           {"trials", r.trials},
           {"estimates", r.estimates},
           {"exact", r.exact ? json(*r.exact) : json(nullptr)},
           {"seed", r.seed}};
    if (r.nested) j["nested"] = *r.nested;
    return j;
}

ConvergenceReport report_from_json(const json& j) {
    return guarded("report", [&] {
        ConvergenceReport r;
        r.n_grid = field(j, "n_grid").get<std::vector<std::size_t>>();
        r.trials = field(j, "trials").get<std::size_t>();
        r.estimates = field(j, "estimates").get<std::vector<std::vector<double>>>();
        const auto& exact = field(j, "exact");
        if (!exact.is_null()) r.exact = exact.get<double>();
        r.seed = field(j, "seed").get<std::uint64_t>();
        if (j.contains("nested")) r.nested = j.at("nested").get<std::vector<double>>();
        if (r.estimates.size() != r.n_grid.size()) throw DimensionError("estimates do not match n_grid");
        for (const auto& row : r.estimates)
            if (row.size() != r.trials) throw DimensionError("estimate rows do not match trials");
        return r;
    });
}

std::string report_csv(const ConvergenceReport& r) {
    std::string out = "n,trial,estimate\n";
    for (std::size_t g = 0; g < r.n_grid.size(); ++g)
        for (std::size_t t = 0; t < r.trials; ++t)
            out += std::to_string(r.n_grid[g]) + "," + std::to_string(t) + "," + format_double(r.estimates[g][t]) + "\n";
    return out;
}

MarkovChain chain_from_json(const json& j) {
    return guarded("chain", [&] {
        Matrix p = matrix_of(field(j, "transition"), "transition");
        if (j.contains("states") && j.at("states").get<std::size_t>() != p.rows())
            throw DimensionError("\"states\" does not match the transition matrix");
        std::optional<std::vector<double>> pi;
        if (j.contains("stationary") && !j.at("stationary").is_null()) pi = j.at("stationary").get<std::vector<double>>();
        return MarkovChain(std::move(p), std::move(pi));
    });
}

json to_json(const MarkovChain& c) {
    const auto w = c.stationary().weights();
    return json{{"states", c.states()},
                {"transition", matrix_json(c.transition())},
                {"stationary", std::vector<double>(w.begin(), w.end())}};
}

std::string curve_csv(const std::vector<std::size_t>& horizons, const std::vector<double>& values) {
    std::string out = "n,value\n";
    for (std::size_t k = 0; k < horizons.size(); ++k)
        out += std::to_string(horizons[k]) + "," + format_double(values[k]) + "\n";
    return out;
}

PartitionTree tree_from_json(const json& j) {
    return guarded("tree", [&] {
        FiniteDistribution masses(field(j, "masses").get<std::vector<double>>());
        if (j.contains("leaves") && j.at("leaves").get<std::size_t>() != masses.size())
            throw DimensionError("\"leaves\" does not match the masses");
        Matrix c = matrix_of(field(j, "base_cost"), "base_cost");
        auto levels = field(j, "levels").get<std::vector<std::vector<std::size_t>>>();
        // The base cost is a metric or semimetric by contract; the flag records whether it was checked.
        const bool metric = validate_metric(c).valid();
        return PartitionTree(std::move(masses), CostSpace(std::move(c), metric), std::move(levels));
    });
}

json to_json(const PartitionTree& t) {
    const auto w = t.masses().weights();
    return json{{"leaves", t.leaves()},
                {"masses", std::vector<double>(w.begin(), w.end())},
                {"base_cost", matrix_json(t.base_cost().matrix())},
                {"levels", t.levels()}};
}

std::string levels_csv(const std::vector<std::size_t>& levels, const std::vector<double>& values) {
    std::string out = "level,value\n";
    for (std::size_t k = 0; k < levels.size(); ++k)
        out += std::to_string(levels[k]) + "," + format_double(values[k]) + "\n";
    return out;
}

}  // namespace mk::io
