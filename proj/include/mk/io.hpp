#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mk/assignment.hpp"
#include "mk/dbar.hpp"
#include "mk/kr_norm.hpp"
#include "mk/line.hpp"
#include "mk/matrix_distribution.hpp"
#include "mk/tower.hpp"
#include "mk/transport.hpp"

namespace mk::io {

using nlohmann::json;

/// Reads and parses a JSON file. InputError on I/O or syntax errors.
json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

struct Instance {
    CostSpace cost;
    FiniteDistribution mu;
    FiniteDistribution nu;
};

/// `{"n", "cost", "mu", "nu", "metric"}`; "metric" defaults to false, "n" is checked when present.
Instance instance_from_json(const json& j);
json to_json(const Instance& inst);
/// Only the "cost" and "metric" fields of an instance.
CostSpace cost_from_json(const json& j);

SignedMeasure signed_measure_from_json(const json& j);
json to_json(const SignedMeasure& m);

/// `{"value", "plan", "potential", "gap"}`. Non-Lipschitz solutions also carry "col_dual",
/// with "potential" holding the row duals.
json solution_to_json(const TransportSolution& sol, double gap);
TransportSolution solution_from_json(const json& j);
/// One `row,col,mass` line per positive plan entry.
std::string plan_csv(const TransportPlan& plan);

/// `position,weight` lines; a header line, blank lines and '#' comments are skipped.
LineDistribution line_from_csv(std::istream& in);

json kr_to_json(double norm, const LipschitzDual& dual);

/// A cost matrix from `[[...]]` or `{"cost": [[...]]}`.
Matrix matrix_from_json(const json& j);
/// Comma-separated rows of numbers.
Matrix matrix_from_csv(std::istream& in);
json to_json(const Assignment& a);
Assignment assignment_from_json(const json& j);

json to_json(const ConvergenceReport& r);
ConvergenceReport report_from_json(const json& j);
/// `n,trial,estimate` rows.
std::string report_csv(const ConvergenceReport& r);

MarkovChain chain_from_json(const json& j);
json to_json(const MarkovChain& c);
/// `n,value` rows.
std::string curve_csv(const std::vector<std::size_t>& horizons, const std::vector<double>& values);

PartitionTree tree_from_json(const json& j);
json to_json(const PartitionTree& t);
/// `level,value` rows.
std::string levels_csv(const std::vector<std::size_t>& levels, const std::vector<double>& values);

}  // namespace mk::io
