#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "mk/errors.hpp"
#include "mk/io.hpp"
#include "mk/random.hpp"

namespace {

using mk::io::json;

struct Global {
    std::string out = "-";
    std::uint64_t seed = mk::kDefaultSeed;
    std::string format;  // empty: the subcommand's default
};

void emit(const Global& g, const std::string& text) {
    if (g.out == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(g.out, std::ios::binary);
    if (!f) throw mk::InputError("cannot write " + g.out);
    f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_or(const Global& g, const std::string& fallback, std::initializer_list<const char*> allowed) {
    const std::string f = g.format.empty() ? fallback : g.format;
    for (const char* a : allowed)
        if (f == a) return f;
    throw mk::InputError("format '" + f + "' is not available for this subcommand");
}

bool ends_with(const std::string& s, const std::string& tail) {
    return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

mk::LineDistribution read_line(const std::string& path) {
    std::istringstream in(mk::io::read_text_file(path));
    return mk::io::line_from_csv(in);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kantorovich transport toolkit"};
    app.name("mktool");
    app.require_subcommand(1);
    Global g;
    app.add_option("--out", g.out, "Output path, - for standard output")->capture_default_str();
    app.add_option("--seed", g.seed, "Master seed for all randomness")->capture_default_str();
    app.add_option("--format", g.format, "json or csv (default depends on the subcommand)")
        ->check(CLI::IsMember({"json", "csv"}));

    std::function<void()> run;
    auto sub = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };

    // solve
    std::string instance_path, plan_csv_path;
    auto* solve = sub("solve", "Exact transport between the instance marginals");
    solve->add_option("--instance", instance_path, "Instance JSON")->required();
    solve->add_option("--plan-csv", plan_csv_path, "Also write the plan as row,col,mass CSV");
    solve->callback([&] {
        run = [&] {
            const auto fmt = format_or(g, "json", {"json", "csv"});
            const auto inst = mk::io::instance_from_json(mk::io::read_json_file(instance_path));
            const auto sol = mk::solve_mk(inst.cost, inst.mu, inst.nu);
            const double gap = mk::duality_gap(sol, inst.mu.weights(), inst.nu.weights());
            if (!plan_csv_path.empty()) emit(Global{plan_csv_path, g.seed, ""}, mk::io::plan_csv(sol.plan));
            emit(g, fmt == "json" ? dump(mk::io::solution_to_json(sol, gap)) : mk::io::plan_csv(sol.plan));
        };
    });

    // kp
    double power = 1.0;
    auto* kp = sub("kp", "Kantorovich distance of order p");
    kp->add_option("--instance", instance_path, "Instance JSON")->required();
    kp->add_option("--p", power, "Order p >= 1")->required();
    kp->callback([&] {
        run = [&] {
            format_or(g, "json", {"json"});
            const auto inst = mk::io::instance_from_json(mk::io::read_json_file(instance_path));
            emit(g, dump(json{{"p", power}, {"value", mk::solve_kp(inst.cost, inst.mu, inst.nu, power)}}));
        };
    });

    // line
    std::string mu_path, nu_path;
    auto* line = sub("line", "Closed-form distance between two distributions on [0,1]");
    line->add_option("--mu", mu_path, "position,weight CSV")->required();
    line->add_option("--nu", nu_path, "position,weight CSV")->required();
    line->callback([&] {
        run = [&] {
            format_or(g, "json", {"json"});
            emit(g, dump(json{{"k1", mk::k1_line(read_line(mu_path), read_line(nu_path))}}));
        };
    });

    // krnorm
    std::string measure_path;
    auto* krnorm = sub("krnorm", "Kantorovich-Rubinshtein norm of a zero-charge measure");
    krnorm->add_option("--measure", measure_path, "Signed measure JSON")->required();
    krnorm->add_option("--instance", instance_path, "Instance JSON supplying the metric")->required();
    krnorm->callback([&] {
        run = [&] {
            format_or(g, "json", {"json"});
            const auto m = mk::io::signed_measure_from_json(mk::io::read_json_file(measure_path));
            const auto cost = mk::io::cost_from_json(mk::io::read_json_file(instance_path));
            const double norm = mk::kr_norm(m, cost);
            emit(g, dump(mk::io::kr_to_json(norm, mk::lipschitz_dual(m, cost))));
        };
    });

    // assign
    std::string cost_path;
    auto* assign = sub("assign", "Optimal assignment for a square cost matrix");
    assign->add_option("--cost", cost_path, "Cost matrix, JSON or .csv")->required();
    assign->callback([&] {
        run = [&] {
            format_or(g, "json", {"json"});
            mk::Matrix c;
            if (ends_with(cost_path, ".csv")) {
                std::istringstream in(mk::io::read_text_file(cost_path));
                c = mk::io::matrix_from_csv(in);
            } else {
                c = mk::io::matrix_from_json(mk::io::read_json_file(cost_path));
            }
            emit(g, dump(mk::io::to_json(mk::solve_assignment(c))));
        };
    });

    // matdist
    std::string sampler = "uniform01", map_name = "identity";
    std::vector<std::size_t> n_grid{25, 50, 100, 200};
    std::size_t trials = 20;
    bool nested = false, serial = false;
    auto* matdist = sub("matdist", "Convergence of k_n on sampled (shifted) distance matrices");
    matdist->add_option("--mu", sampler, "uniform01, square, twopoint(p), dirac(x) or uniform(s)")->capture_default_str();
    matdist->add_option("--map", map_name, "identity or square")->capture_default_str();
    matdist->add_option("--n", n_grid, "Comma-separated sample sizes")->delimiter(',')->capture_default_str();
    matdist->add_option("--trials", trials, "Trials per sample size")->capture_default_str();
    matdist->add_flag("--nested", nested, "Also report leading blocks of one matrix");
    matdist->add_flag("--serial", serial, "Use the single-threaded reference");
    matdist->callback([&] {
        run = [&] {
            const auto fmt = format_or(g, "json", {"json", "csv"});
            const auto triple = mk::builtin_triple(sampler);
            const auto map = mk::MapSpec::parse(map_name);
            auto report = serial ? mk::run_convergence_serial(triple, map, n_grid, trials, g.seed)
                                 : mk::run_convergence(triple, map, n_grid, trials, g.seed);
            if (nested) report.nested = mk::nested_fragments(triple, map, n_grid, g.seed);
            emit(g, fmt == "json" ? dump(mk::io::to_json(report)) : mk::io::report_csv(report));
        };
    });

    // dbar
    std::string chain_path;
    std::vector<std::size_t> horizons{1, 2, 3, 4, 5, 6};
    double eps = 0.0;
    mk::EntropySearch search;
    auto* dbar = sub("dbar", "d-bar criterion, or the secondary entropy curve with --eps");
    dbar->add_option("--chain", chain_path, "Chain JSON")->required();
    dbar->add_option("--n", horizons, "Comma-separated horizons")->delimiter(',')->capture_default_str();
    dbar->add_option("--eps", eps, "Secondary entropy at this epsilon instead of d-bar");
    dbar->add_option("--atoms", search.max_atoms, "Entropy search: largest support")->capture_default_str();
    dbar->add_option("--grid", search.grid, "Entropy search: weight lattice 1/grid")->capture_default_str();
    dbar->callback([&] {
        run = [&] {
            const auto fmt = format_or(g, "csv", {"json", "csv"});
            const auto chain = mk::io::chain_from_json(mk::io::read_json_file(chain_path));
            const bool entropy = dbar->count("--eps") > 0;
            std::vector<double> values;
            if (entropy) {
                values = mk::secondary_entropy_curve(chain, horizons, eps, search);
            } else {
                for (std::size_t n : horizons) values.push_back(mk::dbar_criterion(chain, n));
            }
            if (fmt == "csv") {
                emit(g, mk::io::curve_csv(horizons, values));
            } else {
                json j{{"n", horizons}, {entropy ? "entropy" : "dbar", values}};
                if (entropy) j["eps"] = eps;
                emit(g, dump(j));
            }
        };
    });

    // tower
    std::string tree_path;
    std::size_t level = 0;
    auto* tower = sub("tower", "Spread of the quotient law at each level of a partition tree");
    tower->add_option("--tree", tree_path, "Tree JSON")->required();
    tower->add_option("--level", level, "Report only this level");
    tower->callback([&] {
        run = [&] {
            const auto fmt = format_or(g, "csv", {"json", "csv"});
            const auto tree = mk::io::tree_from_json(mk::io::read_json_file(tree_path));
            const auto spaces = mk::build_tower(tree);
            for (const auto& w : spaces.back().warnings) std::cerr << "warning: " << w << "\n";
            std::vector<std::size_t> levels;
            std::vector<double> values;
            if (tower->count("--level")) {
                if (level > tree.depth()) throw mk::DimensionError("level exceeds the tree depth");
                levels.push_back(level);
                values.push_back(mk::spread(spaces[level]));
            } else {
                for (std::size_t k = 0; k < spaces.size(); ++k) {
                    levels.push_back(k);
                    values.push_back(mk::spread(spaces[k]));
                }
            }
            emit(g, fmt == "csv" ? mk::io::levels_csv(levels, values) : dump(json{{"level", levels}, {"value", values}}));
        };
    });

    // verify
    std::string solution_path;
    double tolerance = mk::tol::gap;
    auto* verify = sub("verify", "Check a transport solution against its instance");
    verify->add_option("--instance", instance_path, "Instance JSON")->required();
    verify->add_option("--solution", solution_path, "Solution JSON")->required();
    verify->add_option("--tolerance", tolerance, "Largest accepted dual violation")->capture_default_str();
    verify->callback([&] {
        run = [&] {
            format_or(g, "json", {"json"});
            const auto inst = mk::io::instance_from_json(mk::io::read_json_file(instance_path));
            const auto sol = mk::io::solution_from_json(mk::io::read_json_file(solution_path));
            const auto r = mk::verify_optimal(sol, inst.cost, inst.mu, inst.nu);
            const bool ok = r.lipschitz_violation <= tolerance && r.support_violation <= tolerance;
            emit(g, dump(json{{"optimal", ok},
                              {"lipschitz_violation", r.lipschitz_violation},
                              {"support_violation", r.support_violation},
                              {"violations", r.violations}}));
        };
    });

    if (argc > 1 && argv[1][0] != '-') {
        const auto subs = app.get_subcommands([](const CLI::App*) { return true; });
        const bool known = std::any_of(subs.begin(), subs.end(), [&](const CLI::App* s) { return s->get_name() == argv[1]; });
        if (!known) {
            std::cerr << "error: unknown subcommand '" << argv[1] << "'\n\n" << app.help();
            return 2;
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        run();
    } catch (const mk::ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const mk::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
