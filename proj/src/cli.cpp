#include "qcheck/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "qcheck/frontends.hpp"
#include "qcheck/generator.hpp"
#include "qcheck/ql.hpp"

namespace qcheck {

namespace {

struct AnalysisConfig {
    std::string command;
    std::string system_path;
    std::string property_path;
    std::size_t bound = 0;
    std::optional<unsigned> unfoldings;
    bool show_model = false;
    bool verbose = false;
    std::string solver;
    double timeout = 30.0;
    std::string csv;
};

void check_atomics(const Formula& f, const System& sys) {
    switch (f.kind()) {
    case Formula::Kind::True:
        return;
    case Formula::Kind::Atomic:
        for (const auto& v : free_variables(f.psi()))
            if (sys.attribute(v) == nullptr) throw ParseError("undeclared attribute '" + v + "'", f.span());
        return;
    case Formula::Kind::Not:
    case Formula::Kind::Possib:
    case Formula::Kind::Nec:
        check_atomics(f.left(), sys);
        return;
    default:
        check_atomics(f.left(), sys);
        check_atomics(f.right(), sys);
    }
}

std::string csv_verdict(const Verdict& v) {
    switch (v.outcome) {
    case Verdict::Outcome::ModelFound:
        return "sat";
    case Verdict::Outcome::NoModelWithinBound:
        return "no-model";
    case Verdict::Outcome::CounterexampleFound:
        return "counterexample";
    case Verdict::Outcome::NoCounterexampleWithinBound:
        return "no-counterexample";
    }
    return "";
}

int analyse(const AnalysisConfig& cfg, std::ostream& out, std::ostream& err) {
    const System sys = parse_qosfsa(read_text_file(cfg.system_path), cfg.system_path);
    const Formula phi = parse_ql(read_text_file(cfg.property_path), cfg.property_path);
    check_atomics(phi, sys);
    for (const auto& a : sys.attributes)
        if (!is_order_insensitive(a.op))
            err << "warning: attribute " << a.name << " aggregates with '" << a.op
                << "', the result depends on the order of states along a run\n";

    SolverHandle solver(cfg.solver.empty() ? default_solver_command() : cfg.solver,
                        std::chrono::milliseconds(static_cast<long long>(cfg.timeout * 1000)));
    CheckerOptions opts;
    opts.bound = cfg.bound;
    opts.unfoldings = cfg.unfoldings;
    if (cfg.verbose)
        opts.on_length = [&out](std::size_t length, std::size_t runs) {
            out << "length " << length << ": " << runs << " runs\n";
        };
    Checker checker(sys, solver, opts);
    const auto t0 = std::chrono::steady_clock::now();
    const Verdict v = cfg.command == "validity" ? checker.q_valid(phi) : checker.q_sat(phi);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);

    out << verdict_line(v) << "\n";
    if (cfg.show_model && v.run) {
        out << (v.outcome == Verdict::Outcome::ModelFound ? "model" : "counterexample") << " (" << v.run->length()
            << " steps):\n";
        for (std::size_t i = 0; i < v.run->steps.size(); ++i)
            out << "  " << (i + 1) << ". " << v.run->steps[i].action.to_string() << "\n";
        out << "final configuration: " << to_string(v.run->last()) << "\n";
    }
    if (!cfg.csv.empty()) {
        namespace fs = std::filesystem;
        std::error_code ec;
        const bool fresh = !fs::exists(cfg.csv, ec) || fs::file_size(cfg.csv, ec) == 0;
        std::ofstream csv(cfg.csv, std::ios::app);
        if (!csv) {
            err << cfg.csv << ": cannot write statistics\n";
            return kExitInput;
        }
        if (fresh) csv << "k,u,runs,queries,cache_hits,ms,verdict\n";
        csv << v.bound << "," << v.unfoldings << "," << v.stats.runs << "," << v.stats.queries << ","
            << v.stats.cache_hits << "," << ms.count() << "," << csv_verdict(v) << "\n";
    }
    return kExitOk;
}

int project_cmd(const std::string& in, const std::string& out_path, std::ostream& out) {
    const QGChor qg = parse_qosgc(read_text_file(in), in);
    const System sys = project(qg);
    std::ofstream f(out_path);
    if (!f) throw ParseError("cannot write file", SourceSpan{out_path, 0, 0, 0});
    f << serialize_qosfsa(sys);
    out << "wrote " << out_path << " (" << sys.machines.size() << " machines)\n";
    return kExitOk;
}

int gen_cmd(unsigned n, std::uint64_t seed, const std::string& dir, std::ostream& out) {
    namespace fs = std::filesystem;
    const NestedChoices nc = gen_nested_choices(n, seed);
    std::error_code ec;
    fs::create_directories(dir, ec);
    const std::string stem = (fs::path(dir) / ("nested" + std::to_string(n))).string();
    const System sys = project(parse_qosgc(nc.qosgc));
    const std::pair<std::string, std::string> files[] = {
        {stem + ".qosgc", nc.qosgc}, {stem + ".ql", nc.ql}, {stem + ".qosfsa", serialize_qosfsa(sys)}};
    for (const auto& [path, text] : files) {
        std::ofstream f(path);
        if (!f) throw ParseError("cannot write file", SourceSpan{path, 0, 0, 0});
        f << text;
        out << "wrote " << path << "\n";
    }
    out << "chosen leaf: leaf" << nc.chosen_leaf << "\n";
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bounded model checker for QoS properties of communicating systems", "qcheck"};
    app.require_subcommand(1);

    AnalysisConfig cfg;
    unsigned unfoldings = 0;
    auto add_analysis = [&](const std::string& name, const std::string& help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("system", cfg.system_path, "system (.qosfsa)")->required();
        sub->add_option("property", cfg.property_path, "property (.ql)")->required();
        sub->add_option("k", cfg.bound, "maximum run length")->required();
        sub->add_option("--unfoldings", unfoldings, "loop unfoldings inside until indices (default k)");
        sub->add_flag("--show-model", cfg.show_model, "print the model or counterexample run");
        sub->add_flag("--verbose", cfg.verbose, "print the number of runs of each length");
        sub->add_option("--solver", cfg.solver, "solver command line (default $QCHECK_SOLVER or 'z3 -in')");
        sub->add_option("--timeout", cfg.timeout, "per-query solver timeout in seconds")
            ->check(CLI::PositiveNumber);
        sub->add_option("--csv", cfg.csv, "append statistics to a CSV file");
        return sub;
    };
    CLI::App* sat = add_analysis("satisfiability", "search a run satisfying the property");
    CLI::App* val = add_analysis("validity", "search a counterexample to the property");

    std::string proj_in, proj_out;
    CLI::App* proj = app.add_subcommand("project", "project an annotated g-choreography onto qCFSMs");
    proj->add_option("input", proj_in, "choreography (.qosgc)")->required();
    proj->add_option("-o", proj_out, "output system (.qosfsa)")->required();

    unsigned gen_n = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_dir;
    CLI::App* gen = app.add_subcommand("gen", "generate benchmark inputs");
    gen->require_subcommand(1);
    CLI::App* nested = gen->add_subcommand("nested-choices", "nested-choice choreography and property");
    nested->add_option("n", gen_n, "nesting depth")->required()->check(CLI::Range(1u, 16u));
    nested->add_option("--seed", gen_seed, "random seed")->required();
    nested->add_option("-o", gen_dir, "output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sat->parsed() || val->parsed()) {
            cfg.command = sat->parsed() ? "satisfiability" : "validity";
            if ((sat->parsed() ? sat : val)->count("--unfoldings") > 0) cfg.unfoldings = unfoldings;
            return analyse(cfg, out, err);
        }
        if (proj->parsed()) return project_cmd(proj_in, proj_out, out);
        if (nested->parsed()) return gen_cmd(gen_n, gen_seed, gen_dir, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ProjectionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const GChorError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const AggregationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}

}  // namespace qcheck
