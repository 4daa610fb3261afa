// Command-line front end: classification, Macro-3S planning, plan queries,
// the brute-force oracle, the two hardness reductions and instance generators.

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "threes/threes.hpp"

namespace {

using namespace threes;

constexpr int kUsage = 64;
constexpr int kDataError = 65;
constexpr int kNoInput = 66;
constexpr int kInternal = 70;

struct NoInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw NoInput("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw NoInput("cannot write " + path);
    out << text;
}

PlanningProblem load_problem(const std::string& path) {
    PlanningProblem p = parse_problem(slurp(path));
    auto diags = validate_problem(p);
    if (!diags.empty())
        throw ParseError(diags.front().message);
    return p;
}

std::string flags_text(const Classification& f) {
    std::string s;
    auto add = [&](bool on, const char* name) {
        if (!on)
            return;
        if (!s.empty())
            s += ",";
        s += name;
    };
    add(f.is_static, "static");
    add(f.is_symmetrically_reversible, "symmetrically-reversible");
    add(f.is_splitting, "splitting");
    return s.empty() ? "-" : s;
}

Json var_set_json(const VarSet& s, const PlanningProblem& p) {
    Json a = Json::array();
    for (VarId v : s.members())
        a.push_back(p.var_name(v));
    return a;
}

int cmd_classify(const std::string& in, bool json) {
    PlanningProblem p = load_problem(in);
    ThreeSReport r = is_3s(p);
    if (json) {
        Json j;
        j["accepted"] = r.accepted;
        if (!r.accepted)
            j["reason"] = r.reason;
        if (r.analysis) {
            Json vars = Json::array();
            for (std::uint32_t v = 0; v < p.var_count(); ++v) {
                const auto& f = r.analysis->flags[v];
                const auto& s = r.analysis->split[v];
                vars.push_back(Json{{"name", p.variables[v].name},
                                    {"static", f.is_static},
                                    {"symmetrically_reversible", f.is_symmetrically_reversible},
                                    {"splitting", f.is_splitting},
                                    {"Q0", var_set_json(s.q0, p)},
                                    {"Q1", var_set_json(s.q1, p)},
                                    {"V0", var_set_json(s.v0, p)},
                                    {"V1", var_set_json(s.v1, p)},
                                    {"depth", r.depth->depth_of[v]}});
            }
            j["variables"] = std::move(vars);
            j["depth"] = r.depth->d;
            j["depth_histogram"] = r.depth->c;
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (r.accepted ? "3S: yes" : "3S: no (" + r.reason + ")") << "\n";
        if (r.analysis) {
            for (std::uint32_t v = 0; v < p.var_count(); ++v)
                std::cout << p.variables[v].name << "\t" << flags_text(r.analysis->flags[v]) << "\tdepth "
                          << r.depth->depth_of[v] << "\n";
        }
    }
    return r.accepted ? 0 : 1;
}

int cmd_plan(const std::string& in, const std::string& out) {
    PlanningProblem p = load_problem(in);
    ThreeSReport r = is_3s(p);
    if (!r.accepted) {
        std::cerr << "not in 3S: " << r.reason << "\n";
        return 2;
    }
    PlanningProblem nf = normal_form(p);
    auto plan = macro_3s(nf, *r.analysis);
    if (!plan) {
        std::cerr << "no plan exists\n";
        return 1;
    }
    emit(out, dump_plan(*plan, &nf));
    return 0;
}

int cmd_validate(const std::string& problem_path, const std::string& plan_path, bool json) {
    PlanningProblem p = load_problem(problem_path);
    MacroPlan plan = parse_plan(slurp(plan_path), &p);
    ValidationReport r = validate(plan, p);
    if (json) {
        Json j{{"valid", r.valid}, {"steps_applied", r.steps_applied}, {"goal_reached", r.goal_reached}};
        if (r.failed_step)
            j["failed_step"] = r.failed_step;
        if (!r.message.empty())
            j["message"] = r.message;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (r.valid ? "valid" : "invalid: " + r.message) << "\n";
    }
    return r.valid ? 0 : 1;
}

int cmd_length(const std::string& in, bool json) {
    MacroPlan plan = parse_plan(slurp(in));
    BigCount len = plan_length(plan);
    if (json)
        std::cout << Json{{"length", len.str()}}.dump() << "\n";
    else
        std::cout << len << "\n";
    return 0;
}

int cmd_nth(const std::string& in, const std::string& index) {
    MacroPlan plan = parse_plan(slurp(in));
    BigCount i;
    try {
        i = BigCount(index);
    } catch (const std::exception&) {
        throw CLI::ValidationError("index", "not an integer: " + index);
    }
    std::cout << nth_operator(plan, i) << "\n";
    return 0;
}

int cmd_expand(const std::string& in, const std::string& out, std::optional<std::uint64_t> limit) {
    MacroPlan plan = parse_plan(slurp(in));
    if (out.empty() || out == "-") {
        write_expansion(std::cout, plan, limit);
        return 0;
    }
    std::ofstream f(out);
    if (!f)
        throw NoInput("cannot write " + out);
    write_expansion(f, plan, limit);
    return 0;
}

int cmd_oracle(const std::string& in, std::uint64_t max_states, const std::string& min_flips, bool json) {
    PlanningProblem p = load_problem(in);
    SearchBudget budget;
    budget.max_states = max_states;
    try {
        if (!min_flips.empty()) {
            auto v = p.find_variable(min_flips);
            if (!v)
                throw CLI::ValidationError("--min-flips", "unknown variable " + min_flips);
            auto flips = min_flip_count(p, *v, budget);
            if (json) {
                Json j{{"solvable", flips.has_value()}};
                if (flips)
                    j["min_flips"] = flips->str();
                std::cout << j.dump() << "\n";
            } else {
                std::cout << (flips ? "min flips: " + flips->str() : std::string("unsolvable")) << "\n";
            }
            return flips ? 0 : 1;
        }
        // the pruned existence check settles unsolvable inputs far sooner
        // than exhaustive breadth-first search
        if (!solvable(p, budget)) {
            std::cout << (json ? Json{{"solvable", false}}.dump() : std::string("unsolvable")) << "\n";
            return 1;
        }
        std::optional<SearchResult> r;
        try {
            r = bfs_shortest_plan(p, budget);
        } catch (const BudgetExceeded&) {
            std::cout << (json ? Json{{"solvable", true}, {"budget_exceeded", true}}.dump()
                               : std::string("solvable, shortest plan exceeds the state budget"))
                      << "\n";
            return 0;
        }
        if (json) {
            Json j{{"solvable", r.has_value()}};
            if (r) {
                j["length"] = r->length();
                Json ids = Json::array();
                for (auto i : r->plan)
                    ids.push_back(p.operators[i].id);
                j["plan"] = std::move(ids);
            }
            std::cout << j.dump() << "\n";
        } else if (r) {
            std::cout << "solvable, shortest plan length " << r->length() << "\n";
            for (auto i : r->plan)
                std::cout << p.operators[i].id << "\n";
        } else {
            std::cout << "unsolvable\n";
        }
        return r ? 0 : 1;
    } catch (const BudgetExceeded& e) {
        if (json)
            std::cout << Json{{"solvable", nullptr}, {"budget_exceeded", true}}.dump() << "\n";
        else
            std::cout << "unknown: " << e.what() << "\n";
        return 2;
    }
}

int cmd_reduce(const std::string& kind, const std::string& in, const std::string& out, const std::string& provenance) {
    CnfFormula f = parse_dimacs(slurp(in));
    ReductionArtifact art = kind == "chain" ? reduce_cnf_to_chain(f) : reduce_3sat_to_polytree(f);
    emit(out, dump_problem(art.problem));
    if (!provenance.empty())
        emit(provenance, provenance_to_json(art).dump(2) + "\n");
    return 0;
}

int cmd_gen(const std::string& family, std::size_t n, std::uint64_t seed, std::size_t max_ops, double density,
            const std::string& out) {
    PlanningProblem p;
    if (family == "table1") {
        p = gen_table1();
    } else if (family == "pn") {
        p = gen_pn(n);
    } else if (family == "pn-mod") {
        p = gen_pn_modified(n);
    } else {
        RandomSpec spec;
        spec.n = n;
        spec.seed = seed;
        spec.max_ops_per_var = max_ops;
        spec.edge_density = density;
        p = gen_random_3s(spec);
    }
    emit(out, dump_problem(p));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Macro-3S planning toolkit"};
    app.require_subcommand(1, 1);
    bool json = false;
    std::function<int()> action;

    auto* classify = app.add_subcommand("classify", "Report 3S membership and per-variable classes");
    std::string problem_in = "-";
    classify->add_option("problem", problem_in, "Problem JSON ('-' for stdin)");
    classify->add_flag("--json", json, "JSON output");
    classify->callback([&] { action = [&] { return cmd_classify(problem_in, json); }; });

    auto* plan = app.add_subcommand("plan", "Run Macro-3S; exit 0 plan, 1 no plan, 2 not 3S");
    std::string out;
    plan->add_option("problem", problem_in, "Problem JSON ('-' for stdin)");
    plan->add_option("-o,--output", out, "Plan JSON destination (default stdout)");
    plan->callback([&] { action = [&] { return cmd_plan(problem_in, out); }; });

    auto* validate_cmd = app.add_subcommand("validate", "Execute a macro plan against a problem");
    std::string plan_in = "-";
    validate_cmd->add_option("problem", problem_in, "Problem JSON")->required();
    validate_cmd->add_option("plan", plan_in, "Plan JSON ('-' for stdin)");
    validate_cmd->add_flag("--json", json, "JSON output");
    validate_cmd->callback([&] { action = [&] { return cmd_validate(problem_in, plan_in, json); }; });

    auto* length = app.add_subcommand("length", "Exact length of the expanded plan");
    length->add_option("plan", plan_in, "Plan JSON ('-' for stdin)");
    length->add_flag("--json", json, "JSON output");
    length->callback([&] { action = [&] { return cmd_length(plan_in, json); }; });

    auto* nth = app.add_subcommand("nth", "The i-th operator (1-based) of the expanded plan");
    std::string index;
    nth->add_option("plan", plan_in, "Plan JSON ('-' for stdin)")->required();
    nth->add_option("index", index, "1-based position")->required();
    nth->callback([&] { action = [&] { return cmd_nth(plan_in, index); }; });

    auto* expand = app.add_subcommand("expand", "Print the expanded plan, one operator id per line");
    std::optional<std::uint64_t> limit;
    expand->add_option("plan", plan_in, "Plan JSON ('-' for stdin)");
    expand->add_option("--limit", limit, "Stop after N operators");
    expand->add_option("-o,--output", out, "Destination (default stdout)");
    expand->callback([&] { action = [&] { return cmd_expand(plan_in, out, limit); }; });

    auto* oracle = app.add_subcommand("oracle", "Breadth-first search; exit 0 solvable, 1 unsolvable, 2 budget");
    std::uint64_t max_states = SearchBudget{}.max_states;
    std::string min_flips;
    oracle->add_option("problem", problem_in, "Problem JSON ('-' for stdin)");
    oracle->add_option("--max-states", max_states, "State budget");
    oracle->add_option("--min-flips", min_flips, "Report the fewest 0->1 changes of this variable");
    oracle->add_flag("--json", json, "JSON output");
    oracle->callback([&] { action = [&] { return cmd_oracle(problem_in, max_states, min_flips, json); }; });

    auto* reduce = app.add_subcommand("reduce", "Build the planning instance of a CNF formula");
    std::string kind, cnf_in = "-", provenance;
    reduce->add_option("kind", kind, "chain | polytree")->required()->check(CLI::IsMember({"chain", "polytree"}));
    reduce->add_option("formula", cnf_in, "DIMACS CNF ('-' for stdin)");
    reduce->add_option("-o,--output", out, "Problem JSON destination (default stdout)");
    reduce->add_option("--provenance", provenance, "Also write the provenance map here");
    reduce->callback([&] { action = [&] { return cmd_reduce(kind, cnf_in, out, provenance); }; });

    auto* gen = app.add_subcommand("gen", "Generate a named or random instance");
    std::string family;
    std::size_t n = 5, max_ops = RandomSpec{}.max_ops_per_var;
    std::uint64_t seed = 1;
    double density = RandomSpec{}.edge_density;
    gen->add_option("family", family, "table1 | pn | pn-mod | random")
        ->required()
        ->check(CLI::IsMember({"table1", "pn", "pn-mod", "random"}));
    gen->add_option("--n", n, "Number of variables");
    gen->add_option("--seed", seed, "Random seed");
    gen->add_option("--max-ops", max_ops, "Random: operators per variable");
    gen->add_option("--density", density, "Random: parent edge probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("-o,--output", out, "Problem JSON destination (default stdout)");
    gen->callback([&] { action = [&] { return cmd_gen(family, n, seed, max_ops, density, out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        return action();
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kDataError;
    } catch (const NoInput& e) {
        std::cerr << e.what() << "\n";
        return kNoInput;
    } catch (const EmptyFormula& e) {
        std::cerr << "bad formula: " << e.what() << "\n";
        return kDataError;
    } catch (const NotExact3Cnf& e) {
        std::cerr << "bad formula: " << e.what() << "\n";
        return kDataError;
    } catch (const InternalAssertion& e) {
        std::cerr << "internal assertion: " << e.what() << "\n";
        return kInternal;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    }
}
