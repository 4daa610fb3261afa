// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// `acceptance 3 8` runs only the listed criteria.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace threes;
using namespace threes::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes; // printed under the verdict line

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (notes.size() < 12)
                notes.push_back("  mismatch: " + what);
        }
    }
    void line(bool ok, const std::string& what) {
        notes.push_back(std::string("  ") + (ok ? "ok  " : "FAIL") + " " + what);
        pass = pass && ok;
    }
};

BigCount pow_big(unsigned base, unsigned e) { return boost::multiprecision::pow(BigCount(base), e); }

// ---------------------------------------------------------------------------

Outcome example_golden() {
    Outcome o;
    const PlanningProblem p = gen_table1();
    auto plan = macro_3s(p);
    if (!plan) {
        o.line(false, "macro_3s returned no plan");
        return o;
    }
    struct Row {
        const char* id;
        std::vector<std::string> steps;
        const char* pre;
        const char* post;
    };
    const std::vector<Row> rows = {
        {"m_1^v1", {"a_1^v1"}, "(v1=0)", "(v1=1)"},
        {"m_0^v1", {"a_0^v1"}, "(v1=1)", "(v1=0)"},
        {"m_1^v2", {"m_1^v1", "a_1^v2", "m_0^v1"}, "(v1=0, v2=0)", "(v2=1)"},
        {"m_1^v3", {"a_1^v3"}, "(v1=0, v2=1, v3=0)", "(v3=1)"},
        {"m_1^v5", {"a_1^v5"}, "(v3=0, v4=0, v5=0)", "(v5=1)"},
        {"m_1^v6", {"a_1^v6"}, "(v3=1, v6=0)", "(v6=1)"},
        {"m_0^v6", {"a_0^v6"}, "(v3=1, v6=1)", "(v6=0)"},
        {"m_1^v7", {"m_1^v6", "a_1^v7", "m_0^v6"}, "(v3=1, v6=0, v7=0)", "(v7=1)"},
        {"m_1^v8", {"a_1^v8"}, "(v3=1, v6=0, v7=1, v8=0)", "(v8=1)"},
    };
    bool macros_ok = plan->table.size() == rows.size();
    std::string differing;
    for (const auto& r : rows) {
        auto i = plan->table.find_id(r.id);
        if (!i) {
            macros_ok = false;
            differing += std::string(" ") + r.id + " missing;";
            continue;
        }
        const Macro& m = plan->table[*i];
        if (step_ids(*plan, m.steps) != r.steps)
            differing += std::string(" ") + r.id + " steps;";
        if (show(m.pre, p) != r.pre)
            differing += std::string(" ") + r.id + " pre " + show(m.pre, p) + ";";
        if (show(m.post, p) != r.post)
            differing += std::string(" ") + r.id + " post " + show(m.post, p) + ";";
    }
    macros_ok = macros_ok && differing.empty();
    o.line(macros_ok, "nine macros: ids, step sequences, pre, post" + (differing.empty() ? "" : ", differs:" + differing));

    const std::vector<std::string> top = {"m_1^v5", "m_1^v2", "m_1^v3", "m_1^v7", "m_1^v8"};
    auto got_top = step_ids(*plan, plan->top);
    std::string got_top_s;
    for (const auto& s : got_top)
        got_top_s += (got_top_s.empty() ? "" : " ") + s;
    o.line(got_top == top, "top plan, got <" + got_top_s + ">");

    const std::vector<std::string> expansion = {"a_1^v5", "a_1^v1", "a_1^v2", "a_0^v1", "a_1^v3",
                                                "a_1^v6", "a_1^v7", "a_0^v6", "a_1^v8"};
    o.line(expand_all(*plan) == expansion, "expansion equals the 9-operator sequence");
    o.line(validate(*plan, p).valid, "plan validates");
    return o;
}

Outcome pn_lengths() {
    Outcome o;
    for (unsigned n = 1; n <= 12; ++n) {
        const PlanningProblem p = gen_pn(n);
        auto plan = macro_3s(p);
        o.check(plan.has_value(), "gen_pn(" + std::to_string(n) + ") has no plan");
        if (!plan)
            continue;
        o.check(plan_length(*plan) == pow_big(2, n) - 1, "plan length for n=" + std::to_string(n));
        o.check(validate(*plan, p).valid, "plan for n=" + std::to_string(n) + " does not validate");
        if (n <= 10) {
            auto r = bfs_shortest_plan(p);
            o.check(r && BigCount(r->length()) == pow_big(2, n) - 1, "oracle length for n=" + std::to_string(n));
        }
    }
    return o;
}

Outcome pn_modified() {
    Outcome o;
    for (unsigned n = 2; n <= 10; ++n) {
        const PlanningProblem p = gen_pn_modified(n);
        auto plan = macro_3s(p);
        o.check(plan.has_value(), "no plan for n=" + std::to_string(n));
        if (!plan)
            continue;
        o.check(plan_length(*plan) == (pow_big(3, n) - 1) / 2, "plan length for n=" + std::to_string(n));
        o.check(validate(*plan, p).valid, "plan for n=" + std::to_string(n) + " does not validate");
        const LengthTable lt = compute_lengths(*plan);
        for (std::size_t m = 0; m < plan->table.size(); ++m) {
            const auto& key = plan->table[m].key;
            o.check(key && lt[m] == pow_big(3, key->var.index), plan->table[m].id + " length for n=" + std::to_string(n));
        }
        if (n <= 8) {
            auto r = bfs_shortest_plan(p);
            o.check(r && r->length() == n, "oracle length for n=" + std::to_string(n));
        }
    }
    return o;
}

// The shared random sweep: n = 3..8, 84 seeds each.
struct SweepItem {
    PlanningProblem problem;
    ThreeSReport report;
    std::optional<MacroPlan> plan;
};

const std::vector<SweepItem>& sweep() {
    static const std::vector<SweepItem> items = [] {
        std::vector<SweepItem> out;
        for (std::size_t n = 3; n <= 8; ++n)
            for (std::uint64_t seed = 1; out.size() < (n - 2) * 84; ++seed) {
                RandomSpec spec;
                spec.n = n;
                spec.seed = seed;
                try {
                    PlanningProblem p = gen_random_3s(spec);
                    ThreeSReport r = is_3s(p);
                    auto plan = macro_3s(p, *r.analysis);
                    out.push_back({std::move(p), std::move(r), std::move(plan)});
                } catch (const Exhausted&) {
                    // retry with the next seed
                }
            }
        return out;
    }();
    return items;
}

Outcome soundness_sweep() {
    Outcome o;
    std::size_t solvable_count = 0;
    for (const auto& it : sweep()) {
        const bool oracle = solvable(it.problem);
        solvable_count += oracle;
        o.check(it.plan.has_value() == oracle, it.problem.name + ": planner and oracle disagree");
        if (it.plan)
            o.check(validate(*it.plan, it.problem).valid, it.problem.name + ": plan does not validate");
    }
    o.notes.push_back("  " + std::to_string(sweep().size()) + " instances, " + std::to_string(solvable_count) +
                      " solvable");
    return o;
}

Outcome upper_bound_check() {
    Outcome o;
    std::size_t checked = 0, over = 0;
    auto check = [&](const PlanningProblem& p, const std::optional<MacroPlan>& plan, const ThreeSReport& r) {
        const UpperBounds ub = upper_bounds(*r.depth);
        o.check(BigRational(ub.total) <= ub.generic_exact, p.name + ": product bound exceeds generic bound");
        if (plan) {
            const BigCount len = plan_length(*plan);
            ++checked;
            over += len > ub.total;
            o.check(len <= ub.total, p.name + ": length " + len.str() + " exceeds " + ub.total.str());
        }
    };
    for (const auto& it : sweep())
        check(it.problem, it.plan, it.report);
    for (std::size_t n = 1; n <= 12; ++n) {
        PlanningProblem p = gen_pn(n);
        ThreeSReport r = is_3s(p);
        check(p, macro_3s(p, *r.analysis), r);
    }
    for (std::size_t n = 2; n <= 10; ++n) {
        PlanningProblem p = gen_pn_modified(n);
        ThreeSReport r = is_3s(p);
        check(p, macro_3s(p, *r.analysis), r);
    }
    o.notes.push_back("  " + std::to_string(over) + " of " + std::to_string(checked) +
                      " plans longer than the product bound");
    return o;
}

Outcome three_s_macros() {
    Outcome o;
    auto check = [&](const PlanningProblem& p, const std::optional<MacroPlan>& plan, const ThreeSAnalysis& a) {
        // every macro of the table, also when no plan was assembled
        MacroTable table = build_macro_table(p, a);
        for (const Macro& m : table.macros())
            o.check(is_3s_macro(m, StepContext{p, table}, a), p.name + ": " + m.id + " is not a 3S-macro");
        if (!plan)
            return;
        auto changes = change_counts(*plan, p);
        for (std::uint32_t v = 0; v < p.var_count(); ++v)
            if (a.flags[v].is_splitting)
                o.check(changes[v] <= 2, p.name + ": splitting " + p.variables[v].name + " changes " +
                                             std::to_string(changes[v]) + " times");
    };
    for (const auto& it : sweep())
        check(it.problem, it.plan, *it.report.analysis);
    for (std::size_t n = 1; n <= 12; ++n) {
        PlanningProblem p = gen_pn(n);
        ThreeSReport r = is_3s(p);
        check(p, macro_3s(p, *r.analysis), *r.analysis);
    }
    for (std::size_t n = 2; n <= 10; ++n) {
        PlanningProblem p = gen_pn_modified(n);
        ThreeSReport r = is_3s(p);
        check(p, macro_3s(p, *r.analysis), *r.analysis);
    }
    const PlanningProblem t1 = gen_table1();
    ThreeSReport r = is_3s(t1);
    check(t1, macro_3s(t1, *r.analysis), *r.analysis);
    return o;
}

Outcome chain_equivalence() {
    Outcome o;
    std::size_t sat = 0;
    for (std::uint64_t seed = 1; seed <= 160; ++seed) {
        const CnfFormula f = random_cnf(seed);
        const ReductionArtifact art = reduce_cnf_to_chain(f);
        const bool s = brute_sat(f).has_value();
        sat += s;
        o.check(s == solvable(art.problem), "seed " + std::to_string(seed) + ": satisfiability differs");
        o.check(certify_shape(build_causal_graph(art.problem), GraphShape::Chain),
                "seed " + std::to_string(seed) + ": causal graph is not a chain");
    }
    o.notes.push_back("  160 formulas, " + std::to_string(sat) + " satisfiable");
    return o;
}

Outcome polytree_equivalence() {
    Outcome o;
    std::vector<CnfFormula> formulas;
    for (std::uint64_t seed = 1; seed <= 120; ++seed)
        formulas.push_back(random_3cnf(seed));
    formulas.push_back(all_sign_patterns());
    std::size_t sat = 0;
    for (std::size_t i = 0; i < formulas.size(); ++i) {
        const CnfFormula& f = formulas[i];
        const std::string tag = i < 120 ? "seed " + std::to_string(i + 1) : std::string("all sign patterns");
        const ReductionArtifact art = reduce_3sat_to_polytree(f);
        const std::size_t n = static_cast<std::size_t>(f.num_vars), k = f.num_clauses();
        o.check(art.problem.var_count() == 2 * n + 4 * k - 1, tag + ": variable count");
        o.check(art.problem.operators.size() == 2 * n + 14 * k - 3, tag + ": operator count");
        o.check(certify_shape(build_causal_graph(art.problem), GraphShape::Polytree), tag + ": not a polytree");

        const auto sigma = brute_sat(f);
        SearchBudget budget;
        budget.max_states = 200'000'000;
        bool plan_exists = false;
        try {
            plan_exists = solvable(art.problem, budget);
        } catch (const BudgetExceeded& e) {
            o.check(false, tag + ": " + e.what());
            continue;
        }
        o.check(sigma.has_value() == plan_exists, tag + ": satisfiability differs");
        if (!sigma)
            continue;
        ++sat;
        const auto ops = resolve_operator_ids(art.problem, sigma_plan(art, *sigma));
        o.check(validate(flat_plan(art.problem, ops), art.problem).valid, tag + ": sigma plan does not validate");
        o.check(extract_assignment(ops, art) == *sigma, tag + ": assignment does not round-trip");
    }
    o.notes.push_back("  " + std::to_string(formulas.size()) + " formulas, " + std::to_string(sat) + " satisfiable");
    return o;
}

Outcome gadget_bound() {
    Outcome o;
    for (std::size_t k = 1; k <= 4; ++k) {
        const GadgetInstance g = gadget_P(k);
        const VarId v1 = *g.problem.find_variable("v1");
        auto flips = min_flip_count(g.problem, v1);
        o.check(flips && *flips == BigCount(k), "k=" + std::to_string(k) + ": min flips " +
                                                    (flips ? flips->str() : std::string("none")));
        const auto ops = resolve_operator_ids(g.problem, g.canonical_plan);
        o.check(validate(flat_plan(g.problem, ops), g.problem).valid, "k=" + std::to_string(k) + ": canonical plan");
    }
    return o;
}

Outcome random_access() {
    Outcome o;
    for (std::size_t n = 1; n <= 8; ++n) {
        const PlanningProblem p = gen_pn(n);
        const MacroPlan plan = *macro_3s(p);
        const LengthTable lt = compute_lengths(plan);
        const auto all = expand_all(plan);
        for (std::size_t i = 1; i <= all.size(); ++i)
            o.check(nth_operator(plan, lt, BigCount(i)) == all[i - 1],
                    "n=" + std::to_string(n) + " index " + std::to_string(i));
    }

    const PlanningProblem p = gen_pn(40);
    const MacroPlan plan = *macro_3s(p);
    o.check(step_ids(plan, plan.top) == std::vector<std::string>{"m_1^v39", "m_1^v40", "m_0^v39"},
            "top plan for n=40");
    const BigCount total = pow_big(2, 40) - 1;
    o.check(plan_length(plan) == total, "plan length for n=40");

    // segment boundaries plus a seeded spread of indices
    const LengthTable lt = compute_lengths(plan);
    const BigCount l1 = lt[plan.top[0].index], l2 = lt[plan.top[1].index];
    std::vector<BigCount> idx = {1, 2, 3, l1 - 1, l1, l1 + 1, l1 + 2, l1 + l2 - 1, l1 + l2, l1 + l2 + 1, total - 1, total};
    detail::Draw rnd(40);
    for (int i = 0; i < 2000; ++i)
        idx.push_back(1 + BigCount(rnd.below(std::uint64_t{1} << 40) % static_cast<std::uint64_t>(total)));
    double worst = 0;
    for (const auto& i : idx) {
        auto t0 = Clock::now();
        const std::string got = nth_operator(plan, i); // recomputes lengths each call
        worst = std::max(worst, seconds_since(t0));
        o.check(got == pn_gray_operator(i), "n=40 index " + i.str() + " gave " + got);
    }
    o.check(worst < 0.1, "slowest n=40 query took " + std::to_string(worst) + " s");
    std::ostringstream note;
    note << "  slowest n=40 query " << worst * 1000 << " ms over " << idx.size() << " indices";
    o.notes.push_back(note.str());
    return o;
}

Outcome polynomial_smoke() {
    Outcome o;
    auto t0 = Clock::now();
    const PlanningProblem p = gen_pn(1000);
    auto plan = macro_3s(p);
    const double planning = seconds_since(t0);
    o.check(plan.has_value(), "no plan for gen_pn(1000)");
    if (plan)
        o.check(plan_length(*plan) == pow_big(2, 1000) - 1, "plan length differs from 2^1000 - 1");
    o.check(planning < 10.0, "macro_3s took " + std::to_string(planning) + " s");
    return o;
}

struct Criterion {
    int number;
    const char* title;
    double limit_s; // 0: no time limit
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "eight-variable example golden test", 1, example_golden},
        {2, "P_n lengths and optimality", 30, pn_lengths},
        {3, "modified P_n lengths", 60, pn_modified},
        {4, "soundness and completeness sweep", 300, soundness_sweep},
        {5, "upper bounds", 0, upper_bound_check},
        {6, "3S-macro property and splitting changes", 0, three_s_macros},
        {7, "chain reduction equivalence", 300, chain_equivalence},
        {8, "polytree reduction equivalence", 600, polytree_equivalence},
        {9, "gadget lower bound", 60, gadget_bound},
        {10, "random access", 0, random_access},
        {11, "polynomial-time smoke test", 0, polynomial_smoke},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i)
        only.insert(std::stoi(argv[i]));

    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.number))
            continue;
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("  exception: ") + e.what());
        }
        const double took = seconds_since(t0);
        if (c.limit_s > 0 && took > c.limit_s) {
            o.pass = false;
            o.notes.push_back("  over the " + std::to_string(static_cast<int>(c.limit_s)) + " s limit");
        }
        std::ostringstream head;
        head.setf(std::ios::fixed);
        head.precision(2);
        head << (o.pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.title << " (" << took << " s)";
        std::cout << head.str() << "\n";
        for (const auto& n : o.notes)
            std::cout << n << "\n";
        std::cout.flush();
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
