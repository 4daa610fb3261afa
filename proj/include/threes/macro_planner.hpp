#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "threes/causal_analysis.hpp"
#include "threes/core_model.hpp"
#include "threes/errors.hpp"
#include "threes/var_set.hpp"

namespace threes {

enum class StepKind : std::uint8_t { Operator, Macro };

/// One entry of an operator/macro sequence. `index` points into the
/// problem's operator list or into a MacroTable.
struct Step {
    StepKind kind = StepKind::Operator;
    std::uint32_t index = 0;

    static Step op(std::size_t i) { return {StepKind::Operator, static_cast<std::uint32_t>(i)}; }
    static Step macro(std::size_t i) { return {StepKind::Macro, static_cast<std::uint32_t>(i)}; }
    bool is_macro() const noexcept { return kind == StepKind::Macro; }

    friend bool operator==(const Step&, const Step&) = default;
};

/// The (variable, value) a unary macro achieves.
struct MacroKey {
    VarId var;
    Value value = 0;

    friend auto operator<=>(const MacroKey&, const MacroKey&) = default;
};

struct Macro {
    std::string id;
    std::optional<MacroKey> key;
    std::vector<Step> steps;
    PartialState pre;
    PartialState post;
};

/// Macros in creation order; at most one per key. A macro may reference
/// only macros created before it, so the table is reference-acyclic when
/// built through add().
class MacroTable {
public:
    std::size_t add(Macro m) {
        if (m.key) {
            auto [it, inserted] = by_key_.emplace(*m.key, macros_.size());
            if (!inserted)
                throw std::invalid_argument("macro table already holds " + macros_[it->second].id);
        }
        macros_.push_back(std::move(m));
        return macros_.size() - 1;
    }

    std::optional<std::size_t> find(VarId v, Value x) const {
        auto it = by_key_.find(MacroKey{v, x});
        if (it == by_key_.end())
            return std::nullopt;
        return it->second;
    }
    bool contains(VarId v, Value x) const { return find(v, x).has_value(); }

    std::optional<std::size_t> find_id(const std::string& id) const {
        for (std::size_t i = 0; i < macros_.size(); ++i)
            if (macros_[i].id == id)
                return i;
        return std::nullopt;
    }

    const Macro& operator[](std::size_t i) const { return macros_[i]; }
    std::size_t size() const noexcept { return macros_.size(); }
    bool empty() const noexcept { return macros_.empty(); }
    const std::vector<Macro>& macros() const noexcept { return macros_; }

private:
    std::vector<Macro> macros_;
    std::map<MacroKey, std::size_t> by_key_;
};

/// A macro table plus the top-level sequence. Operator steps index
/// `operator_ids`, which mirrors the problem's operator list when the plan
/// was produced by the planner.
struct MacroPlan {
    std::vector<std::string> operator_ids;
    MacroTable table;
    std::vector<Step> top;

    const std::string& step_id(Step s) const {
        return s.is_macro() ? table[s.index].id : operator_ids[s.index];
    }
};

/// What a step sequence is resolved against.
struct StepContext {
    const PlanningProblem& problem;
    const MacroTable& table;
};

inline std::pair<const PartialState&, const PartialState&> step_conditions(Step s, const StepContext& ctx) {
    if (s.is_macro()) {
        if (s.index >= ctx.table.size())
            throw UnresolvedRef("macro #" + std::to_string(s.index) + " is not in the table");
        const Macro& m = ctx.table[s.index];
        return {m.pre, m.post};
    }
    if (s.index >= ctx.problem.operators.size())
        throw UnresolvedRef("operator #" + std::to_string(s.index) + " is not in the problem");
    const Operator& a = ctx.problem.operators[s.index];
    return {a.pre, a.post};
}

struct SequenceSummary {
    PartialState pre;
    PartialState post;
    bool well_defined = true;
    std::size_t first_conflict = 0; // 1-based step that fails to match, 0 if none
};

/// Induced pre/post of a sequence and its well-definedness in one pass.
inline SequenceSummary summarize_sequence(std::span<const Step> steps, const StepContext& ctx) {
    SequenceSummary s;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        auto [pre, post] = step_conditions(steps[i], ctx);
        if (i > 0 && s.well_defined && !matches(replace(s.pre, s.post), pre)) {
            s.well_defined = false;
            s.first_conflict = i + 1;
        }
        s.pre = replace(pre, s.pre);
        s.post = replace(s.post, post);
    }
    return s;
}

/// Returns pre(steps) and pre(steps) ⊕ post(steps), the latter being what a
/// matching state looks like afterwards on the variables the sequence
/// mentions. Subtracting pre from either form yields the same macro post.
inline std::pair<PartialState, PartialState> induced_pre_post(std::span<const Step> steps, const StepContext& ctx) {
    auto s = summarize_sequence(steps, ctx);
    PartialState after = replace(s.pre, s.post);
    return {std::move(s.pre), std::move(after)};
}

inline bool is_well_defined(std::span<const Step> steps, const StepContext& ctx) {
    return summarize_sequence(steps, ctx).well_defined;
}

inline std::string macro_id(const PlanningProblem& p, VarId v, Value x) {
    return "m_" + std::to_string(x) + "^" + p.var_name(v);
}

/// Builds the macro m_x^v over `steps`. The new macro will occupy slot
/// ctx.table.size(), so a reference to that slot is circular.
inline Macro make_macro(VarId v, Value x, std::vector<Step> steps, const StepContext& ctx) {
    for (Step s : steps)
        if (s.is_macro() && s.index == ctx.table.size())
            throw CircularRef(macro_id(ctx.problem, v, x) + " refers to itself");
    auto summary = summarize_sequence(steps, ctx);
    if (!summary.well_defined)
        throw IllDefined(macro_id(ctx.problem, v, x) + " is ill-defined at step " +
                         std::to_string(summary.first_conflict));
    Macro m;
    m.id = macro_id(ctx.problem, v, x);
    m.key = MacroKey{v, x};
    m.steps = std::move(steps);
    m.post = difference(summary.post, summary.pre);
    m.pre = std::move(summary.pre);
    return m;
}

/// pre^v: over the ancestors of v, 1 for splitting ancestors u with v in V1^u, else 0.
inline PartialState compute_pre_v(const ThreeSAnalysis& a, VarId v) {
    VarSet anc = ancestors(a.graph, v);
    std::vector<Binding> out;
    for (std::size_t u = anc.find_first(); u != VarSet::npos; u = anc.find_next(u)) {
        bool one = a.flags[u].is_splitting && a.split[u].v1.test(v);
        out.push_back({VarId{static_cast<std::uint32_t>(u)}, one ? Value{1} : Value{0}});
    }
    return PartialState::from_sorted(std::move(out));
}

inline bool is_3s_macro(const Macro& m, const StepContext& ctx, const ThreeSAnalysis& a) {
    if (m.post.size() != 1)
        return false;
    const Binding target = m.post.bindings().front();
    if (!is_well_defined(m.steps, ctx))
        return false;
    PartialState bound = replace(compute_pre_v(a, target.var),
                                 PartialState::from_sorted({{target.var, 1 - target.value}}));
    return subsumes(m.pre, bound);
}

/// One macro setting v to x, built from the first operator (in problem
/// order) whose 1-valued pre-conditions can all be met from M. Non-splitting
/// helpers are wrapped as m_1^u ... a ... m_0^u; splitting ones are left to
/// the final plan to provide.
inline std::optional<Macro> generate_macro(const PlanningProblem& p, const ThreeSAnalysis& a, VarId v, Value x,
                                           const MacroTable& table) {
    const StepContext ctx{p, table};
    for (std::size_t ai = 0; ai < p.operators.size(); ++ai) {
        const Operator& op = p.operators[ai];
        auto post = op.post.get(v);
        if (!post || *post != x)
            continue;

        std::vector<VarId> raised;
        for (const auto& b : op.pre)
            if (b.var != v && b.value == 1)
                raised.push_back(b.var);
        std::sort(raised.begin(), raised.end(),
                  [&](VarId l, VarId r) { return a.topo_rank[l.index] < a.topo_rank[r.index]; });

        std::vector<Step> set_up, tear_down; // S1 and S0
        bool satisfy = true;
        for (VarId u : raised) {
            const Classification& f = a.flags[u.index];
            auto m1 = table.find(u, 1);
            auto m0 = table.find(u, 0);
            if (f.is_static || !m1) {
                satisfy = false;
            } else if (!f.is_splitting && m0) {
                tear_down.push_back(Step::macro(*m0));
                set_up.insert(set_up.begin(), Step::macro(*m1));
            } else if (!f.is_splitting) {
                throw InternalAssertion("non-splitting variable " + p.var_name(u) +
                                        " has m_1 but no m_0 while generating " + macro_id(p, v, x));
            }
        }
        if (!satisfy)
            continue;

        std::vector<Step> steps = std::move(set_up);
        steps.push_back(Step::op(ai));
        steps.insert(steps.end(), tear_down.begin(), tear_down.end());
        try {
            return make_macro(v, x, std::move(steps), ctx);
        } catch (const IllDefined& e) {
            throw InternalAssertion(std::string("generated macro is ill-defined: ") + e.what());
        }
    }
    return std::nullopt;
}

/// The macro-building loop of Macro-3S: both macros of v when both exist,
/// m_1^v alone when the goal does not pin v to 0.
inline MacroTable build_macro_table(const PlanningProblem& p, const ThreeSAnalysis& a) {
    MacroTable table;
    for (VarId v : a.order()) {
        auto m1 = generate_macro(p, a, v, 1, table);
        auto m0 = generate_macro(p, a, v, 0, table);
        if (a.flags[v.index].is_symmetrically_reversible && m1 && !m0)
            throw InternalAssertion("symmetrically reversible " + p.var_name(v) + " has m_1 but no m_0");
        auto goal = p.goal.get(v);
        if (m1 && m0) {
            table.add(std::move(*m1));
            table.add(std::move(*m0));
        } else if (m1 && goal != Value{0}) {
            table.add(std::move(*m1));
        }
    }
    return table;
}

/// Final plan over the variables in W. An unbound goal counts as neither 0 nor 1.
inline std::optional<std::vector<Step>> generate_plan(const PlanningProblem& p, const ThreeSAnalysis& a,
                                                      const VarSet& w, const MacroTable& table) {
    if (w.empty())
        return std::vector<Step>{};

    VarId v;
    for (VarId u : a.order())
        if (w.test(u)) {
            v = u;
            break;
        }
    const auto goal = p.goal.get(v);
    const auto m1 = table.find(v, 1);
    const bool goal1 = goal == Value{1};

    auto cat = [](std::vector<Step>& out, const std::vector<Step>& more) {
        out.insert(out.end(), more.begin(), more.end());
    };

    if (a.flags[v.index].is_splitting) {
        const SplitSets& s = a.split[v.index];
        VarSet w0 = w & s.v0, w1 = w & s.v1, ws = w & s.vstar;
        w0.reset(v);
        w1.reset(v);
        auto plan0 = generate_plan(p, a, w0, table);
        auto plan1 = generate_plan(p, a, w1, table);
        auto plan_star = generate_plan(p, a, ws, table);
        if (!plan0 || !plan1 || !plan_star || (goal1 && !m1))
            return std::nullopt;
        std::vector<Step> out = std::move(*plan_star);
        cat(out, *plan0);
        if (!m1) {
            cat(out, *plan1);
            return out;
        }
        out.push_back(Step::macro(*m1));
        cat(out, *plan1);
        if (goal == Value{0}) {
            auto m0 = table.find(v, 0);
            if (!m0)
                throw InternalAssertion("goal of " + p.var_name(v) + " is 0 but m_0 is missing");
            out.push_back(Step::macro(*m0));
        }
        return out;
    }

    VarSet rest = w;
    rest.reset(v);
    auto plan = generate_plan(p, a, rest, table);
    if (!plan || (goal1 && !m1))
        return std::nullopt;
    if (goal1)
        plan->push_back(Step::macro(*m1));
    return plan;
}

inline MacroPlan assemble_plan(const PlanningProblem& p, MacroTable table, std::vector<Step> top) {
    MacroPlan plan;
    plan.operator_ids.reserve(p.operators.size());
    for (const auto& op : p.operators)
        plan.operator_ids.push_back(op.id);
    plan.table = std::move(table);
    plan.top = std::move(top);
    return plan;
}

/// Macro-3S on a problem already analysed. Returns nullopt when no plan exists.
inline std::optional<MacroPlan> macro_3s(const PlanningProblem& p, const ThreeSAnalysis& a) {
    MacroTable table = build_macro_table(p, a);
    auto top = generate_plan(p, a, VarSet::full(p.var_count()), table);
    if (!top)
        return std::nullopt;
    return assemble_plan(p, std::move(table), std::move(*top));
}

/// Macro-3S. The problem must be a normal-form 3S instance (Not3S otherwise).
inline std::optional<MacroPlan> macro_3s(const PlanningProblem& p) {
    if (!is_normal_form(p))
        throw Not3S("problem " + p.name + " is not in normal form");
    ThreeSReport report = is_3s(p);
    if (!report.accepted)
        throw Not3S(report.reason);
    return macro_3s(p, *report.analysis);
}

} // namespace threes
