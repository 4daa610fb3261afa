#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "threes/core_model.hpp"
#include "threes/errors.hpp"
#include "threes/var_set.hpp"

namespace threes {

struct CausalGraph {
    std::size_t n = 0;
    std::vector<std::vector<VarId>> successors;   // sorted, no duplicates
    std::vector<std::vector<VarId>> predecessors; // sorted, no duplicates
    std::optional<std::vector<VarId>> topo_order; // present iff acyclic

    bool acyclic() const noexcept { return topo_order.has_value(); }

    bool has_edge(VarId u, VarId v) const {
        const auto& s = successors[u.index];
        return std::binary_search(s.begin(), s.end(), v);
    }

    std::size_t edge_count() const {
        std::size_t c = 0;
        for (const auto& s : successors)
            c += s.size();
        return c;
    }

    std::vector<std::pair<VarId, VarId>> edges() const {
        std::vector<std::pair<VarId, VarId>> out;
        for (std::uint32_t u = 0; u < n; ++u)
            for (VarId v : successors[u])
                out.emplace_back(VarId{u}, v);
        return out;
    }
};

namespace detail {

// Kahn's algorithm, smallest variable index first among ready nodes.
inline std::optional<std::vector<VarId>> topological_order(const CausalGraph& g) {
    std::vector<std::size_t> indeg(g.n);
    for (std::size_t v = 0; v < g.n; ++v)
        indeg[v] = g.predecessors[v].size();
    std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> ready;
    for (std::uint32_t v = 0; v < g.n; ++v)
        if (indeg[v] == 0)
            ready.push(v);
    std::vector<VarId> order;
    order.reserve(g.n);
    while (!ready.empty()) {
        std::uint32_t u = ready.top();
        ready.pop();
        order.emplace_back(u);
        for (VarId w : g.successors[u])
            if (--indeg[w.index] == 0)
                ready.push(w.index);
    }
    if (order.size() != g.n)
        return std::nullopt;
    return order;
}

} // namespace detail

/// Edge (u,v) iff u != v and some operator changes v while mentioning u in its
/// pre- or post-condition.
inline CausalGraph build_causal_graph(const PlanningProblem& p) {
    CausalGraph g;
    g.n = p.var_count();
    g.successors.assign(g.n, {});
    g.predecessors.assign(g.n, {});
    for (const auto& a : p.operators) {
        for (const auto& t : a.post) {
            for (const auto& b : a.pre)
                if (b.var != t.var)
                    g.predecessors[t.var.index].push_back(b.var);
            for (const auto& b : a.post)
                if (b.var != t.var)
                    g.predecessors[t.var.index].push_back(b.var);
        }
    }
    for (std::uint32_t v = 0; v < g.n; ++v) {
        auto& preds = g.predecessors[v];
        std::sort(preds.begin(), preds.end());
        preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
        for (VarId u : preds)
            g.successors[u.index].emplace_back(v);
    }
    g.topo_order = detail::topological_order(g);
    return g;
}

inline VarSet ancestors(const CausalGraph& g, VarId v) {
    VarSet seen(g.n);
    std::vector<VarId> stack(g.predecessors[v.index].begin(), g.predecessors[v.index].end());
    while (!stack.empty()) {
        VarId u = stack.back();
        stack.pop_back();
        if (seen.test(u))
            continue;
        seen.set(u);
        for (VarId w : g.predecessors[u.index])
            if (!seen.test(w))
                stack.push_back(w);
    }
    return seen;
}

inline bool all_binary(const PlanningProblem& p) {
    return std::all_of(p.variables.begin(), p.variables.end(),
                       [](const Variable& v) { return v.domain.size == 2; });
}

inline bool is_normal_form(const PlanningProblem& p) {
    if (!all_binary(p))
        return false;
    if (std::any_of(p.init.values.begin(), p.init.values.end(), [](Value x) { return x != 0; }))
        return false;
    for (const auto& a : p.operators) {
        if (!a.is_unary())
            continue;
        auto pre = a.pre.get(a.target());
        if (!pre || *pre != 1 - a.target_value())
            return false;
    }
    return true;
}

/// Relabels every variable so that init is all zero, then makes each unary
/// operator's pre-condition on its own variable explicit (dropping operators
/// that would not change anything). Operator order is preserved. Non-unary
/// operators are only relabeled.
inline PlanningProblem normal_form(const PlanningProblem& p) {
    for (const auto& var : p.variables)
        if (var.domain.size != 2)
            throw NotBinary("variable " + var.name + " has a domain of size " + std::to_string(var.domain.size));

    const std::size_t n = p.var_count();
    std::vector<bool> flip(n);
    for (std::size_t i = 0; i < n; ++i)
        flip[i] = p.init.values.at(i) == 1;

    auto relabel = [&](const PartialState& ps) {
        std::vector<Binding> out(ps.begin(), ps.end());
        for (auto& b : out)
            if (flip[b.var.index])
                b.value = 1 - b.value;
        return PartialState::from_sorted(std::move(out));
    };

    PlanningProblem q;
    q.name = p.name;
    q.variables = p.variables;
    for (std::size_t i = 0; i < n; ++i)
        if (flip[i] && q.variables[i].domain.labels.size() == 2)
            std::swap(q.variables[i].domain.labels[0], q.variables[i].domain.labels[1]);
    q.init.values.assign(n, 0);
    q.goal = relabel(p.goal);
    q.operators.reserve(p.operators.size());
    for (const auto& a : p.operators) {
        Operator b{a.id, relabel(a.pre), relabel(a.post)};
        if (b.is_unary()) {
            VarId v = b.target();
            Value x = b.target_value();
            auto pv = b.pre.get(v);
            if (pv && *pv == x)
                continue;
            if (!pv)
                b.pre = replace(b.pre, PartialState::from_sorted({{v, 1 - x}}));
        }
        q.operators.push_back(std::move(b));
    }
    return q;
}

/// Q/V sets of one variable. `vstar` is V - v0 - v1 - {v}.
struct SplitSets {
    VarSet q0, q1;
    VarSet v0, v1, vstar;

    bool splitting() const { return !v0.intersects(v1); }
};

namespace detail {

/// Shared state for computing the split sets of many variables of one problem.
struct SplitContext {
    std::size_t n = 0;
    std::vector<VarSet> adjacency; // undirected causal graph
    std::vector<VarSet> q0, q1;
    const CausalGraph* graph = nullptr;

    SplitContext(const PlanningProblem& p, const CausalGraph& g) : n(g.n), graph(&g) {
        adjacency.assign(n, VarSet(n));
        q0.assign(n, VarSet(n));
        q1.assign(n, VarSet(n));
        for (std::uint32_t u = 0; u < n; ++u)
            for (VarId w : g.successors[u]) {
                adjacency[u].set(w);
                adjacency[w.index].set(u);
            }
        for (const auto& a : p.operators)
            for (const auto& pre : a.pre) {
                if (pre.value > 1)
                    continue;
                auto& q = pre.value == 0 ? q0[pre.var.index] : q1[pre.var.index];
                for (const auto& post : a.post)
                    if (post.var != pre.var)
                        q.set(post.var);
            }
    }

    // Variables weakly connected to some seed once the edges between `v` and
    // `cut` are removed. Visit marks are shared across seeds.
    VarSet weakly_connected(VarId v, const VarSet& seeds, const VarSet& cut) const {
        VarSet visited(n);
        std::vector<std::uint32_t> stack;
        const std::size_t vw = v.index >> 6;
        const std::uint64_t vbit = std::uint64_t{1} << (v.index & 63);
        for (std::size_t s = seeds.find_first(); s != VarSet::npos; s = seeds.find_next(s)) {
            if (visited.test(s))
                continue;
            visited.set(s);
            stack.push_back(static_cast<std::uint32_t>(s));
            while (!stack.empty()) {
                std::uint32_t x = stack.back();
                stack.pop_back();
                const auto& row = adjacency[x].words();
                auto& seen = visited.words();
                const bool at_v = x == v.index;
                const bool in_cut = cut.test(std::size_t{x});
                for (std::size_t i = 0; i < row.size(); ++i) {
                    std::uint64_t nb = row[i] & ~seen[i];
                    if (at_v)
                        nb &= ~cut.words()[i];
                    if (in_cut && i == vw)
                        nb &= ~vbit;
                    seen[i] |= nb;
                    while (nb) {
                        stack.push_back(static_cast<std::uint32_t>((i << 6) + std::countr_zero(nb)));
                        nb &= nb - 1;
                    }
                }
            }
        }
        return visited;
    }

    // Edges (v,w) with w in `only` and not in `other`; an antiparallel edge
    // (w,v) keeps the pair connected.
    VarSet removed_edges(VarId v, const VarSet& only, const VarSet& other) const {
        VarSet cut = only - other;
        for (std::size_t w = cut.find_first(); w != VarSet::npos; w = cut.find_next(w)) {
            VarId wv{static_cast<std::uint32_t>(w)};
            if (!graph->has_edge(v, wv) || graph->has_edge(wv, v))
                cut.reset(w);
        }
        return cut;
    }

    SplitSets split_sets(VarId v) const {
        SplitSets s;
        s.q0 = q0[v.index];
        s.q1 = q1[v.index];
        s.v0 = weakly_connected(v, s.q0, removed_edges(v, s.q0, s.q1));
        s.v1 = weakly_connected(v, s.q1, removed_edges(v, s.q1, s.q0));
        s.vstar = VarSet::full(n) - s.v0 - s.v1;
        s.vstar.reset(v);
        return s;
    }
};

} // namespace detail

/// Q0, Q1, V0, V1 of `v`. Expects a problem in normal form.
inline SplitSets compute_split_sets(const PlanningProblem& p, const CausalGraph& g, VarId v) {
    return detail::SplitContext(p, g).split_sets(v);
}

inline std::vector<SplitSets> compute_all_split_sets(const PlanningProblem& p, const CausalGraph& g) {
    detail::SplitContext ctx(p, g);
    std::vector<SplitSets> out;
    out.reserve(g.n);
    for (std::uint32_t v = 0; v < g.n; ++v)
        out.push_back(ctx.split_sets(VarId{v}));
    return out;
}

/// The three 3S categories. They are not mutually exclusive.
struct Classification {
    bool is_static = false;
    bool is_symmetrically_reversible = false;
    bool is_splitting = false;

    bool any() const noexcept { return is_static || is_symmetrically_reversible || is_splitting; }
    friend bool operator==(const Classification&, const Classification&) = default;
};

namespace detail {

inline bool is_static(const PlanningProblem& p, VarId v) {
    bool sets1 = false, sets0 = false;
    for (const auto& a : p.operators) {
        if (auto x = a.post.get(v)) {
            sets1 = sets1 || *x == 1;
            sets0 = sets0 || *x == 0;
        }
    }
    auto goal = p.goal.get(v);
    return !sets1 || (goal && *goal == 0 && !sets0);
}

inline bool is_symmetrically_reversible(const PlanningProblem& p, VarId v) {
    // prevail condition -> directions seen (bit 0: sets 0, bit 1: sets 1)
    std::map<std::vector<std::pair<std::uint32_t, Value>>, unsigned> seen;
    for (const auto& a : p.operators) {
        if (!a.is_unary() || a.target() != v)
            continue;
        std::vector<std::pair<std::uint32_t, Value>> key;
        for (const auto& b : a.pre)
            if (b.var != v)
                key.emplace_back(b.var.index, b.value);
        seen[key] |= a.target_value() == 1 ? 2u : 1u;
    }
    return std::all_of(seen.begin(), seen.end(), [](const auto& kv) { return kv.second == 3u; });
}

} // namespace detail

inline Classification classify_variable(const PlanningProblem& p, const SplitSets& split, VarId v) {
    return {detail::is_static(p, v), detail::is_symmetrically_reversible(p, v), split.splitting()};
}

inline Classification classify_variable(const PlanningProblem& p, const CausalGraph& g, VarId v) {
    return classify_variable(p, compute_split_sets(p, g, v), v);
}

struct DepthProfile {
    std::vector<std::size_t> depth_of;
    std::size_t d = 0;
    std::vector<std::size_t> c; // c[i] = number of variables at depth i
};

/// Depth of a variable is the length of the longest outgoing path.
inline DepthProfile depth_profile(const CausalGraph& g) {
    if (!g.acyclic())
        throw Cyclic("depth is undefined on a cyclic causal graph");
    DepthProfile prof;
    prof.depth_of.assign(g.n, 0);
    const auto& order = *g.topo_order;
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        for (VarId w : g.successors[it->index])
            prof.depth_of[it->index] = std::max(prof.depth_of[it->index], prof.depth_of[w.index] + 1);
    for (auto x : prof.depth_of)
        prof.d = std::max(prof.d, x);
    prof.c.assign(g.n == 0 ? 0 : prof.d + 1, 0);
    for (auto x : prof.depth_of)
        ++prof.c[x];
    return prof;
}

/// Everything the macro planner needs to know about a normal-form problem.
struct ThreeSAnalysis {
    CausalGraph graph;
    std::vector<SplitSets> split;
    std::vector<Classification> flags;
    std::vector<std::size_t> topo_rank; // position of each variable in graph.topo_order

    const std::vector<VarId>& order() const { return *graph.topo_order; }
};

/// Requires a binary, acyclic problem in normal form.
inline ThreeSAnalysis analyze(const PlanningProblem& p) {
    ThreeSAnalysis a;
    a.graph = build_causal_graph(p);
    if (!a.graph.acyclic())
        throw Cyclic("causal graph of " + p.name + " is cyclic");
    a.split = compute_all_split_sets(p, a.graph);
    a.flags.reserve(a.graph.n);
    for (std::uint32_t v = 0; v < a.graph.n; ++v)
        a.flags.push_back(classify_variable(p, a.split[v], VarId{v}));
    a.topo_rank.assign(a.graph.n, 0);
    for (std::size_t i = 0; i < a.graph.n; ++i)
        a.topo_rank[a.order()[i].index] = i;
    return a;
}

enum class ThreeSFailure { None, NotBinary, NonUnary, Cyclic, Unclassified };

struct ThreeSReport {
    bool accepted = false;
    ThreeSFailure failure = ThreeSFailure::None;
    std::string reason; // empty when accepted
    std::optional<VarId> culprit;
    std::optional<ThreeSAnalysis> analysis; // of the normal form, when acyclic
    std::optional<DepthProfile> depth;
};

/// Membership test for 3S. The problem is brought to normal form first, so
/// the flags refer to the relabeled problem.
inline ThreeSReport is_3s(const PlanningProblem& p) {
    ThreeSReport r;
    for (std::uint32_t i = 0; i < p.var_count(); ++i)
        if (p.variables[i].domain.size != 2) {
            r.failure = ThreeSFailure::NotBinary;
            r.reason = "variable " + p.variables[i].name + " is not binary";
            r.culprit = VarId{i};
            return r;
        }
    for (const auto& a : p.operators)
        if (!a.is_unary()) {
            r.failure = ThreeSFailure::NonUnary;
            r.reason = "operator " + a.id + " is not unary";
            return r;
        }
    PlanningProblem nf = normal_form(p);
    CausalGraph g = build_causal_graph(nf);
    if (!g.acyclic()) {
        r.failure = ThreeSFailure::Cyclic;
        r.reason = "cyclic";
        return r;
    }
    r.analysis = analyze(nf);
    r.depth = depth_profile(r.analysis->graph);
    for (std::uint32_t v = 0; v < nf.var_count(); ++v)
        if (!r.analysis->flags[v].any()) {
            r.failure = ThreeSFailure::Unclassified;
            r.reason = "variable " + nf.variables[v].name + " is not static, symmetrically reversible or splitting";
            r.culprit = VarId{v};
            return r;
        }
    r.accepted = true;
    return r;
}

} // namespace threes
