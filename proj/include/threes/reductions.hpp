#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "threes/causal_analysis.hpp"
#include "threes/cnf.hpp"
#include "threes/core_model.hpp"
#include "threes/errors.hpp"
#include "threes/problem_json.hpp"

namespace threes {

enum class ReductionKind { Chain, Polytree };

inline const char* to_string(ReductionKind k) { return k == ReductionKind::Chain ? "chain" : "polytree"; }

/// Where a clause lives in the generated problem. Chain instances carry the
/// value indices of C_j and C_j'; polytree instances carry v_C and v_C'.
struct ClauseProvenance {
    std::vector<Value> values;
    std::vector<VarId> vars;
};

/// A family-(1) commitment in the chain construction: operator fixes CNF
/// variable `cnf_var` (1-based) to `value`.
struct Commitment {
    int cnf_var = 0;
    bool value = false;
};

struct ReductionArtifact {
    ReductionKind kind = ReductionKind::Chain;
    CnfFormula formula;
    PlanningProblem problem;
    std::vector<std::vector<VarId>> var_map; // CNF variable i at [i-1]
    std::vector<ClauseProvenance> clause_map;
    std::vector<std::optional<Commitment>> commitment; // per operator, chain only
    std::vector<VarId> gadget_chain;                   // polytree only
};

namespace detail {

class ProblemBuilder {
public:
    explicit ProblemBuilder(std::string name) { p_.name = std::move(name); }

    VarId add_variable(std::string name, std::vector<std::string> labels) {
        Variable v;
        v.name = std::move(name);
        v.domain.size = static_cast<std::uint32_t>(labels.size());
        if (!default_labels(labels))
            v.domain.labels = std::move(labels);
        p_.variables.push_back(std::move(v));
        p_.init.values.push_back(0);
        return VarId{static_cast<std::uint32_t>(p_.variables.size() - 1)};
    }

    /// Adds the operator unless one with the same id exists; returns its index.
    std::size_t add_operator(std::string id, std::vector<Binding> pre, std::vector<Binding> post) {
        if (auto i = p_.find_operator(id))
            return *i;
        p_.operators.push_back({std::move(id), PartialState(std::move(pre)), PartialState(std::move(post))});
        return p_.operators.size() - 1;
    }

    PlanningProblem& problem() { return p_; }

private:
    PlanningProblem p_;
};

inline std::string chain_label(std::size_t j, bool primed) {
    return "C" + std::to_string(j + 1) + (primed ? "'" : "");
}

} // namespace detail

/// CNF-SAT to a multi-valued problem whose causal graph is the chain
/// v_1 -> ... -> v_k -> w. Value layout of v_i: [S, 0, 1, C1, C1', ...].
inline ReductionArtifact reduce_cnf_to_chain(const CnfFormula& f) {
    if (f.clauses.empty() || f.num_vars == 0)
        throw EmptyFormula("the chain reduction needs at least one variable and one clause");
    const std::size_t k = static_cast<std::size_t>(f.num_vars);
    const std::size_t n = f.clauses.size();
    constexpr Value S = 0, Zero = 1, One = 2;
    auto cval = [](std::size_t j, bool primed) { return static_cast<Value>(3 + 2 * j + (primed ? 1 : 0)); };

    ReductionArtifact art;
    art.kind = ReductionKind::Chain;
    art.formula = f;
    detail::ProblemBuilder b("chain");

    std::vector<std::string> vlabels{"S", "0", "1"};
    for (std::size_t j = 0; j < n; ++j) {
        vlabels.push_back(detail::chain_label(j, false));
        vlabels.push_back(detail::chain_label(j, true));
    }
    std::vector<VarId> v;
    for (std::size_t i = 0; i < k; ++i) {
        v.push_back(b.add_variable("v" + std::to_string(i + 1), vlabels));
        art.var_map.push_back({v.back()});
    }
    std::vector<std::string> wlabels{"S"};
    for (std::size_t j = 1; j <= n; ++j)
        wlabels.push_back(std::to_string(j));
    const VarId w = b.add_variable("w", wlabels);
    for (std::size_t j = 0; j < n; ++j)
        art.clause_map.push_back({{cval(j, false), cval(j, true)}, {}});

    auto label = [&](Value x) { return vlabels[x]; };
    std::vector<std::optional<Commitment>> commit;
    // Operator on v_i moving `from` -> `to`, conditioned on v_{i-1} = prev
    // (ignored when i == 0). Identical operators collapse onto one id.
    auto op = [&](std::size_t i, Value prev, Value from, Value to) {
        std::string id = "v" + std::to_string(i + 1) + ":" + label(from) + ">" + label(to);
        std::vector<Binding> pre{{v[i], from}};
        if (i > 0) {
            id += "|v" + std::to_string(i) + "=" + label(prev);
            pre.push_back({v[i - 1], prev});
        }
        std::size_t before = b.problem().operators.size();
        std::size_t idx = b.add_operator(std::move(id), std::move(pre), {{v[i], to}});
        if (idx == before)
            commit.emplace_back(std::nullopt);
        return idx;
    };
    auto occurs = [&](std::size_t j, Literal l) {
        for (Literal x : f.clauses[j])
            if (x == l)
                return true;
        return false;
    };

    for (std::size_t i = 0; i < k; ++i) {
        const Literal pos = static_cast<Literal>(i + 1);
        // (1) commit S -> 0 / 1
        for (Value to : {Zero, One}) {
            std::size_t before = b.problem().operators.size();
            std::size_t idx = op(i, S, S, to);
            if (idx == before)
                commit[idx] = Commitment{static_cast<int>(i + 1), to == One};
        }
        // (2) propagate a message from v_{i-1}
        if (i > 0)
            for (std::size_t j = 0; j < n; ++j)
                for (bool primed : {false, true}) {
                    op(i, cval(j, primed), Zero, cval(j, false));
                    op(i, cval(j, primed), One, cval(j, true));
                }
        // (3) start a message when the committed value satisfies C_j
        for (std::size_t j = 0; j < n; ++j)
            for (Value x : {Zero, One}) {
                if (occurs(j, -pos))
                    op(i, x, Zero, cval(j, false));
                if (occurs(j, pos))
                    op(i, x, One, cval(j, true));
            }
        // (4) return to the committed value
        for (std::size_t j = 0; j < n; ++j)
            for (Value x : {Zero, One}) {
                op(i, x, cval(j, false), Zero);
                op(i, x, cval(j, true), One);
            }
    }
    for (std::size_t j = 0; j < n; ++j)
        for (bool primed : {false, true}) {
            std::string id = "w:" + wlabels[j] + ">" + wlabels[j + 1] + "|v" + std::to_string(k) + "=" +
                             detail::chain_label(j, primed);
            b.add_operator(std::move(id), {{v[k - 1], cval(j, primed)}, {w, static_cast<Value>(j)}},
                           {{w, static_cast<Value>(j + 1)}});
            commit.emplace_back(std::nullopt);
        }

    art.problem = std::move(b.problem());
    art.problem.goal = PartialState::from_sorted({{w, static_cast<Value>(n)}});
    art.commitment = std::move(commit);
    return art;
}

struct GadgetInstance {
    PlanningProblem problem;
    std::vector<std::string> canonical_plan;
};

/// The parity chain v_1..v_{2k-1}: any plan raises v_1 at least k times.
inline GadgetInstance gadget_P(std::size_t k) {
    if (k == 0)
        throw std::invalid_argument("gadget_P needs k >= 1");
    const std::size_t m = 2 * k - 1;
    detail::ProblemBuilder b("gadget-" + std::to_string(k));
    std::vector<VarId> v;
    for (std::size_t i = 1; i <= m; ++i)
        v.push_back(b.add_variable("v" + std::to_string(i), {"0", "1"}));
    for (std::size_t i = 0; i < m; ++i) {
        const std::string s = std::to_string(i + 1);
        if (i == 0) {
            b.add_operator("alpha1", {{v[0], 1}}, {{v[0], 0}});
            b.add_operator("beta1", {{v[0], 0}}, {{v[0], 1}});
        } else {
            b.add_operator("alpha" + s, {{v[i - 1], 0}, {v[i], 1}}, {{v[i], 0}});
            b.add_operator("beta" + s, {{v[i - 1], 1}, {v[i], 0}}, {{v[i], 1}});
        }
    }
    GadgetInstance g;
    g.problem = std::move(b.problem());
    std::vector<Binding> goal;
    for (std::size_t i = 0; i < m; ++i)
        goal.push_back({v[i], (i + 1) % 2 == 1 ? Value{1} : Value{0}});
    g.problem.goal = PartialState::from_sorted(std::move(goal));
    // <B_{2k-1}, A_{2k-2}, ..., A_2, B_1>
    for (std::size_t len = m; len >= 1; --len) {
        const char* name = len % 2 == 1 ? "beta" : "alpha";
        for (std::size_t i = 1; i <= len; ++i)
            g.canonical_plan.push_back(name + std::to_string(i));
    }
    return g;
}

namespace detail {

/// The three distinct variables of a clause, in order of first appearance,
/// with the literal sign of each.
inline std::vector<Literal> exact3_vars(const std::vector<Literal>& clause, std::size_t j) {
    std::vector<Literal> vars;
    for (Literal l : clause) {
        Literal x = std::abs(l);
        if (std::find(vars.begin(), vars.end(), x) == vars.end())
            vars.push_back(x);
    }
    if (vars.size() != 3)
        throw NotExact3Cnf("clause " + std::to_string(j + 1) + " has " + std::to_string(vars.size()) +
                           " distinct variables");
    return vars;
}

inline bool clause_true(const std::vector<Literal>& clause, Literal var, bool value) {
    for (Literal l : clause)
        if (std::abs(l) == var && (l > 0) == value)
            return true;
    return false;
}

} // namespace detail

/// 3SAT to a binary problem with a polytree causal graph: 2n+4k-1 variables
/// and 2n+14k-3 operators for n CNF variables and k clauses.
inline ReductionArtifact reduce_3sat_to_polytree(const CnfFormula& f) {
    if (f.clauses.empty())
        throw EmptyFormula("the polytree reduction needs at least one clause");
    std::vector<std::vector<Literal>> cvars;
    for (std::size_t j = 0; j < f.clauses.size(); ++j)
        cvars.push_back(detail::exact3_vars(f.clauses[j], j));

    const std::size_t n = static_cast<std::size_t>(f.num_vars);
    const std::size_t k = f.clauses.size();
    ReductionArtifact art;
    art.kind = ReductionKind::Polytree;
    art.formula = f;
    detail::ProblemBuilder b("polytree");

    std::vector<VarId> vx, vnx, vc, vcp, g;
    for (std::size_t i = 1; i <= n; ++i) {
        vx.push_back(b.add_variable("x" + std::to_string(i), {"0", "1"}));
        vnx.push_back(b.add_variable("nx" + std::to_string(i), {"0", "1"}));
        art.var_map.push_back({vx.back(), vnx.back()});
    }
    for (std::size_t j = 1; j <= k; ++j) {
        vc.push_back(b.add_variable("c" + std::to_string(j), {"0", "1"}));
        vcp.push_back(b.add_variable("c" + std::to_string(j) + "p", {"0", "1"}));
        art.clause_map.push_back({{}, {vc.back(), vcp.back()}});
    }
    for (std::size_t i = 1; i <= 2 * k - 1; ++i)
        g.push_back(b.add_variable("g" + std::to_string(i), {"0", "1"}));
    art.gadget_chain = g;

    // (1) commitments
    for (std::size_t i = 0; i < n; ++i) {
        b.add_operator("set_x" + std::to_string(i + 1), {{vx[i], 0}}, {{vx[i], 1}});
        b.add_operator("set_nx" + std::to_string(i + 1), {{vnx[i], 0}}, {{vnx[i], 1}});
    }
    // (2) clause toggles
    for (std::size_t j = 0; j < k; ++j) {
        const std::string s = std::to_string(j + 1);
        b.add_operator("set_c" + s + "p", {{vcp[j], 0}}, {{vcp[j], 1}});
        b.add_operator("set_c" + s, {{vcp[j], 0}, {vc[j], 0}}, {{vc[j], 1}});
        b.add_operator("reset_c" + s, {{vcp[j], 1}, {vc[j], 1}}, {{vc[j], 0}});
    }
    // (3) one operator per satisfying assignment of each clause
    for (std::size_t j = 0; j < k; ++j)
        for (unsigned bits = 0; bits < 8; ++bits) {
            bool sat = false;
            std::string tag;
            std::vector<Binding> pre{{vc[j], 1}, {g[0], 0}};
            for (unsigned t = 0; t < 3; ++t) {
                const bool val = (bits >> (2 - t)) & 1u;
                const auto x = static_cast<std::size_t>(cvars[j][t] - 1);
                sat = sat || detail::clause_true(f.clauses[j], cvars[j][t], val);
                tag += val ? '1' : '0';
                pre.push_back({vx[x], val ? Value{1} : Value{0}});
                pre.push_back({vnx[x], val ? Value{0} : Value{1}});
            }
            if (sat)
                b.add_operator("sat_c" + std::to_string(j + 1) + "_" + tag, std::move(pre), {{g[0], 1}});
        }
    // (4) reset of v_1 once every clause variable is back at 0
    {
        std::vector<Binding> pre{{g[0], 1}};
        for (VarId c : vc)
            pre.push_back({c, 0});
        b.add_operator("reset_g1", std::move(pre), {{g[0], 0}});
    }
    // (5) the gadget chain without alpha_1 / beta_1
    for (std::size_t i = 1; i < g.size(); ++i) {
        const std::string s = std::to_string(i + 1);
        b.add_operator("alpha" + s, {{g[i - 1], 0}, {g[i], 1}}, {{g[i], 0}});
        b.add_operator("beta" + s, {{g[i - 1], 1}, {g[i], 0}}, {{g[i], 1}});
    }

    art.problem = std::move(b.problem());
    std::vector<Binding> goal;
    for (std::size_t i = 0; i < g.size(); ++i)
        goal.push_back({g[i], (i + 1) % 2 == 1 ? Value{1} : Value{0}});
    art.problem.goal = PartialState(std::move(goal));
    art.commitment.assign(art.problem.operators.size(), std::nullopt);
    return art;
}

enum class GraphShape { Chain, Polytree };

/// Chain: the edges are exactly one directed Hamiltonian path. Polytree: the
/// underlying undirected multigraph has no cycle (an antiparallel pair counts
/// as one).
inline bool certify_shape(const CausalGraph& g, GraphShape shape) {
    if (shape == GraphShape::Chain) {
        if (g.n <= 1)
            return g.edge_count() == 0;
        if (g.edge_count() != g.n - 1)
            return false;
        std::optional<std::uint32_t> source;
        for (std::uint32_t v = 0; v < g.n; ++v) {
            if (g.successors[v].size() > 1 || g.predecessors[v].size() > 1)
                return false;
            if (g.predecessors[v].empty()) {
                if (source)
                    return false;
                source = v;
            }
        }
        if (!source)
            return false;
        std::size_t seen = 1;
        for (std::uint32_t v = *source; !g.successors[v].empty(); v = g.successors[v].front().index)
            if (++seen > g.n)
                return false;
        return seen == g.n;
    }
    std::vector<std::uint32_t> parent(g.n);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [u, v] : g.edges()) {
        auto a = find(u.index), c = find(v.index);
        if (a == c)
            return false;
        parent[a] = c;
    }
    return true;
}

inline std::vector<std::size_t> resolve_operator_ids(const PlanningProblem& p, const std::vector<std::string>& ids) {
    std::vector<std::size_t> out;
    for (const auto& id : ids) {
        auto i = p.find_operator(id);
        if (!i)
            throw InvalidPlan("unknown operator " + id);
        out.push_back(*i);
    }
    return out;
}

/// A satisfying assignment read off a valid plan. Chain: the value each
/// variable was committed to (0 when never committed). Polytree: x is 1 iff
/// (v_x=1, v_nx=0) held at some point of the execution.
inline std::vector<bool> extract_assignment(const std::vector<std::size_t>& plan, const ReductionArtifact& art) {
    const PlanningProblem& p = art.problem;
    std::vector<bool> sigma(static_cast<std::size_t>(art.formula.num_vars), false);
    State s = p.init;
    auto observe = [&] {
        if (art.kind != ReductionKind::Polytree)
            return;
        for (std::size_t i = 0; i < sigma.size(); ++i)
            if (s[art.var_map[i][0]] == 1 && s[art.var_map[i][1]] == 0)
                sigma[i] = true;
    };
    observe();
    for (std::size_t step = 0; step < plan.size(); ++step) {
        if (plan[step] >= p.operators.size())
            throw InvalidPlan("step " + std::to_string(step + 1) + " names no operator");
        const Operator& a = p.operators[plan[step]];
        if (!matches(s, a.pre))
            throw InvalidPlan("step " + std::to_string(step + 1) + ": " + a.id + " is not applicable");
        s = replace(std::move(s), a.post);
        if (art.kind == ReductionKind::Chain && plan[step] < art.commitment.size())
            if (const auto& c = art.commitment[plan[step]])
                sigma[static_cast<std::size_t>(c->cnf_var - 1)] = c->value;
        observe();
    }
    if (!matches(s, p.goal))
        throw InvalidPlan("plan does not reach the goal");
    return sigma;
}

/// The plan built from a satisfying assignment in the correctness argument
/// of each construction, as operator ids.
inline std::vector<std::string> sigma_plan(const ReductionArtifact& art, const std::vector<bool>& sigma) {
    const CnfFormula& f = art.formula;
    if (!f.satisfied_by(sigma))
        throw std::invalid_argument("assignment does not satisfy the formula");
    const PlanningProblem& p = art.problem;
    std::vector<std::string> out;
    auto emit = [&](std::size_t op_index) { out.push_back(p.operators[op_index].id); };

    if (art.kind == ReductionKind::Chain) {
        const std::size_t k = static_cast<std::size_t>(f.num_vars);
        constexpr Value Zero = 1, One = 2;
        auto val = [&](std::size_t i) { return sigma[i] ? One : Zero; };
        // locate operators by pre/post rather than by id
        auto find = [&](VarId var, Value from, Value to, std::optional<Value> prev) {
            for (std::size_t i = 0; i < p.operators.size(); ++i) {
                const Operator& a = p.operators[i];
                if (a.post.get(var) != to || a.pre.get(var) != from)
                    continue;
                if (var.index > 0 && var.index <= k && a.pre.get(VarId{var.index - 1}) != prev)
                    continue;
                return i;
            }
            throw InternalAssertion("chain reduction lacks an expected operator");
        };
        auto v = [](std::size_t i) { return VarId{static_cast<std::uint32_t>(i)}; };
        const VarId w{static_cast<std::uint32_t>(k)};
        for (std::size_t i = k; i-- > 0;)
            emit(find(v(i), 0, val(i), i > 0 ? std::optional<Value>(0) : std::nullopt));
        for (std::size_t j = 0; j < f.clauses.size(); ++j) {
            std::size_t first = k;
            for (Literal l : f.clauses[j]) {
                auto x = static_cast<std::size_t>(std::abs(l) - 1);
                if ((l > 0) == sigma[x])
                    first = std::min(first, x);
            }
            const Value c0 = art.clause_map[j].values[0], c1 = art.clause_map[j].values[1];
            auto msg = [&](std::size_t i) { return sigma[i] ? c1 : c0; };
            emit(find(v(first), val(first), msg(first), first > 0 ? std::optional<Value>(val(first - 1)) : std::nullopt));
            for (std::size_t i = first + 1; i < k; ++i)
                emit(find(v(i), val(i), msg(i), msg(i - 1)));
            for (std::size_t i = 0; i < p.operators.size(); ++i) {
                const Operator& a = p.operators[i];
                if (a.post.get(w) == static_cast<Value>(j + 1) && a.pre.get(v(k - 1)) == msg(k - 1)) {
                    emit(i);
                    break;
                }
            }
            for (std::size_t i = first; i < k; ++i)
                emit(find(v(i), msg(i), val(i), i > 0 ? std::optional<Value>(val(i - 1)) : std::nullopt));
        }
        return out;
    }

    // polytree
    const std::size_t k = f.clauses.size();
    for (std::size_t i = 0; i < sigma.size(); ++i)
        out.push_back((sigma[i] ? "set_x" : "set_nx") + std::to_string(i + 1));
    std::size_t next_clause = 0;
    auto clause_block = [&] {
        const std::size_t j = next_clause++;
        const std::string s = std::to_string(j + 1);
        std::string tag;
        for (Literal x : detail::exact3_vars(f.clauses[j], j))
            tag += sigma[static_cast<std::size_t>(x - 1)] ? '1' : '0';
        out.push_back("set_c" + s);
        out.push_back("sat_c" + s + "_" + tag);
        out.push_back("set_c" + s + "p");
        out.push_back("reset_c" + s);
    };
    for (std::size_t len = 2 * k - 1; len >= 1; --len) {
        const bool up = len % 2 == 1;
        for (std::size_t i = 1; i <= len; ++i) {
            if (i == 1) {
                if (up)
                    clause_block();
                else
                    out.push_back("reset_g1");
            } else {
                out.push_back((up ? "beta" : "alpha") + std::to_string(i));
            }
        }
    }
    return out;
}

/// Provenance sidecar: which planning variables and values stand for which
/// CNF variables and clauses.
inline Json provenance_to_json(const ReductionArtifact& art) {
    const PlanningProblem& p = art.problem;
    Json j;
    j["kind"] = to_string(art.kind);
    j["num_vars"] = art.formula.num_vars;
    j["clauses"] = art.formula.clauses;
    Json vars = Json::array();
    for (std::size_t i = 0; i < art.var_map.size(); ++i) {
        Json names = Json::array();
        for (VarId v : art.var_map[i])
            names.push_back(p.var_name(v));
        vars.push_back(Json{{"cnf_var", i + 1}, {"planning_vars", std::move(names)}});
    }
    j["variables"] = std::move(vars);
    Json clauses = Json::array();
    for (std::size_t c = 0; c < art.clause_map.size(); ++c) {
        Json entry{{"clause", c + 1}};
        if (art.kind == ReductionKind::Chain) {
            Json labels = Json::array();
            for (Value x : art.clause_map[c].values)
                labels.push_back(p.variables[0].domain.label(x));
            entry["values"] = std::move(labels);
        } else {
            Json names = Json::array();
            for (VarId v : art.clause_map[c].vars)
                names.push_back(p.var_name(v));
            entry["planning_vars"] = std::move(names);
        }
        clauses.push_back(std::move(entry));
    }
    j["clause_map"] = std::move(clauses);
    if (art.kind == ReductionKind::Chain) {
        Json commits = Json::array();
        for (std::size_t i = 0; i < art.commitment.size(); ++i)
            if (const auto& c = art.commitment[i])
                commits.push_back(Json{{"operator", p.operators[i].id}, {"cnf_var", c->cnf_var}, {"value", c->value}});
        j["commitments"] = std::move(commits);
    } else {
        Json chain = Json::array();
        for (VarId v : art.gadget_chain)
            chain.push_back(p.var_name(v));
        j["gadget_chain"] = std::move(chain);
    }
    return j;
}

} // namespace threes
