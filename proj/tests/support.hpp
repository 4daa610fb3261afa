#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "threes/threes.hpp"

namespace threes::testing {

/// Seeded CNF with 1..max_vars variables and 1..max_clauses clauses of one
/// to three literals over distinct variables.
inline CnfFormula random_cnf(std::uint64_t seed, int max_vars = 4, int max_clauses = 4) {
    detail::Draw rnd(seed);
    CnfFormula f;
    f.num_vars = 1 + static_cast<int>(rnd.below(static_cast<std::uint64_t>(max_vars)));
    const auto k = 1 + rnd.below(static_cast<std::uint64_t>(max_clauses));
    for (std::uint64_t j = 0; j < k; ++j) {
        std::vector<int> vars(static_cast<std::size_t>(f.num_vars));
        for (int i = 0; i < f.num_vars; ++i)
            vars[static_cast<std::size_t>(i)] = i + 1;
        for (std::size_t i = vars.size(); i > 1; --i)
            std::swap(vars[i - 1], vars[rnd.below(i)]);
        const auto len = 1 + rnd.below(std::min<std::uint64_t>(3, vars.size()));
        std::vector<Literal> c;
        for (std::uint64_t i = 0; i < len; ++i)
            c.push_back(rnd.coin() ? vars[i] : -vars[i]);
        f.clauses.push_back(std::move(c));
    }
    return f;
}

/// Seeded exact-3CNF over 3..max_vars variables with 1..max_clauses clauses.
inline CnfFormula random_3cnf(std::uint64_t seed, int max_vars = 4, int max_clauses = 3) {
    detail::Draw rnd(seed);
    CnfFormula f;
    f.num_vars = 3 + static_cast<int>(rnd.below(static_cast<std::uint64_t>(max_vars - 2)));
    const auto k = 1 + rnd.below(static_cast<std::uint64_t>(max_clauses));
    for (std::uint64_t j = 0; j < k; ++j) {
        std::vector<int> vars(static_cast<std::size_t>(f.num_vars));
        for (int i = 0; i < f.num_vars; ++i)
            vars[static_cast<std::size_t>(i)] = i + 1;
        for (std::size_t i = vars.size(); i > 1; --i)
            std::swap(vars[i - 1], vars[rnd.below(i)]);
        std::vector<Literal> c;
        for (int i = 0; i < 3; ++i)
            c.push_back(rnd.coin() ? vars[static_cast<std::size_t>(i)] : -vars[static_cast<std::size_t>(i)]);
        f.clauses.push_back(std::move(c));
    }
    return f;
}

/// Every sign pattern over x1, x2, x3.
inline CnfFormula all_sign_patterns() {
    CnfFormula f;
    f.num_vars = 3;
    for (int m = 0; m < 8; ++m)
        f.clauses.push_back({(m & 4) ? -1 : 1, (m & 2) ? -2 : 2, (m & 1) ? -3 : 3});
    return f;
}

/// "(v1=0, v2=1)" using variable names and labels.
inline std::string show(const PartialState& ps, const PlanningProblem& p) {
    std::string out = "(";
    for (const auto& b : ps) {
        if (out.size() > 1)
            out += ", ";
        out += p.var_name(b.var) + "=" + p.variables[b.var.index].domain.label(b.value);
    }
    return out + ")";
}

inline std::vector<std::string> step_ids(const MacroPlan& plan, const std::vector<Step>& steps) {
    std::vector<std::string> out;
    for (Step s : steps)
        out.push_back(plan.step_id(s));
    return out;
}

/// A flat plan over the problem's operators.
inline MacroPlan flat_plan(const PlanningProblem& p, const std::vector<std::size_t>& ops) {
    MacroPlan plan;
    for (const auto& a : p.operators)
        plan.operator_ids.push_back(a.id);
    for (auto i : ops)
        plan.top.push_back(Step::op(i));
    return plan;
}

/// Number of value changes of each variable along the expansion.
inline std::vector<std::uint64_t> change_counts(const MacroPlan& plan, const PlanningProblem& p) {
    std::vector<std::uint64_t> changes(p.var_count(), 0);
    State s = p.init;
    PlanExpander ex(plan);
    while (auto oi = ex.next()) {
        auto idx = p.find_operator(plan.operator_ids[*oi]);
        if (!idx)
            break;
        const Operator& a = p.operators[*idx];
        if (!matches(s, a.pre))
            break;
        for (const auto& b : a.post)
            if (s.values[b.var.index] != b.value)
                ++changes[b.var.index];
        s = replace(std::move(s), a.post);
    }
    return changes;
}

/// Expected i-th operator (1-based) of the gen_pn plan: the binary reflected
/// Gray code changes bit ctz(i) at step i.
inline std::string pn_gray_operator(const BigCount& i) {
    std::size_t k = boost::multiprecision::lsb(i);
    BigCount g = i ^ (i >> 1);
    bool bit = boost::multiprecision::bit_test(g, static_cast<unsigned>(k));
    return std::string("a_") + (bit ? "1" : "0") + "^v" + std::to_string(k + 1);
}

} // namespace threes::testing
