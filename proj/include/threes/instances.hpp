#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "threes/causal_analysis.hpp"
#include "threes/core_model.hpp"
#include "threes/errors.hpp"

namespace threes {

namespace detail {

inline PlanningProblem binary_problem(std::string name, std::size_t n) {
    PlanningProblem p;
    p.name = std::move(name);
    for (std::size_t i = 1; i <= n; ++i)
        p.variables.push_back({"v" + std::to_string(i), DomainSpec{2, {}}});
    p.init.values.assign(n, 0);
    return p;
}

inline std::string op_id(char family, Value x, std::size_t var1) {
    return std::string(1, family) + "_" + std::to_string(x) + "^v" + std::to_string(var1);
}

} // namespace detail

/// The eight-variable example with goal (v5=1, v8=1).
inline PlanningProblem gen_table1() {
    PlanningProblem p = detail::binary_problem("table1", 8);
    auto add = [&](const char* id, PartialState pre, PartialState post) {
        p.operators.push_back({id, std::move(pre), std::move(post)});
    };
    // variables are 0-based here: v1 is 0
    add("a_1^v1", {{0, 0}}, {{0, 1}});
    add("a_0^v1", {{0, 1}}, {{0, 0}});
    add("a_1^v2", {{0, 1}, {1, 0}}, {{1, 1}});
    add("a_1^v3", {{0, 0}, {1, 1}, {2, 0}}, {{2, 1}});
    add("a_1^v5", {{2, 0}, {3, 0}, {4, 0}}, {{4, 1}});
    add("a_1^v6", {{2, 1}, {5, 0}}, {{5, 1}});
    add("a_0^v6", {{2, 1}, {5, 1}}, {{5, 0}});
    add("a_1^v7", {{5, 1}, {6, 0}}, {{6, 1}});
    add("a_1^v8", {{5, 0}, {6, 1}, {7, 0}}, {{7, 1}});
    p.goal = PartialState{{4, 1}, {7, 1}};
    return p;
}

namespace detail {

// (v_1 = ... = v_{i-2} = 0, v_{i-1} = 1, v_i = own), i is 1-based
inline PartialState pn_pre(std::size_t i, Value own, Value lower) {
    std::vector<Binding> b;
    for (std::size_t j = 1; j + 1 < i; ++j)
        b.push_back({VarId{static_cast<std::uint32_t>(j - 1)}, lower});
    if (i >= 2)
        b.push_back({VarId{static_cast<std::uint32_t>(i - 2)}, 1});
    b.push_back({VarId{static_cast<std::uint32_t>(i - 1)}, own});
    return PartialState::from_sorted(std::move(b));
}

inline PartialState unit(std::size_t i, Value x) {
    return PartialState::from_sorted({{VarId{static_cast<std::uint32_t>(i - 1)}, x}});
}

} // namespace detail

/// The chain-of-toggles family whose shortest plan has 2^n - 1 steps.
inline PlanningProblem gen_pn(std::size_t n) {
    if (n == 0)
        throw std::invalid_argument("gen_pn needs n >= 1");
    PlanningProblem p = detail::binary_problem("pn-" + std::to_string(n), n);
    for (std::size_t i = 1; i <= n; ++i) {
        p.operators.push_back({detail::op_id('a', 1, i), detail::pn_pre(i, 0, 0), detail::unit(i, 1)});
        p.operators.push_back({detail::op_id('a', 0, i), detail::pn_pre(i, 1, 0), detail::unit(i, 0)});
    }
    std::vector<Binding> goal;
    for (std::size_t i = 1; i <= n; ++i)
        goal.push_back({VarId{static_cast<std::uint32_t>(i - 1)}, i == n ? Value{1} : Value{0}});
    p.goal = PartialState::from_sorted(std::move(goal));
    return p;
}

/// gen_pn with every goal at 1, shortcut operators b_x^{v_i} listed before
/// a_x^{v_i}, and c_1^{v_n} last. The planner returns a (3^n - 1)/2 step plan
/// although n steps suffice.
inline PlanningProblem gen_pn_modified(std::size_t n) {
    if (n < 2)
        throw std::invalid_argument("gen_pn_modified needs n >= 2");
    PlanningProblem p = detail::binary_problem("pn-mod-" + std::to_string(n), n);
    auto b_pre = [](std::size_t i, Value own) {
        std::vector<Binding> b;
        for (std::size_t j = 1; j < i; ++j)
            b.push_back({VarId{static_cast<std::uint32_t>(j - 1)}, 1});
        b.push_back({VarId{static_cast<std::uint32_t>(i - 1)}, own});
        return PartialState::from_sorted(std::move(b));
    };
    for (std::size_t i = 1; i <= n; ++i) {
        p.operators.push_back({detail::op_id('b', 1, i), b_pre(i, 0), detail::unit(i, 1)});
        p.operators.push_back({detail::op_id('b', 0, i), b_pre(i, 1), detail::unit(i, 0)});
        p.operators.push_back({detail::op_id('a', 1, i), detail::pn_pre(i, 0, 0), detail::unit(i, 1)});
        p.operators.push_back({detail::op_id('a', 0, i), detail::pn_pre(i, 1, 0), detail::unit(i, 0)});
    }
    p.operators.push_back({detail::op_id('c', 1, n),
                           PartialState::from_sorted({{VarId{static_cast<std::uint32_t>(n - 2)}, 0},
                                                      {VarId{static_cast<std::uint32_t>(n - 1)}, 0}}),
                           detail::unit(n, 1)});
    std::vector<Binding> goal;
    for (std::size_t i = 0; i < n; ++i)
        goal.push_back({VarId{static_cast<std::uint32_t>(i)}, 1});
    p.goal = PartialState::from_sorted(std::move(goal));
    return p;
}

struct RandomSpec {
    std::size_t n = 6;
    std::uint64_t seed = 1;
    std::size_t max_ops_per_var = 4;
    double edge_density = 0.4;
    std::size_t max_attempts = 10'000;
};

namespace detail {

/// Draws from mt19937_64 by plain modulo so that sequences do not depend on
/// the standard library's distribution implementations.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : rng_() % bound; }
    bool chance(double p) { return static_cast<double>(below(1'000'000)) < p * 1'000'000.0; }
    bool coin() { return below(2) == 1; }

private:
    std::mt19937_64 rng_;
};

inline PlanningProblem random_candidate(const RandomSpec& spec, Draw& rnd, std::uint64_t attempt) {
    const std::size_t n = spec.n;
    PlanningProblem p = binary_problem("random-" + std::to_string(n) + "-" + std::to_string(spec.seed), n);
    if (attempt > 0)
        p.name += "-" + std::to_string(attempt);

    std::vector<std::uint32_t> order(n); // hidden topological order
    for (std::uint32_t i = 0; i < n; ++i)
        order[i] = i;
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rnd.below(i)]);

    std::vector<std::size_t> count(n, 0);
    auto add = [&](std::uint32_t v, Value x, std::vector<Binding> prevail) {
        prevail.push_back({VarId{v}, 1 - x});
        std::string id = op_id('a', x, v + 1);
        if (++count[v] > 1)
            id += "." + std::to_string(count[v]);
        p.operators.push_back({std::move(id), PartialState(std::move(prevail)), unit(v + 1, x)});
    };

    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::uint32_t v = order[pos];
        std::vector<std::uint32_t> parents;
        for (std::size_t q = 0; q < pos; ++q)
            if (rnd.chance(spec.edge_density))
                parents.push_back(order[q]);
        auto prevail = [&] {
            std::vector<Binding> b;
            for (std::uint32_t u : parents)
                if (rnd.coin())
                    b.push_back({VarId{u}, rnd.coin() ? Value{1} : Value{0}});
            return b;
        };
        const std::size_t budget = std::max<std::size_t>(1, spec.max_ops_per_var);
        switch (rnd.below(3)) {
        case 0: // at most one raising operator
            if (rnd.coin())
                add(v, 1, prevail());
            break;
        case 1: // reversible pairs
            for (std::size_t k = 0, pairs = 1 + rnd.below(std::max<std::size_t>(1, budget / 2)); k < pairs; ++k) {
                auto pv = prevail();
                add(v, 1, pv);
                add(v, 0, pv);
            }
            break;
        default: // unconstrained
            for (std::size_t k = 0, ops = 1 + rnd.below(budget); k < ops; ++k)
                add(v, rnd.coin() ? 1 : 0, prevail());
            break;
        }
    }

    std::vector<Binding> goal;
    for (std::uint32_t v = 0; v < n; ++v)
        switch (rnd.below(3)) {
        case 0:
            goal.push_back({VarId{v}, 0});
            break;
        case 1:
            goal.push_back({VarId{v}, 1});
            break;
        default:
            break;
        }
    p.goal = PartialState::from_sorted(std::move(goal));
    return p;
}

} // namespace detail

/// A random normal-form 3S instance; a pure function of `spec`.
inline PlanningProblem gen_random_3s(const RandomSpec& spec) {
    if (spec.n == 0)
        throw std::invalid_argument("gen_random_3s needs n >= 1");
    detail::Draw rnd(spec.seed);
    for (std::size_t attempt = 0; attempt < spec.max_attempts; ++attempt) {
        PlanningProblem p = detail::random_candidate(spec, rnd, attempt);
        if (is_3s(p).accepted) {
            p.name = "random-" + std::to_string(spec.n) + "-" + std::to_string(spec.seed);
            return p;
        }
    }
    throw Exhausted("no 3S instance after " + std::to_string(spec.max_attempts) + " attempts");
}

} // namespace threes
