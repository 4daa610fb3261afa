#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "threes/cnf.hpp"
#include "threes/core_model.hpp"
#include "threes/errors.hpp"
#include "threes/plan_tools.hpp"

namespace threes {

struct SearchBudget {
    std::uint64_t max_states = 10'000'000;
    std::optional<std::uint64_t> max_plan_length;
};

namespace detail {

/// Problem states packed into one 64-bit word, `width[v]` bits per variable.
class PackedModel {
public:
    struct Op {
        std::uint64_t pre_mask = 0, pre_val = 0;
        std::uint64_t post_mask = 0, post_val = 0;
    };

    explicit PackedModel(const PlanningProblem& p) {
        unsigned bits = 0;
        for (const auto& v : p.variables) {
            unsigned w = v.domain.size <= 1 ? 0 : static_cast<unsigned>(std::bit_width(v.domain.size - 1));
            shift_.push_back(bits);
            width_.push_back(w);
            bits += w;
        }
        if (bits > 64)
            throw TooLarge("problem " + p.name + " needs " + std::to_string(bits) + " bits per state");
        init_ = pack(p.init);
        auto fill = [&](const PartialState& ps, std::uint64_t& mask, std::uint64_t& val) {
            for (const auto& b : ps) {
                mask |= field_mask(b.var.index);
                val |= std::uint64_t{b.value} << shift_[b.var.index];
            }
        };
        fill(p.goal, goal_mask_, goal_val_);
        for (const auto& a : p.operators) {
            Op o;
            fill(a.pre, o.pre_mask, o.pre_val);
            fill(a.post, o.post_mask, o.post_val);
            ops_.push_back(o);
        }
    }

    std::uint64_t pack(const State& s) const {
        std::uint64_t x = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            x |= std::uint64_t{s.values[i]} << shift_[i];
        return x;
    }
    Value get(std::uint64_t s, std::size_t var) const { return static_cast<Value>((s & field_mask(var)) >> shift_[var]); }

    std::uint64_t init() const noexcept { return init_; }
    bool is_goal(std::uint64_t s) const noexcept { return (s & goal_mask_) == goal_val_; }
    const std::vector<Op>& ops() const noexcept { return ops_; }

    static bool applicable(std::uint64_t s, const Op& o) noexcept { return (s & o.pre_mask) == o.pre_val; }
    static std::uint64_t apply(std::uint64_t s, const Op& o) noexcept { return (s & ~o.post_mask) | o.post_val; }

private:
    std::uint64_t field_mask(std::size_t var) const {
        if (width_[var] == 0)
            return 0;
        std::uint64_t m = width_[var] == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_[var]) - 1;
        return m << shift_[var];
    }

    std::vector<unsigned> shift_, width_;
    std::uint64_t init_ = 0, goal_mask_ = 0, goal_val_ = 0;
    std::vector<Op> ops_;
};

/// Exact open-addressing map from packed state to a dense id.
class StateIndex {
public:
    static constexpr std::uint32_t empty = std::numeric_limits<std::uint32_t>::max();

    StateIndex() : slots_(1024, empty) {}

    /// Returns (id, inserted).
    std::pair<std::uint32_t, bool> insert(std::uint64_t key) {
        if ((keys_.size() + 1) * 10 > slots_.size() * 7)
            grow();
        std::size_t i = probe(key);
        if (slots_[i] != empty)
            return {slots_[i], false};
        auto id = static_cast<std::uint32_t>(keys_.size());
        slots_[i] = id;
        keys_.push_back(key);
        return {id, true};
    }

    std::optional<std::uint32_t> find(std::uint64_t key) const {
        std::uint32_t id = slots_[probe(key)];
        if (id == empty)
            return std::nullopt;
        return id;
    }

    std::uint64_t key(std::uint32_t id) const { return keys_[id]; }
    std::size_t size() const noexcept { return keys_.size(); }

private:
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        x *= 0xc4ceb9fe1a85ec53ULL;
        x ^= x >> 33;
        return x;
    }
    std::size_t probe(std::uint64_t key) const {
        const std::size_t mask = slots_.size() - 1;
        std::size_t i = mix(key) & mask;
        while (slots_[i] != empty && keys_[slots_[i]] != key)
            i = (i + 1) & mask;
        return i;
    }
    void grow() {
        std::vector<std::uint32_t> old(slots_.size() * 2, empty);
        slots_.swap(old);
        const std::size_t mask = slots_.size() - 1;
        for (std::uint32_t id = 0; id < keys_.size(); ++id) {
            std::size_t i = mix(keys_[id]) & mask;
            while (slots_[i] != empty)
                i = (i + 1) & mask;
            slots_[i] = id;
        }
    }

    std::vector<std::uint32_t> slots_;
    std::vector<std::uint64_t> keys_;
};

inline void charge(const StateIndex& seen, const SearchBudget& budget, const std::string& name) {
    if (seen.size() > budget.max_states)
        throw BudgetExceeded("search on " + name + " exceeded " + std::to_string(budget.max_states) + " states");
}

} // namespace detail

struct SearchResult {
    std::vector<std::size_t> plan; // operator indices
    std::uint64_t states_visited = 0;

    std::size_t length() const noexcept { return plan.size(); }
};

/// Breadth-first search from init. nullopt means the reachable space was
/// exhausted without meeting the goal; BudgetExceeded means no verdict.
/// Successors are generated in operator order, so the returned plan is
/// reproducible.
inline std::optional<SearchResult> bfs_shortest_plan(const PlanningProblem& p, const SearchBudget& budget = {}) {
    detail::PackedModel model(p);
    detail::StateIndex seen;
    std::vector<std::uint32_t> parent;
    std::vector<std::uint32_t> via;

    auto finish = [&](std::uint32_t id) {
        SearchResult r;
        r.states_visited = seen.size();
        while (id != 0) {
            r.plan.push_back(via[id]);
            id = parent[id];
        }
        std::reverse(r.plan.begin(), r.plan.end());
        return r;
    };

    seen.insert(model.init());
    parent.push_back(0);
    via.push_back(0);
    if (model.is_goal(model.init()))
        return finish(0);

    std::uint64_t depth = 0;
    std::uint32_t level_end = 1;
    for (std::uint32_t head = 0; head < seen.size(); ++head) {
        if (head == level_end) {
            ++depth;
            level_end = static_cast<std::uint32_t>(seen.size());
        }
        if (budget.max_plan_length && depth >= *budget.max_plan_length)
            throw BudgetExceeded("no plan of length at most " + std::to_string(*budget.max_plan_length) + " in " +
                                 p.name);
        const std::uint64_t s = seen.key(head);
        const auto& ops = model.ops();
        for (std::uint32_t oi = 0; oi < ops.size(); ++oi) {
            if (!detail::PackedModel::applicable(s, ops[oi]))
                continue;
            std::uint64_t t = detail::PackedModel::apply(s, ops[oi]);
            auto [id, fresh] = seen.insert(t);
            if (!fresh)
                continue;
            parent.push_back(head);
            via.push_back(oi);
            if (model.is_goal(t))
                return finish(id);
            detail::charge(seen, budget, p.name);
        }
    }
    return std::nullopt;
}

namespace detail {

/// Strong stubborn sets. Expanding only the applicable operators of a
/// stubborn set keeps at least one plan from every solvable state, so
/// solvability is decided exactly on a smaller graph.
class StubbornSets {
public:
    explicit StubbornSets(const PlanningProblem& p) : ops_(p.operators.size()) {
        const std::size_t nv = p.var_count();
        fact_base_.assign(nv + 1, 0);
        for (std::size_t v = 0; v < nv; ++v)
            fact_base_[v + 1] = fact_base_[v] + p.variables[v].domain.size;
        achievers_.resize(fact_base_[nv]);
        for (std::uint32_t i = 0; i < ops_.size(); ++i) {
            const Operator& a = p.operators[i];
            for (const auto& b : a.pre)
                ops_[i].pre.push_back({b.var.index, b.value});
            for (const auto& b : a.post) {
                ops_[i].post.push_back({b.var.index, b.value});
                achievers_[fact(b.var.index, b.value)].push_back(i);
            }
        }
        for (const auto& b : p.goal)
            goal_.push_back({b.var.index, b.value});
        // interference: conflicting effects, or one disables the other
        auto disables = [](const Op& x, const Op& y) {
            for (auto [v, val] : x.post)
                for (auto [w, wal] : y.pre)
                    if (v == w && val != wal)
                        return true;
            return false;
        };
        auto clash = [](const Op& x, const Op& y) {
            for (auto [v, val] : x.post)
                for (auto [w, wal] : y.post)
                    if (v == w && val != wal)
                        return true;
            return false;
        };
        interferes_.resize(ops_.size());
        for (std::uint32_t i = 0; i < ops_.size(); ++i)
            for (std::uint32_t j = 0; j < ops_.size(); ++j)
                if (i != j && (clash(ops_[i], ops_[j]) || disables(ops_[i], ops_[j]) || disables(ops_[j], ops_[i])))
                    interferes_[i].push_back(j);
        mark_.assign(ops_.size(), 0);
    }

    /// Applicable members of a stubborn set for the non-goal state `s`.
    template <class Get>
    void applicable(Get&& get, std::vector<std::uint32_t>& out) {
        out.clear();
        if (++epoch_ == 0) {
            std::fill(mark_.begin(), mark_.end(), 0);
            epoch_ = 1;
        }
        work_.clear();
        auto add_all = [&](const std::vector<std::uint32_t>& ops) {
            for (std::uint32_t o : ops)
                if (mark_[o] != epoch_) {
                    mark_[o] = epoch_;
                    work_.push_back(o);
                }
        };
        // cheapest unsatisfied fact among `facts`, by achiever count
        auto pick = [&](const std::vector<std::pair<std::uint32_t, Value>>& facts) {
            const std::vector<std::uint32_t>* best = nullptr;
            for (auto [v, val] : facts)
                if (get(v) != val) {
                    const auto& a = achievers_[fact(v, val)];
                    if (!best || a.size() < best->size())
                        best = &a;
                }
            return best;
        };
        if (const auto* a = pick(goal_))
            add_all(*a);
        for (std::size_t k = 0; k < work_.size(); ++k) {
            const std::uint32_t o = work_[k];
            if (const auto* a = pick(ops_[o].pre)) {
                add_all(*a);
            } else {
                out.push_back(o);
                add_all(interferes_[o]);
            }
        }
        std::sort(out.begin(), out.end());
    }

private:
    struct Op {
        std::vector<std::pair<std::uint32_t, Value>> pre, post;
    };
    std::size_t fact(std::uint32_t v, Value x) const { return fact_base_[v] + x; }

    std::vector<Op> ops_;
    std::vector<std::pair<std::uint32_t, Value>> goal_;
    std::vector<std::size_t> fact_base_;
    std::vector<std::vector<std::uint32_t>> achievers_;
    std::vector<std::vector<std::uint32_t>> interferes_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t epoch_ = 0;
    std::vector<std::uint32_t> work_;
};

} // namespace detail

/// Existence only. Explores the graph pruned by strong stubborn sets, which
/// preserves reachability of a goal state exactly but not path lengths.
inline bool solvable(const PlanningProblem& p, const SearchBudget& budget = {}) {
    detail::PackedModel model(p);
    if (model.is_goal(model.init()))
        return true;
    detail::StubbornSets sss(p);
    detail::StateIndex seen;
    seen.insert(model.init());
    std::vector<std::uint32_t> succ;
    const auto& ops = model.ops();
    for (std::uint32_t head = 0; head < seen.size(); ++head) {
        const std::uint64_t s = seen.key(head);
        sss.applicable([&](std::uint32_t v) { return model.get(s, v); }, succ);
        for (std::uint32_t oi : succ) {
            std::uint64_t t = detail::PackedModel::apply(s, ops[oi]);
            if (!seen.insert(t).second)
                continue;
            if (model.is_goal(t))
                return true;
            detail::charge(seen, budget, p.name);
        }
    }
    return false;
}

/// Fewest 0->1 changes of binary variable v over all plans, or nullopt when
/// no plan exists. 0-1 BFS: edges that raise v cost 1, all others 0.
inline std::optional<BigCount> min_flip_count(const PlanningProblem& p, VarId v, const SearchBudget& budget = {}) {
    if (v.index >= p.var_count() || p.variables[v.index].domain.size != 2)
        throw std::invalid_argument("min_flip_count needs a binary variable");
    detail::PackedModel model(p);
    detail::StateIndex seen;
    constexpr std::uint64_t inf = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> dist;
    std::vector<bool> done;
    std::deque<std::uint32_t> dq;

    seen.insert(model.init());
    dist.push_back(0);
    done.push_back(false);
    dq.push_back(0);
    while (!dq.empty()) {
        std::uint32_t u = dq.front();
        dq.pop_front();
        if (done[u])
            continue;
        done[u] = true;
        const std::uint64_t s = seen.key(u);
        if (model.is_goal(s))
            return BigCount(dist[u]);
        const bool low = model.get(s, v.index) == 0;
        for (const auto& op : model.ops()) {
            if (!detail::PackedModel::applicable(s, op))
                continue;
            std::uint64_t t = detail::PackedModel::apply(s, op);
            const std::uint64_t cost = (low && model.get(t, v.index) == 1) ? 1 : 0;
            auto [id, fresh] = seen.insert(t);
            if (fresh) {
                dist.push_back(inf);
                done.push_back(false);
                detail::charge(seen, budget, p.name);
            }
            if (dist[u] + cost < dist[id]) {
                dist[id] = dist[u] + cost;
                if (cost == 0)
                    dq.push_front(id);
                else
                    dq.push_back(id);
            }
        }
    }
    return std::nullopt;
}

/// Exhaustive SAT check; the first satisfying assignment in counting order.
inline std::optional<std::vector<bool>> brute_sat(const CnfFormula& f, int limit = 20) {
    if (f.num_vars > limit)
        throw TooLarge("brute_sat is limited to " + std::to_string(limit) + " variables");
    const std::uint64_t total = std::uint64_t{1} << f.num_vars;
    std::vector<bool> a(static_cast<std::size_t>(f.num_vars));
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        for (int i = 0; i < f.num_vars; ++i)
            a[static_cast<std::size_t>(i)] = (bits >> i) & 1u;
        if (f.satisfied_by(a))
            return a;
    }
    return std::nullopt;
}

} // namespace threes
