#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "threes/causal_analysis.hpp"
#include "threes/core_model.hpp"
#include "threes/errors.hpp"
#include "threes/macro_planner.hpp"

namespace threes {

using BigCount = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Expanded length of every macro in a table, indexed like the table.
struct LengthTable {
    std::vector<BigCount> macro_length;

    const BigCount& operator[](std::size_t i) const { return macro_length[i]; }
};

namespace detail {

inline void check_step(Step s, const MacroPlan& plan) {
    if (s.is_macro() ? s.index >= plan.table.size() : s.index >= plan.operator_ids.size())
        throw UnresolvedRef(std::string(s.is_macro() ? "macro" : "operator") + " #" + std::to_string(s.index) +
                            " does not exist");
}

} // namespace detail

/// Each macro's length is computed once. Throws CircularRef if a macro
/// reaches itself.
inline LengthTable compute_lengths(const MacroPlan& plan) {
    const std::size_t m = plan.table.size();
    LengthTable lt;
    lt.macro_length.assign(m, 0);
    enum : std::uint8_t { Fresh, Open, Done };
    std::vector<std::uint8_t> mark(m, Fresh);

    // explicit stack of (macro, next step) so deep tables do not overflow
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    for (std::size_t root = 0; root < m; ++root) {
        if (mark[root] != Fresh)
            continue;
        mark[root] = Open;
        stack.emplace_back(root, 0);
        while (!stack.empty()) {
            auto& [mi, pos] = stack.back();
            const auto& steps = plan.table[mi].steps;
            if (pos == steps.size()) {
                BigCount total = 0;
                for (Step s : steps)
                    total += s.is_macro() ? lt.macro_length[s.index] : BigCount(1);
                lt.macro_length[mi] = std::move(total);
                mark[mi] = Done;
                stack.pop_back();
                continue;
            }
            Step s = steps[pos++];
            detail::check_step(s, plan);
            if (!s.is_macro())
                continue;
            if (mark[s.index] == Open)
                throw CircularRef("macro " + plan.table[s.index].id + " refers to itself");
            if (mark[s.index] == Fresh) {
                mark[s.index] = Open;
                stack.emplace_back(s.index, 0);
            }
        }
    }
    return lt;
}

inline BigCount sequence_length(std::span<const Step> steps, const LengthTable& lt) {
    BigCount total = 0;
    for (Step s : steps)
        total += s.is_macro() ? lt[s.index] : BigCount(1);
    return total;
}

inline BigCount plan_length(const MacroPlan& plan, const LengthTable& lt) {
    for (Step s : plan.top)
        detail::check_step(s, plan);
    return sequence_length(plan.top, lt);
}

inline BigCount plan_length(const MacroPlan& plan) { return plan_length(plan, compute_lengths(plan)); }

/// The i-th operator (1-based) of the full expansion, found by walking down
/// through macro lengths. Returns an index into plan.operator_ids.
inline std::size_t nth_operator_index(const MacroPlan& plan, const LengthTable& lt, BigCount i) {
    if (i < 1 || i > plan_length(plan, lt))
        throw IndexOutOfRange("index " + i.str() + " is outside the plan");
    std::span<const Step> seq = plan.top;
    while (true) {
        std::size_t k = 0;
        auto len = [&](Step s) { return s.is_macro() ? lt[s.index] : BigCount(1); };
        while (len(seq[k]) < i) {
            i -= len(seq[k]);
            ++k;
        }
        Step o = seq[k];
        if (!o.is_macro())
            return o.index;
        seq = plan.table[o.index].steps;
    }
}

inline const std::string& nth_operator(const MacroPlan& plan, const LengthTable& lt, const BigCount& i) {
    return plan.operator_ids[nth_operator_index(plan, lt, i)];
}

inline const std::string& nth_operator(const MacroPlan& plan, const BigCount& i) {
    return nth_operator(plan, compute_lengths(plan), i);
}

/// Lazy left-to-right expansion. Memory is proportional to the macro
/// nesting depth.
class PlanExpander {
public:
    explicit PlanExpander(const MacroPlan& plan) : plan_(&plan) {
        compute_lengths(plan); // rejects circular tables up front
        for (Step s : plan.top)
            detail::check_step(s, plan);
        stack_.push_back({plan.top, 0});
    }

    /// Next operator index into operator_ids, or nullopt at the end.
    std::optional<std::size_t> next() {
        while (!stack_.empty()) {
            auto& top = stack_.back();
            if (top.pos == top.seq.size()) {
                stack_.pop_back();
                continue;
            }
            Step s = top.seq[top.pos++];
            if (!s.is_macro())
                return s.index;
            stack_.push_back({plan_->table[s.index].steps, 0});
        }
        return std::nullopt;
    }

    std::size_t depth() const noexcept { return stack_.size(); }

private:
    struct Frame {
        std::span<const Step> seq;
        std::size_t pos;
    };
    const MacroPlan* plan_;
    std::vector<Frame> stack_;
};

inline std::vector<std::string> expand_all(const MacroPlan& plan) {
    std::vector<std::string> out;
    PlanExpander ex(plan);
    while (auto i = ex.next())
        out.push_back(plan.operator_ids[*i]);
    return out;
}

/// Writes the expansion one operator id per line; stops after `limit`
/// operators when given. Returns the number written.
inline std::uint64_t write_expansion(std::ostream& os, const MacroPlan& plan,
                                     std::optional<std::uint64_t> limit = std::nullopt) {
    PlanExpander ex(plan);
    std::uint64_t written = 0;
    while (!limit || written < *limit) {
        auto i = ex.next();
        if (!i)
            break;
        os << plan.operator_ids[*i] << '\n';
        ++written;
    }
    return written;
}

struct ValidationReport {
    bool valid = false;
    std::uint64_t steps_applied = 0;
    std::uint64_t failed_step = 0; // 1-based; 0 when every step applied
    bool goal_reached = false;
    std::string message;
    State final_state;
};

/// Executes the expansion from init. Never throws; structural problems with
/// the plan are reported in the message.
inline ValidationReport validate(const MacroPlan& plan, const PlanningProblem& p) {
    ValidationReport r;
    r.final_state = p.init;
    try {
        std::unordered_map<std::string, std::size_t> by_id;
        for (std::size_t i = 0; i < p.operators.size(); ++i)
            by_id.emplace(p.operators[i].id, i);
        std::vector<std::optional<std::size_t>> resolved(plan.operator_ids.size());
        for (std::size_t i = 0; i < plan.operator_ids.size(); ++i)
            if (auto it = by_id.find(plan.operator_ids[i]); it != by_id.end())
                resolved[i] = it->second;

        PlanExpander ex(plan);
        State s = p.init;
        while (auto oi = ex.next()) {
            const std::uint64_t step = r.steps_applied + 1;
            if (!resolved[*oi]) {
                r.failed_step = step;
                r.message = "step " + std::to_string(step) + ": unknown operator " + plan.operator_ids[*oi];
                r.final_state = std::move(s);
                return r;
            }
            const Operator& a = p.operators[*resolved[*oi]];
            if (!matches(s, a.pre)) {
                r.failed_step = step;
                r.message = "step " + std::to_string(step) + ": operator " + a.id + " is not applicable";
                r.final_state = std::move(s);
                return r;
            }
            s = replace(std::move(s), a.post);
            ++r.steps_applied;
        }
        r.goal_reached = matches(s, p.goal);
        r.valid = r.goal_reached;
        if (!r.goal_reached)
            r.message = "goal not reached after " + std::to_string(r.steps_applied) + " steps";
        r.final_state = std::move(s);
    } catch (const Error& e) {
        r.valid = false;
        r.message = e.what();
    }
    return r;
}

struct UpperBounds {
    std::vector<BigCount> level; // level[i] bounds macros of depth-i variables
    BigCount total;              // with the actual depth histogram
    BigCount generic;            // from n and d alone, rounded up
    BigRational generic_exact;
};

inline UpperBounds upper_bounds(const DepthProfile& prof) {
    UpperBounds ub;
    const std::size_t levels = prof.c.size();
    ub.level.assign(levels, 1);
    for (std::size_t i = levels; i-- > 1;)
        ub.level[i - 1] = ub.level[i] * (1 + 2 * BigCount(prof.c[i]));

    BigCount product = 1;
    std::size_t n = 0;
    for (auto c : prof.c) {
        product *= 1 + 2 * BigCount(c);
        n += c;
    }
    ub.total = (product - 1) / 2;

    const std::size_t d1 = levels; // d + 1
    if (d1 == 0) {
        ub.generic = 0;
        ub.generic_exact = 0;
        return ub;
    }
    // (1 + 2n/(d+1))^(d+1) = (d+1+2n)^(d+1) / (d+1)^(d+1)
    const auto e = static_cast<unsigned>(d1);
    BigRational power(boost::multiprecision::pow(BigCount(d1 + 2 * n), e),
                      boost::multiprecision::pow(BigCount(d1), e));
    ub.generic_exact = (power - 1) / 2;
    BigCount num = boost::multiprecision::numerator(ub.generic_exact);
    BigCount den = boost::multiprecision::denominator(ub.generic_exact);
    ub.generic = num / den + (num % den != 0 ? 1 : 0);
    return ub;
}

} // namespace threes
