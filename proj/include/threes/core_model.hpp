#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "threes/errors.hpp"

namespace threes {

/// Dense index of a state variable inside one problem.
struct VarId {
    std::uint32_t index = 0;

    constexpr VarId() = default;
    constexpr explicit VarId(std::uint32_t i) : index(i) {}

    friend constexpr auto operator<=>(VarId, VarId) = default;
};

/// Index into a variable's domain.
using Value = std::uint32_t;

struct DomainSpec {
    std::uint32_t size = 2;
    std::vector<std::string> labels; // empty, or exactly `size` entries

    std::string label(Value x) const {
        if (x < labels.size())
            return labels[x];
        return std::to_string(x);
    }

    std::optional<Value> find(const std::string& label) const {
        if (labels.empty()) {
            try {
                std::size_t used = 0;
                unsigned long v = std::stoul(label, &used);
                if (used == label.size() && v < size)
                    return static_cast<Value>(v);
            } catch (const std::exception&) {
            }
            return std::nullopt;
        }
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end())
            return std::nullopt;
        return static_cast<Value>(it - labels.begin());
    }

    friend bool operator==(const DomainSpec&, const DomainSpec&) = default;
};

struct Variable {
    std::string name;
    DomainSpec domain;

    friend bool operator==(const Variable&, const Variable&) = default;
};

struct Binding {
    VarId var;
    Value value = 0;

    friend bool operator==(const Binding&, const Binding&) = default;
};

/// A finite mapping from variables to values, kept sorted by variable so that
/// equality is structural.
class PartialState {
public:
    PartialState() = default;

    explicit PartialState(std::vector<Binding> bindings) : bindings_(std::move(bindings)) {
        std::sort(bindings_.begin(), bindings_.end(),
                  [](const Binding& a, const Binding& b) { return a.var < b.var; });
        for (std::size_t i = 1; i < bindings_.size(); ++i)
            if (bindings_[i].var == bindings_[i - 1].var)
                throw std::invalid_argument("partial state binds variable " +
                                            std::to_string(bindings_[i].var.index) + " twice");
    }

    PartialState(std::initializer_list<std::pair<std::uint32_t, Value>> init)
        : PartialState(to_bindings(init)) {}

    /// Trusts the caller: `sorted` must be strictly increasing in VarId.
    static PartialState from_sorted(std::vector<Binding> sorted) {
        PartialState p;
        p.bindings_ = std::move(sorted);
        return p;
    }

    std::optional<Value> get(VarId v) const {
        auto it = lower(v);
        if (it != bindings_.end() && it->var == v)
            return it->value;
        return std::nullopt;
    }

    bool contains(VarId v) const { return get(v).has_value(); }
    std::size_t size() const noexcept { return bindings_.size(); }
    bool empty() const noexcept { return bindings_.empty(); }
    std::span<const Binding> bindings() const noexcept { return bindings_; }
    auto begin() const noexcept { return bindings_.begin(); }
    auto end() const noexcept { return bindings_.end(); }

    /// p | (V - {v})
    PartialState without(VarId v) const {
        std::vector<Binding> out;
        out.reserve(bindings_.size());
        for (const auto& b : bindings_)
            if (b.var != v)
                out.push_back(b);
        return from_sorted(std::move(out));
    }

    friend bool operator==(const PartialState&, const PartialState&) = default;

private:
    static std::vector<Binding> to_bindings(std::initializer_list<std::pair<std::uint32_t, Value>> init) {
        std::vector<Binding> out;
        out.reserve(init.size());
        for (auto [v, x] : init)
            out.push_back({VarId{v}, x});
        return out;
    }

    std::vector<Binding>::const_iterator lower(VarId v) const {
        return std::lower_bound(bindings_.begin(), bindings_.end(), v,
                                [](const Binding& b, VarId key) { return b.var < key; });
    }

    std::vector<Binding> bindings_;
};

/// p ▽ q: every variable bound in both gets the same value.
inline bool matches(const PartialState& p, const PartialState& q) {
    auto a = p.begin(), b = q.begin();
    while (a != p.end() && b != q.end()) {
        if (a->var < b->var) {
            ++a;
        } else if (b->var < a->var) {
            ++b;
        } else {
            if (a->value != b->value)
                return false;
            ++a;
            ++b;
        }
    }
    return true;
}

/// q ⊕ r: union of bindings, r wins on overlap.
inline PartialState replace(const PartialState& q, const PartialState& r) {
    std::vector<Binding> out;
    out.reserve(q.size() + r.size());
    auto a = q.begin(), b = r.begin();
    while (a != q.end() || b != r.end()) {
        if (b == r.end() || (a != q.end() && a->var < b->var)) {
            out.push_back(*a++);
        } else if (a == q.end() || b->var < a->var) {
            out.push_back(*b++);
        } else {
            out.push_back(*b++);
            ++a;
        }
    }
    return PartialState::from_sorted(std::move(out));
}

/// p ⊑ q: p matches q and binds no variable q leaves free.
inline bool subsumes(const PartialState& p, const PartialState& q) {
    auto b = q.begin();
    for (const auto& x : p) {
        while (b != q.end() && b->var < x.var)
            ++b;
        if (b == q.end() || b->var != x.var || b->value != x.value)
            return false;
    }
    return true;
}

/// q - r: the bindings of q that r does not carry with the same value.
inline PartialState difference(const PartialState& q, const PartialState& r) {
    std::vector<Binding> out;
    auto b = r.begin();
    for (const auto& x : q) {
        while (b != r.end() && b->var < x.var)
            ++b;
        if (b == r.end() || b->var != x.var || b->value != x.value)
            out.push_back(x);
    }
    return PartialState::from_sorted(std::move(out));
}

/// A total assignment over the variables of one problem.
struct State {
    std::vector<Value> values;

    Value operator[](VarId v) const { return values[v.index]; }
    std::size_t size() const noexcept { return values.size(); }

    friend bool operator==(const State&, const State&) = default;
};

inline bool matches(const State& s, const PartialState& p) {
    for (const auto& b : p)
        if (b.var.index >= s.size() || s.values[b.var.index] != b.value)
            return false;
    return true;
}

inline State replace(State s, const PartialState& p) {
    for (const auto& b : p)
        s.values[b.var.index] = b.value;
    return s;
}

struct Operator {
    std::string id;
    PartialState pre;
    PartialState post;

    bool is_unary() const noexcept { return post.size() == 1; }
    /// The affected variable of a unary operator.
    VarId target() const { return post.bindings().front().var; }
    Value target_value() const { return post.bindings().front().value; }

    friend bool operator==(const Operator&, const Operator&) = default;
};

inline State apply_operator(const State& s, const Operator& a) {
    if (!matches(s, a.pre))
        throw NotApplicable("operator " + a.id + " is not applicable");
    return replace(s, a.post);
}

struct PlanningProblem {
    std::string name;
    std::vector<Variable> variables;
    State init;
    PartialState goal;
    std::vector<Operator> operators;

    std::size_t var_count() const noexcept { return variables.size(); }

    std::optional<VarId> find_variable(const std::string& var_name) const {
        for (std::size_t i = 0; i < variables.size(); ++i)
            if (variables[i].name == var_name)
                return VarId{static_cast<std::uint32_t>(i)};
        return std::nullopt;
    }

    std::optional<std::size_t> find_operator(const std::string& id) const {
        for (std::size_t i = 0; i < operators.size(); ++i)
            if (operators[i].id == id)
                return i;
        return std::nullopt;
    }

    const std::string& var_name(VarId v) const { return variables[v.index].name; }

    friend bool operator==(const PlanningProblem&, const PlanningProblem&) = default;
};

enum class DiagnosticKind {
    EmptyDomain,
    LabelCount,
    InitNotTotal,
    InitOutOfDomain,
    UnknownVariable,
    ValueOutOfDomain,
    EmptyPost,
    DuplicateOperatorId,
    DuplicateVariableName,
};

struct Diagnostic {
    DiagnosticKind kind;
    std::string message;
};

/// Structural checks on a problem. Never throws; an empty result means well formed.
inline std::vector<Diagnostic> validate_problem(const PlanningProblem& p) {
    std::vector<Diagnostic> out;
    const std::size_t n = p.variables.size();

    std::unordered_set<std::string> names;
    for (const auto& var : p.variables) {
        if (var.domain.size == 0)
            out.push_back({DiagnosticKind::EmptyDomain, "variable " + var.name + " has an empty domain"});
        if (!var.domain.labels.empty() && var.domain.labels.size() != var.domain.size)
            out.push_back({DiagnosticKind::LabelCount, "variable " + var.name + " has " +
                                                           std::to_string(var.domain.labels.size()) +
                                                           " labels for a domain of size " +
                                                           std::to_string(var.domain.size)});
        if (!names.insert(var.name).second)
            out.push_back({DiagnosticKind::DuplicateVariableName, "duplicate variable name " + var.name});
    }

    if (p.init.size() != n)
        out.push_back({DiagnosticKind::InitNotTotal, "initial state assigns " + std::to_string(p.init.size()) +
                                                         " of " + std::to_string(n) + " variables"});
    for (std::size_t i = 0; i < std::min(n, p.init.size()); ++i)
        if (p.init.values[i] >= p.variables[i].domain.size)
            out.push_back({DiagnosticKind::InitOutOfDomain,
                           "initial value of " + p.variables[i].name + " is out of its domain"});

    auto check = [&](const PartialState& ps, const std::string& where) {
        for (const auto& b : ps) {
            if (b.var.index >= n)
                out.push_back({DiagnosticKind::UnknownVariable,
                               where + " mentions unknown variable #" + std::to_string(b.var.index)});
            else if (b.value >= p.variables[b.var.index].domain.size)
                out.push_back({DiagnosticKind::ValueOutOfDomain,
                               where + " assigns " + p.variables[b.var.index].name + " a value out of its domain"});
        }
    };
    check(p.goal, "goal");

    std::unordered_set<std::string> ids;
    for (const auto& a : p.operators) {
        check(a.pre, "pre of " + a.id);
        check(a.post, "post of " + a.id);
        if (a.post.empty())
            out.push_back({DiagnosticKind::EmptyPost, "operator " + a.id + " has an empty post-condition"});
        if (!ids.insert(a.id).second)
            out.push_back({DiagnosticKind::DuplicateOperatorId, "duplicate operator id " + a.id});
    }
    return out;
}

} // namespace threes
