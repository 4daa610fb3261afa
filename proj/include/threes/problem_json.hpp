#pragma once

#include <istream>
#include <iterator>
#include <string>

#include <nlohmann/json.hpp>

#include "threes/core_model.hpp"
#include "threes/errors.hpp"

namespace threes {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::size_t line_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n')
            ++line;
    return line;
}

inline Json parse_json_text(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(e.what(), line_of(text, e.byte));
    }
}

inline const Json& member(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object())
        throw ParseError(where + " must be an object");
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(where + " lacks \"" + key + "\"");
    return *it;
}

inline std::string as_string(const Json& j, const std::string& where) {
    if (j.is_string())
        return j.get<std::string>();
    if (j.is_number_integer())
        return std::to_string(j.get<long long>());
    throw ParseError(where + " must be a string");
}

// Labels "0", "1", ... carry no information beyond the index, so they are
// stored as an empty label list. Emission restores them.
inline bool default_labels(const std::vector<std::string>& labels) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != std::to_string(i))
            return false;
    return true;
}

inline PartialState parse_assignment(const Json& j, const PlanningProblem& p, const std::string& where) {
    if (!j.is_object())
        throw ParseError(where + " must be an object");
    std::vector<Binding> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        auto v = p.find_variable(it.key());
        if (!v)
            throw ParseError(where + " mentions unknown variable " + it.key());
        std::string label = as_string(it.value(), where + "." + it.key());
        auto x = p.variables[v->index].domain.find(label);
        if (!x)
            throw ParseError(where + " assigns " + it.key() + " the unknown value " + label);
        out.push_back({*v, *x});
    }
    try {
        return PartialState(std::move(out));
    } catch (const std::invalid_argument& e) {
        throw ParseError(where + ": " + e.what());
    }
}

} // namespace detail

inline Json assignment_to_json(const PartialState& ps, const PlanningProblem& p) {
    Json j = Json::object();
    for (const auto& b : ps)
        j[p.var_name(b.var)] = p.variables[b.var.index].domain.label(b.value);
    return j;
}

inline Json problem_to_json(const PlanningProblem& p) {
    Json j;
    j["name"] = p.name;
    Json vars = Json::array();
    for (const auto& v : p.variables) {
        Json dom = Json::array();
        for (Value x = 0; x < v.domain.size; ++x)
            dom.push_back(v.domain.label(x));
        vars.push_back(Json{{"name", v.name}, {"domain", std::move(dom)}});
    }
    j["variables"] = std::move(vars);
    Json init = Json::object();
    for (std::size_t i = 0; i < p.variables.size() && i < p.init.size(); ++i)
        init[p.variables[i].name] = p.variables[i].domain.label(p.init.values[i]);
    j["init"] = std::move(init);
    j["goal"] = assignment_to_json(p.goal, p);
    Json ops = Json::array();
    for (const auto& a : p.operators)
        ops.push_back(Json{{"id", a.id}, {"pre", assignment_to_json(a.pre, p)}, {"post", assignment_to_json(a.post, p)}});
    j["operators"] = std::move(ops);
    return j;
}

inline PlanningProblem problem_from_json(const Json& j) {
    using namespace detail;
    PlanningProblem p;
    p.name = as_string(member(j, "name", "problem"), "name");

    const Json& vars = member(j, "variables", "problem");
    if (!vars.is_array())
        throw ParseError("variables must be an array");
    for (const auto& vj : vars) {
        Variable v;
        v.name = as_string(member(vj, "name", "variable"), "variable name");
        const Json& dom = member(vj, "domain", "variable " + v.name);
        if (!dom.is_array() || dom.empty())
            throw ParseError("domain of " + v.name + " must be a non-empty array");
        for (const auto& l : dom)
            v.domain.labels.push_back(as_string(l, "domain of " + v.name));
        v.domain.size = static_cast<std::uint32_t>(v.domain.labels.size());
        if (default_labels(v.domain.labels))
            v.domain.labels.clear();
        if (p.find_variable(v.name))
            throw ParseError("duplicate variable " + v.name);
        p.variables.push_back(std::move(v));
    }

    PartialState init = parse_assignment(member(j, "init", "problem"), p, "init");
    if (init.size() != p.variables.size())
        throw ParseError("init must assign every variable");
    p.init.values.resize(p.variables.size());
    for (const auto& b : init)
        p.init.values[b.var.index] = b.value;

    p.goal = parse_assignment(member(j, "goal", "problem"), p, "goal");

    const Json& ops = member(j, "operators", "problem");
    if (!ops.is_array())
        throw ParseError("operators must be an array");
    for (const auto& oj : ops) {
        Operator a;
        a.id = as_string(member(oj, "id", "operator"), "operator id");
        a.pre = parse_assignment(member(oj, "pre", "operator " + a.id), p, "pre of " + a.id);
        a.post = parse_assignment(member(oj, "post", "operator " + a.id), p, "post of " + a.id);
        p.operators.push_back(std::move(a));
    }
    return p;
}

inline PlanningProblem parse_problem(const std::string& text) {
    return problem_from_json(detail::parse_json_text(text));
}

inline PlanningProblem read_problem(std::istream& in) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_problem(text);
}

inline std::string dump_problem(const PlanningProblem& p) { return problem_to_json(p).dump(2) + "\n"; }

} // namespace threes
