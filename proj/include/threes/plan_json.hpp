#pragma once

#include <istream>
#include <iterator>
#include <string>
#include <unordered_map>

#include "threes/macro_planner.hpp"
#include "threes/problem_json.hpp"

namespace threes {

/// {"macros": [{"id", "steps", "pre", "post"}], "plan": [...]}. Without a
/// problem the pre/post objects are written empty.
inline Json plan_to_json(const MacroPlan& plan, const PlanningProblem* p = nullptr) {
    Json macros = Json::array();
    for (const auto& m : plan.table.macros()) {
        Json steps = Json::array();
        for (Step s : m.steps)
            steps.push_back(plan.step_id(s));
        macros.push_back(Json{{"id", m.id},
                              {"steps", std::move(steps)},
                              {"pre", p ? assignment_to_json(m.pre, *p) : Json::object()},
                              {"post", p ? assignment_to_json(m.post, *p) : Json::object()}});
    }
    Json top = Json::array();
    for (Step s : plan.top)
        top.push_back(plan.step_id(s));
    return Json{{"macros", std::move(macros)}, {"plan", std::move(top)}};
}

/// Step ids are looked up among macro ids first, then operator ids. With a
/// problem, operator ids must exist in it and operator steps index its
/// operator list; without one, operators are numbered by first appearance
/// and pre/post are parsed only if a problem is available.
inline MacroPlan plan_from_json(const Json& j, const PlanningProblem* p = nullptr) {
    using namespace detail;
    const Json& macros = member(j, "macros", "plan file");
    const Json& top = member(j, "plan", "plan file");
    if (!macros.is_array() || !top.is_array())
        throw ParseError("\"macros\" and \"plan\" must be arrays");

    std::unordered_map<std::string, std::size_t> macro_index;
    for (std::size_t i = 0; i < macros.size(); ++i) {
        std::string id = as_string(member(macros[i], "id", "macro"), "macro id");
        if (!macro_index.emplace(id, i).second)
            throw ParseError("duplicate macro id " + id);
    }

    MacroPlan plan;
    std::unordered_map<std::string, std::size_t> op_index;
    if (p) {
        for (std::size_t i = 0; i < p->operators.size(); ++i) {
            plan.operator_ids.push_back(p->operators[i].id);
            op_index.emplace(p->operators[i].id, i);
        }
    }
    auto resolve = [&](const Json& sj, const std::string& where) {
        std::string id = as_string(sj, where);
        if (auto it = macro_index.find(id); it != macro_index.end())
            return Step::macro(it->second);
        if (auto it = op_index.find(id); it != op_index.end())
            return Step::op(it->second);
        if (p)
            throw ParseError(where + " refers to unknown step " + id);
        op_index.emplace(id, plan.operator_ids.size());
        plan.operator_ids.push_back(id);
        return Step::op(plan.operator_ids.size() - 1);
    };

    for (const auto& mj : macros) {
        Macro m;
        m.id = as_string(mj["id"], "macro id");
        const Json& steps = member(mj, "steps", "macro " + m.id);
        if (!steps.is_array())
            throw ParseError("steps of " + m.id + " must be an array");
        for (const auto& sj : steps)
            m.steps.push_back(resolve(sj, "macro " + m.id));
        if (p) {
            if (auto it = mj.find("pre"); it != mj.end())
                m.pre = parse_assignment(*it, *p, "pre of " + m.id);
            if (auto it = mj.find("post"); it != mj.end())
                m.post = parse_assignment(*it, *p, "post of " + m.id);
            if (m.post.size() == 1) {
                const Binding b = m.post.bindings().front();
                if (macro_id(*p, b.var, b.value) == m.id)
                    m.key = MacroKey{b.var, b.value};
            }
        }
        try {
            plan.table.add(std::move(m));
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what());
        }
    }
    for (const auto& sj : top)
        plan.top.push_back(resolve(sj, "plan"));
    return plan;
}

inline MacroPlan parse_plan(const std::string& text, const PlanningProblem* p = nullptr) {
    return plan_from_json(detail::parse_json_text(text), p);
}

inline MacroPlan read_plan(std::istream& in, const PlanningProblem* p = nullptr) {
    std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_plan(text, p);
}

inline std::string dump_plan(const MacroPlan& plan, const PlanningProblem* p = nullptr) {
    return plan_to_json(plan, p).dump(2) + "\n";
}

} // namespace threes
