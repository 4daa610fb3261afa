#pragma once

#include <cstdint>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "threes/errors.hpp"

namespace threes {

/// Signed DIMACS literal: +i is x_i, -i is its negation (i >= 1).
using Literal = int;

struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<Literal>> clauses;

    std::size_t num_clauses() const noexcept { return clauses.size(); }

    /// assignment[i-1] is the value of x_i
    bool satisfied_by(const std::vector<bool>& assignment) const {
        for (const auto& c : clauses) {
            bool sat = false;
            for (Literal l : c) {
                bool v = assignment.at(static_cast<std::size_t>(std::abs(l) - 1));
                if ((l > 0) == v) {
                    sat = true;
                    break;
                }
            }
            if (!sat)
                return false;
        }
        return true;
    }

    friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

/// DIMACS "p cnf V C" with 0-terminated clauses; lines starting with 'c' are
/// comments. A clause may span lines. Counts in the header are enforced.
inline CnfFormula parse_dimacs(std::istream& in) {
    CnfFormula f;
    bool header = false;
    std::size_t declared_clauses = 0;
    std::vector<Literal> current;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == 'c' || tok == "%")
            continue;
        if (tok == "p") {
            if (header)
                throw ParseError("second problem line", lineno);
            std::string fmt;
            long long nv = -1, nc = -1;
            if (!(ls >> fmt >> nv >> nc) || fmt != "cnf" || nv < 0 || nc < 0)
                throw ParseError("malformed problem line", lineno);
            std::string extra;
            if (ls >> extra)
                throw ParseError("trailing text on problem line", lineno);
            f.num_vars = static_cast<int>(nv);
            declared_clauses = static_cast<std::size_t>(nc);
            header = true;
            continue;
        }
        if (!header)
            throw ParseError("clause before the problem line", lineno);
        ls.clear();
        ls.str(line);
        while (ls >> tok) {
            char* end = nullptr;
            long v = std::strtol(tok.c_str(), &end, 10);
            if (*end != '\0')
                throw ParseError("bad literal '" + tok + "'", lineno);
            if (v == 0) {
                if (current.empty())
                    throw ParseError("empty clause", lineno);
                f.clauses.push_back(std::move(current));
                current.clear();
                continue;
            }
            if (std::labs(v) > f.num_vars)
                throw ParseError("literal " + tok + " exceeds the declared variable count", lineno);
            current.push_back(static_cast<Literal>(v));
        }
    }
    if (!header)
        throw ParseError("missing problem line");
    if (!current.empty())
        throw ParseError("last clause is not terminated by 0", lineno);
    if (f.clauses.size() != declared_clauses)
        throw ParseError("header declares " + std::to_string(declared_clauses) + " clauses but " +
                             std::to_string(f.clauses.size()) + " were given",
                         lineno);
    return f;
}

inline CnfFormula parse_dimacs(const std::string& text) {
    std::istringstream in(text);
    return parse_dimacs(in);
}

inline std::string to_dimacs(const CnfFormula& f) {
    std::ostringstream os;
    os << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const auto& c : f.clauses) {
        for (Literal l : c)
            os << l << ' ';
        os << "0\n";
    }
    return os.str();
}

} // namespace threes
