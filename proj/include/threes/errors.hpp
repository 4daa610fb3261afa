#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace threes {

/// Base class for every recoverable error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotApplicable : public Error { public: using Error::Error; };
class NotBinary : public Error { public: using Error::Error; };
class Cyclic : public Error { public: using Error::Error; };
class UnresolvedRef : public Error { public: using Error::Error; };
class IllDefined : public Error { public: using Error::Error; };
class CircularRef : public Error { public: using Error::Error; };
class Not3S : public Error { public: using Error::Error; };
class IndexOutOfRange : public Error { public: using Error::Error; };
class EmptyFormula : public Error { public: using Error::Error; };
class NotExact3Cnf : public Error { public: using Error::Error; };
class InvalidPlan : public Error { public: using Error::Error; };
class BudgetExceeded : public Error { public: using Error::Error; };
class TooLarge : public Error { public: using Error::Error; };
class Exhausted : public Error { public: using Error::Error; };

/// Malformed textual input (JSON, DIMACS). `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An internal invariant that should be unreachable on valid inputs was hit.
class InternalAssertion : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace threes
