#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mbagen {

/// Base class for every error the engine reports.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression or rule text. `position` is a 1-based column for
/// expressions; for rule files `line` is set as well.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, std::string message, std::size_t line = 0)
        : Error(format(position, message, line)),
          position_(position),
          line_(line),
          detail_(std::move(message)) {}

    std::size_t position() const noexcept { return position_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    static std::string format(std::size_t position, const std::string& message,
                              std::size_t line) {
        std::string out = "syntax error";
        if (line != 0) out += " at line " + std::to_string(line);
        out += (line != 0 ? ", column " : " at column ") + std::to_string(position);
        return out + ": " + message;
    }

    std::size_t position_;
    std::size_t line_;
    std::string detail_;
};

class UnboundVariable : public Error {
public:
    explicit UnboundVariable(const std::string& name)
        : Error("unbound variable '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnboundRhsVar : public Error {
public:
    UnboundRhsVar(const std::string& rule, const std::string& var)
        : Error("rule '" + rule + "': right-hand side uses ?" + var +
                " which does not occur on the left-hand side"),
          rule_(rule),
          var_(var) {}
    const std::string& rule() const noexcept { return rule_; }
    const std::string& var() const noexcept { return var_; }

private:
    std::string rule_;
    std::string var_;
};

class InvalidId : public Error {
public:
    explicit InvalidId(std::uint32_t id) : Error("invalid e-class id " + std::to_string(id)) {}
};

class CapacityExceeded : public Error {
public:
    explicit CapacityExceeded(std::size_t cap)
        : Error("e-graph node capacity of " + std::to_string(cap) + " exceeded") {}
};

class Unextractable : public Error {
public:
    Unextractable(std::uint32_t root, std::size_t rounds)
        : Error("no term for class " + std::to_string(root) + " within " + std::to_string(rounds) +
                " extraction rounds") {}
};

class OutputTooLarge : public Error {
public:
    OutputTooLarge(std::uint64_t estimate, std::uint64_t limit)
        : Error("extracted term would have " + std::to_string(estimate) + " nodes (limit " +
                std::to_string(limit) + ")"),
          estimate_(estimate) {}
    std::uint64_t estimate() const noexcept { return estimate_; }

private:
    std::uint64_t estimate_;
};

class TooManyCases : public Error {
public:
    TooManyCases(unsigned vars, unsigned bits)
        : Error("exhaustive check over " + std::to_string(vars) + " variables at " +
                std::to_string(bits) + " bits exceeds 2^24 cases") {}
};

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("corpus is empty") {}
};

}  // namespace mbagen
