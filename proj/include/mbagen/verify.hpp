#pragma once

// Solver-free equivalence checking: exhaustive enumeration at small widths,
// seeded random sampling otherwise.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbagen/expr.hpp"
#include "mbagen/rewrite.hpp"

namespace mbagen {

struct Counterexample {
    Environment env;
    std::uint64_t lhs_value = 0;
    std::uint64_t rhs_value = 0;
};

struct CheckResult {
    bool passed = true;
    std::optional<Counterexample> counterexample;
    /// Cases examined; on failure, up to and including the counterexample.
    std::uint64_t cases_checked = 0;
};

/// Largest number of environments an exhaustive check may enumerate.
inline constexpr std::uint64_t kExhaustiveLimit = std::uint64_t{1} << 24;

/// Exhaustive: every assignment of the rule's pattern variables. Throws
/// TooManyCases when (2^bits)^vars exceeds kExhaustiveLimit.
CheckResult check_rule(const Rule& rule, BitWidth width);

/// `trials` seeded random assignments; identical seeds give identical results.
CheckResult check_rule_random(const Rule& rule, BitWidth width, std::uint64_t trials, std::uint64_t seed);

/// Exhaustive over the union of free variables when that is within
/// kExhaustiveLimit environments, otherwise `trials` random environments.
CheckResult check_equivalence(const Expr& a, const Expr& b, BitWidth width, std::uint64_t trials,
                              std::uint64_t seed);

/// The individual strategies, for callers that want to force one.
CheckResult check_exhaustive(const Expr& a, const Expr& b, BitWidth width);
CheckResult check_random(const Expr& a, const Expr& b, BitWidth width, std::uint64_t trials,
                         std::uint64_t seed);

/// One soundness check performed while admitting a rule.
struct RuleAudit {
    std::string rule;
    unsigned bits = 0;
    bool exhaustive = true;
    CheckResult result;
};

/// Admission checks for a rule: exhaustive at 4 and 8 bits (random when the
/// variable count makes that infeasible) plus `random_trials` 64-bit trials.
std::vector<RuleAudit> audit_rule(const Rule& rule, std::uint64_t random_trials = 10'000,
                                  std::uint64_t seed = 0);

namespace reference {

/// Tree-walking, single-threaded counterparts of the batched kernels. They
/// enumerate cases in the same order and so report the same counterexample.
CheckResult check_exhaustive(const Expr& a, const Expr& b, BitWidth width);
CheckResult check_random(const Expr& a, const Expr& b, BitWidth width, std::uint64_t trials,
                         std::uint64_t seed);

}  // namespace reference

}  // namespace mbagen
