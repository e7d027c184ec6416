#pragma once

// Rewrite rules over the e-graph: patterns, the rule-file format, e-matching
// and rule application.

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mbagen/egraph.hpp"
#include "mbagen/expr.hpp"

namespace mbagen {

/// Expression tree whose leaves may also be pattern variables ("?name").
struct Pattern {
    enum class Kind : std::uint8_t { Hole, Var, Const, Apply };

    Kind kind = Kind::Const;
    Op op = Op::Add;
    std::uint64_t value = 0;
    std::string name;  // hole or variable name, without the '?'
    std::vector<Pattern> children;

    static Pattern hole(std::string name);
    static Pattern var(std::string name);
    static Pattern constant(std::uint64_t value);
    static Pattern apply(Op op, std::vector<Pattern> children);

    friend bool operator==(const Pattern&, const Pattern&) = default;
};

Pattern parse_pattern(std::string_view text, BitWidth width = {});
std::string print(const Pattern& p);
std::set<std::string> holes(const Pattern& p);

/// Holes become variables of the same name.
Expr to_expr(const Pattern& p);

struct Rule {
    std::string name;
    Pattern lhs;
    Pattern rhs;
    bool bidirectional = false;
};

/// One rule per nonblank line, "name : LHS => RHS" or "name : LHS <=> RHS";
/// lines starting with '#' are comments. A bidirectional rule yields two
/// directed rules, the reverse one named "<name>-rev".
/// Throws SyntaxError (with line) or UnboundRhsVar.
std::vector<Rule> parse_rules(std::string_view text, BitWidth width = {});

std::vector<Rule> load_rules(const std::string& path, BitWidth width = {});

/// Bindings sorted by pattern-variable name.
using Substitution = std::vector<std::pair<std::string, ClassId>>;

struct Match {
    std::string rule;
    ClassId root;
    Substitution subst;

    friend bool operator==(const Match&, const Match&) = default;
};

/// Every (root class, substitution) under which `pattern` embeds in the graph,
/// ordered by root id then bindings. Requires a rebuilt graph; runs the
/// per-class search in parallel.
std::vector<Match> ematch(const EGraph& g, const Pattern& pattern);
std::vector<Match> ematch(const EGraph& g, const Rule& rule);

/// Adds the instantiated right-hand side and merges it with the match root.
/// Returns whether the graph changed. Rebuild before the next ematch.
bool apply_match(EGraph& g, const Rule& rule, const Match& m);

/// Number of e-nodes instantiating `pattern` under `subst` would create.
std::size_t count_new_nodes(const EGraph& g, const Pattern& pattern, const Substitution& subst);

namespace reference {

/// Single-threaded e-matching, kept as the baseline for the parallel kernel.
std::vector<Match> ematch(const EGraph& g, const Pattern& pattern);

}  // namespace reference

}  // namespace mbagen
