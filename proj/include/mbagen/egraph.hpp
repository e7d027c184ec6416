#pragma once

// Hashconsed e-graph with union-find canonicalization and deferred
// congruence repair.

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mbagen/expr.hpp"

namespace mbagen {

class ClassId {
public:
    constexpr ClassId() noexcept = default;
    constexpr explicit ClassId(std::uint32_t v) noexcept : v_(v) {}
    constexpr std::uint32_t value() const noexcept { return v_; }
    friend constexpr auto operator<=>(ClassId, ClassId) noexcept = default;

private:
    std::uint32_t v_ = 0;
};

/// Operator, variable (interned symbol index) or constant.
struct Label {
    Expr::Kind kind = Expr::Kind::Const;
    Op op = Op::Add;
    std::uint64_t payload = 0;  // constant value or symbol index; 0 for operators

    static Label variable(std::uint64_t symbol) { return {Expr::Kind::Var, Op::Add, symbol}; }
    static Label constant(std::uint64_t value) { return {Expr::Kind::Const, Op::Add, value}; }
    static Label op_label(Op o) { return {Expr::Kind::Apply, o, 0}; }

    friend constexpr auto operator<=>(const Label&, const Label&) noexcept = default;
};

class ENode {
public:
    ENode() = default;
    explicit ENode(Label label) : label_(label) {}
    ENode(Op op, ClassId a) : label_(Label::op_label(op)), kids_{a, ClassId{}}, arity_(1) {}
    ENode(Op op, ClassId a, ClassId b) : label_(Label::op_label(op)), kids_{a, b}, arity_(2) {}

    const Label& label() const noexcept { return label_; }
    std::span<const ClassId> children() const noexcept { return {kids_.data(), arity_}; }
    std::span<ClassId> children() noexcept { return {kids_.data(), arity_}; }
    bool is_leaf() const noexcept { return arity_ == 0; }

    friend bool operator==(const ENode& a, const ENode& b) noexcept {
        return a.label_ == b.label_ && a.arity_ == b.arity_ && a.kids_ == b.kids_;
    }
    /// Label order, then child ids.
    friend std::strong_ordering operator<=>(const ENode& a, const ENode& b) noexcept {
        if (auto c = a.label_ <=> b.label_; c != 0) return c;
        if (auto c = a.arity_ <=> b.arity_; c != 0) return c;
        return a.kids_ <=> b.kids_;
    }

    std::size_t hash() const noexcept;

private:
    Label label_;
    std::array<ClassId, 2> kids_{};
    std::size_t arity_ = 0;
};

struct ENodeHash {
    std::size_t operator()(const ENode& n) const noexcept { return n.hash(); }
};

struct EClass {
    ClassId id;
    std::vector<ENode> nodes;
    std::vector<std::pair<ENode, ClassId>> parents;
};

class EGraph {
public:
    static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

    explicit EGraph(std::size_t hard_cap = kUnlimited) : hard_cap_(hard_cap) {}

    /// Hashconsed insertion of a single node. Throws CapacityExceeded when a
    /// new node would push node_count past the hard cap.
    ClassId add(ENode node);

    /// Bottom-up insertion of a whole expression; returns the root's class.
    ClassId add_expr(const Expr& e);

    /// Merges two classes (the smaller id survives). `second` is false when
    /// they were already equivalent. Call rebuild before the next query.
    std::pair<ClassId, bool> merge(ClassId a, ClassId b);

    /// Restores the hashcons and congruence invariants; returns the number
    /// of pending parent entries re-canonicalized (0 when already clean).
    std::size_t rebuild();

    /// Canonical representative. Throws InvalidId.
    ClassId find(ClassId c) const;

    /// Canonical e-nodes in the graph; exact after rebuild.
    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t class_count() const noexcept { return live_classes_; }
    bool is_clean() const noexcept { return pending_.empty() && !dirty_; }
    std::size_t hard_cap() const noexcept { return hard_cap_; }

    const EClass& eclass(ClassId c) const;

    /// Live canonical class ids in increasing order.
    std::vector<ClassId> class_ids() const;

    /// Class currently holding the canonical form of `node`, if any.
    std::optional<ClassId> lookup(ENode node) const;

    ENode canonicalize(ENode node) const;

    std::uint64_t intern(std::string_view name);
    std::optional<std::uint64_t> symbol(std::string_view name) const;
    const std::string& symbol_name(std::uint64_t index) const { return symbols_.at(index); }

    /// A single node as text: "x", "5", "+(0, 1)", "~(2)".
    std::string node_text(const ENode& n) const;

    /// One line per class, "class <id>: {node, node, ...}".
    std::string dump() const;

    /// Graphviz description with one cluster per e-class.
    std::string to_dot() const;

private:
    ClassId find_compress(ClassId c);
    void rebuild_classes();
    void check(ClassId c) const;

    std::size_t hard_cap_;
    std::vector<std::uint32_t> parent_;
    std::vector<EClass> classes_;
    std::unordered_map<ENode, ClassId, ENodeHash> memo_;
    std::vector<std::pair<ENode, ClassId>> pending_;
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, std::uint64_t> symbol_index_;
    std::size_t node_count_ = 0;
    std::size_t live_classes_ = 0;
    bool dirty_ = false;
};

}  // namespace mbagen

template <>
struct std::hash<mbagen::ClassId> {
    std::size_t operator()(mbagen::ClassId c) const noexcept { return std::hash<std::uint32_t>{}(c.value()); }
};
