#pragma once

// Mixed boolean-arithmetic expression language: operators, immutable
// expression trees, fixed-width evaluation, parsing and printing.

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mbagen {

enum class Op : std::uint8_t { Add, Sub, Mul, Neg, And, Or, Xor, Not };

enum class Category : std::uint8_t { Arithmetic, Boolean };

inline constexpr Op kAllOps[] = {Op::Add, Op::Sub, Op::Mul, Op::Neg,
                                 Op::And, Op::Or,  Op::Xor, Op::Not};

constexpr int arity(Op op) noexcept { return (op == Op::Neg || op == Op::Not) ? 1 : 2; }

constexpr Category category(Op op) noexcept {
    switch (op) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Neg: return Category::Arithmetic;
        default: return Category::Boolean;
    }
}

/// Surface symbol. Unary and binary minus share "-".
std::string_view symbol(Op op) noexcept;

/// Distinct name per operator ("neg" vs "-"), used as a metric label.
std::string_view label_name(Op op) noexcept;

/// Two's-complement word size shared by an engine instance.
class BitWidth {
public:
    constexpr BitWidth() noexcept = default;
    /// Throws std::invalid_argument unless bits is one of 4, 8, 16, 32, 64.
    explicit BitWidth(unsigned bits);

    constexpr unsigned bits() const noexcept { return bits_; }
    constexpr std::uint64_t mask() const noexcept {
        return bits_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits_) - 1;
    }
    constexpr std::uint64_t reduce(std::uint64_t v) const noexcept { return v & mask(); }

    friend constexpr bool operator==(BitWidth, BitWidth) noexcept = default;

private:
    unsigned bits_ = 64;
};

using Environment = std::map<std::string, std::uint64_t, std::less<>>;

/// Immutable expression handle. Copies share structure; subterms may be
/// shared between several parents, but equality and every measurement
/// treat the value as a tree.
class Expr {
public:
    enum class Kind : std::uint8_t { Var, Const, Apply };

    /// The constant 0.
    Expr();

    static Expr var(std::string name);
    static Expr constant(std::uint64_t value, BitWidth width = {});
    static Expr apply(Op op, Expr lhs);
    static Expr apply(Op op, Expr lhs, Expr rhs);

    Kind kind() const noexcept { return node_->kind; }
    bool is_var() const noexcept { return kind() == Kind::Var; }
    bool is_const() const noexcept { return kind() == Kind::Const; }
    bool is_apply() const noexcept { return kind() == Kind::Apply; }

    const std::string& name() const noexcept { return node_->name; }
    std::uint64_t value() const noexcept { return node_->value; }
    Op op() const noexcept { return node_->op; }
    std::span<const Expr> children() const noexcept { return node_->children; }

    /// Address of the shared node; stable for the lifetime of any handle.
    const void* identity() const noexcept { return node_.get(); }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node {
        Kind kind;
        Op op = Op::Add;
        std::uint64_t value = 0;
        std::string name;
        std::vector<Expr> children;
    };

    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

/// Parses text under the grammar
///   expr := xor ("|" xor)* ; xor := and ("^" and)* ; and := sum ("&" sum)* ;
///   sum := term (("+"|"-") term)* ; term := unary ("*" unary)* ;
///   unary := ("-"|"~") unary | atom ; atom := IDENT | NUMBER | "(" expr ")"
/// Constants (decimal or 0x-hex) are reduced modulo 2^width.
/// Throws SyntaxError with a 1-based column.
Expr parse(std::string_view text, BitWidth width = {});

/// Fully parenthesized form, e.g. "((x | y) + (- z))". Round-trips through parse.
std::string print(const Expr& e);

/// Tree-walking evaluator. Throws UnboundVariable when env is partial.
std::uint64_t evaluate(const Expr& e, const Environment& env, BitWidth width = {});

std::set<std::string> free_vars(const Expr& e);

/// Number of nodes of the tree (shared subterms counted once per occurrence).
std::uint64_t tree_size(const Expr& e);

/// Edges on the longest root-to-leaf path; a leaf has depth 0.
std::size_t depth(const Expr& e);

}  // namespace mbagen
