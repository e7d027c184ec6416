#include "mbagen/expr.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "mbagen/detail/grammar.hpp"
#include "mbagen/errors.hpp"

namespace mbagen {

std::string_view symbol(Op op) noexcept {
    switch (op) {
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Neg: return "-";
        case Op::And: return "&";
        case Op::Or: return "|";
        case Op::Xor: return "^";
        case Op::Not: return "~";
    }
    return "?";
}

std::string_view label_name(Op op) noexcept {
    return op == Op::Neg ? std::string_view("neg") : symbol(op);
}

BitWidth::BitWidth(unsigned bits) : bits_(bits) {
    if (bits != 4 && bits != 8 && bits != 16 && bits != 32 && bits != 64)
        throw std::invalid_argument("bit width must be one of 4, 8, 16, 32, 64 (got " +
                                    std::to_string(bits) + ")");
}

Expr::Expr() {
    static const auto zero = [] {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Const;
        return n;
    }();
    node_ = zero;
}

Expr Expr::var(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::constant(std::uint64_t value, BitWidth width) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->value = width.reduce(value);
    return Expr(std::move(n));
}

Expr Expr::apply(Op op, Expr lhs) {
    if (arity(op) != 1) throw std::invalid_argument("binary operator given one operand");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Apply;
    n->op = op;
    n->children = {std::move(lhs)};
    return Expr(std::move(n));
}

Expr Expr::apply(Op op, Expr lhs, Expr rhs) {
    if (arity(op) != 2) throw std::invalid_argument("unary operator given two operands");
    auto n = std::make_shared<Node>();
    n->kind = Kind::Apply;
    n->op = op;
    n->children = {std::move(lhs), std::move(rhs)};
    return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Expr::Kind::Var: return a.name() == b.name();
        case Expr::Kind::Const: return a.value() == b.value();
        case Expr::Kind::Apply:
            return a.op() == b.op() &&
                   std::ranges::equal(a.children(), b.children(),
                                      [](const Expr& x, const Expr& y) { return x == y; });
    }
    return false;
}

namespace {

struct ExprBuilder {
    using Node = Expr;
    BitWidth width;

    Expr make_var(std::string name) { return Expr::var(std::move(name)); }
    Expr make_const(std::uint64_t v) { return Expr::constant(v, width); }
    Expr make_hole(std::string, std::size_t column) {
        throw SyntaxError(column, "pattern variables are only allowed in rules");
    }
    Expr make_unary(Op op, Expr e) { return Expr::apply(op, std::move(e)); }
    Expr make_binary(Op op, Expr a, Expr b) { return Expr::apply(op, std::move(a), std::move(b)); }
};

void print_into(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case Expr::Kind::Var: out += e.name(); return;
        case Expr::Kind::Const: out += std::to_string(e.value()); return;
        case Expr::Kind::Apply: break;
    }
    auto kids = e.children();
    out += '(';
    if (kids.size() == 1) {
        out += symbol(e.op());
        out += ' ';
        print_into(kids[0], out);
    } else {
        print_into(kids[0], out);
        out += ' ';
        out += symbol(e.op());
        out += ' ';
        print_into(kids[1], out);
    }
    out += ')';
}

std::uint64_t eval(const Expr& e, const Environment& env) {
    switch (e.kind()) {
        case Expr::Kind::Var: {
            auto it = env.find(e.name());
            if (it == env.end()) throw UnboundVariable(e.name());
            return it->second;
        }
        case Expr::Kind::Const: return e.value();
        case Expr::Kind::Apply: break;
    }
    auto kids = e.children();
    const std::uint64_t a = eval(kids[0], env);
    if (kids.size() == 1) return e.op() == Op::Neg ? std::uint64_t{0} - a : ~a;
    const std::uint64_t b = eval(kids[1], env);
    switch (e.op()) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::And: return a & b;
        case Op::Or: return a | b;
        case Op::Xor: return a ^ b;
        default: return 0;
    }
}

}  // namespace

Expr parse(std::string_view text, BitWidth width) {
    ExprBuilder builder{width};
    detail::GrammarParser<ExprBuilder> parser(text, builder);
    return parser.parse_all();
}

std::string print(const Expr& e) {
    std::string out;
    print_into(e, out);
    return out;
}

// Arithmetic wraps modulo 2^64 and is reduced once at the end; every
// operator is a congruence modulo 2^k, so this equals per-step reduction.
std::uint64_t evaluate(const Expr& e, const Environment& env, BitWidth width) {
    return width.reduce(eval(e, env));
}

std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    std::unordered_set<const void*> seen;
    std::vector<Expr> stack{e};
    while (!stack.empty()) {
        Expr cur = std::move(stack.back());
        stack.pop_back();
        if (!seen.insert(cur.identity()).second) continue;
        if (cur.is_var()) out.insert(cur.name());
        for (const Expr& c : cur.children()) stack.push_back(c);
    }
    return out;
}

namespace {

template <class Combine>
std::uint64_t fold_dag(const Expr& e, std::unordered_map<const void*, std::uint64_t>& memo,
                       Combine combine) {
    if (auto it = memo.find(e.identity()); it != memo.end()) return it->second;
    std::uint64_t acc = 0;
    bool first = true;
    for (const Expr& c : e.children()) {
        const std::uint64_t v = fold_dag(c, memo, combine);
        acc = first ? v : combine.merge(acc, v);
        first = false;
    }
    const std::uint64_t result = combine.finish(acc, e.children().size());
    memo.emplace(e.identity(), result);
    return result;
}

}  // namespace

std::uint64_t tree_size(const Expr& e) {
    struct {
        std::uint64_t merge(std::uint64_t a, std::uint64_t b) const { return a + b; }
        std::uint64_t finish(std::uint64_t acc, std::size_t) const { return acc + 1; }
    } sum;
    std::unordered_map<const void*, std::uint64_t> memo;
    return fold_dag(e, memo, sum);
}

std::size_t depth(const Expr& e) {
    struct {
        std::uint64_t merge(std::uint64_t a, std::uint64_t b) const { return std::max(a, b); }
        std::uint64_t finish(std::uint64_t acc, std::size_t n) const { return n == 0 ? 0 : acc + 1; }
    } longest;
    std::unordered_map<const void*, std::uint64_t> memo;
    return static_cast<std::size_t>(fold_dag(e, memo, longest));
}

}  // namespace mbagen
