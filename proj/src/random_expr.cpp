#include "mbagen/random_expr.hpp"

#include <stdexcept>

namespace mbagen {

namespace {

constexpr Op kUnary[] = {Op::Neg, Op::Not};
constexpr Op kBinary[] = {Op::Add, Op::Sub, Op::Mul, Op::And, Op::Or, Op::Xor};

Expr build(std::mt19937_64& rng, const RandomExprOptions& opts, std::size_t size) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (size == 1) {
        if (opts.vars.empty() || coin(rng) < opts.const_probability) {
            std::uniform_int_distribution<std::uint64_t> value(0, opts.max_const);
            return Expr::constant(value(rng), opts.width);
        }
        std::uniform_int_distribution<std::size_t> pick(0, opts.vars.size() - 1);
        return Expr::var(opts.vars[pick(rng)]);
    }
    if (size == 2 || coin(rng) < opts.unary_probability) {
        std::uniform_int_distribution<std::size_t> pick(0, std::size(kUnary) - 1);
        return Expr::apply(kUnary[pick(rng)], build(rng, opts, size - 1));
    }
    std::uniform_int_distribution<std::size_t> pick(0, std::size(kBinary) - 1);
    std::uniform_int_distribution<std::size_t> split(1, size - 2);
    const Op op = kBinary[pick(rng)];
    const std::size_t left = split(rng);
    Expr lhs = build(rng, opts, left);
    Expr rhs = build(rng, opts, size - 1 - left);
    return Expr::apply(op, std::move(lhs), std::move(rhs));
}

}  // namespace

Expr random_expr(std::mt19937_64& rng, const RandomExprOptions& opts) {
    if (opts.size == 0) throw std::invalid_argument("expression size must be positive");
    return build(rng, opts, opts.size);
}

}  // namespace mbagen
