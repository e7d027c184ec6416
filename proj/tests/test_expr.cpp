#include <gtest/gtest.h>

#include <random>

#include "mbagen/errors.hpp"
#include "mbagen/expr.hpp"
#include "mbagen/random_expr.hpp"
#include "oracle.hpp"

using namespace mbagen;

TEST(Parse, PrecedenceFollowsGrammar) {
    EXPECT_EQ(print(parse("x + y * z")), "(x + (y * z))");
    EXPECT_EQ(print(parse("x | y ^ z & w")), "(x | (y ^ (z & w)))");
    EXPECT_EQ(print(parse("x & y + z")), "(x & (y + z))");
    EXPECT_EQ(print(parse("x - y - z")), "((x - y) - z)");
    EXPECT_EQ(print(parse("-~x")), "(- (~ x))");
    EXPECT_EQ(print(parse("(x | y) + (x & y)")), "((x | y) + (x & y))");
}

TEST(Parse, UnaryMinusIsDistinctFromSubtraction) {
    const Expr e = parse("-x");
    ASSERT_TRUE(e.is_apply());
    EXPECT_EQ(e.op(), Op::Neg);
    EXPECT_EQ(parse("0 - x").op(), Op::Sub);
}

TEST(Parse, ConstantsAreReducedAtParseTime) {
    EXPECT_EQ(parse("0x1F").value(), 31u);
    EXPECT_EQ(parse("17", BitWidth(4)).value(), 1u);
    EXPECT_EQ(parse("0xFFFFFFFFFFFFFFFF").value(), ~0ull);
    EXPECT_EQ(parse("18446744073709551617").value(), 1u);
}

TEST(Parse, ErrorsCarryOneBasedColumn) {
    try {
        parse("x +");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.position(), 4u);
    }
    try {
        parse("x + $");
        FAIL() << "expected SyntaxError";
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.position(), 5u);
    }
    EXPECT_THROW(parse("(x + y"), SyntaxError);
    EXPECT_THROW(parse("x y"), SyntaxError);
    EXPECT_THROW(parse(""), SyntaxError);
    EXPECT_THROW(parse("?a + 1"), SyntaxError);
}

TEST(Parse, NestingIsBounded) {
    std::string deep(5000, '(');
    deep += "x";
    deep += std::string(5000, ')');
    EXPECT_THROW(parse(deep), SyntaxError);
}

TEST(Evaluate, WrapsAtWidth) {
    const Environment env{{"x", 255}};
    EXPECT_EQ(evaluate(parse("x + 1"), env, BitWidth(8)), 0u);
    EXPECT_EQ(evaluate(parse("-x"), {{"x", 1}}, BitWidth(4)), 15u);
    EXPECT_EQ(evaluate(parse("~0"), {}, BitWidth(16)), 0xFFFFu);
    EXPECT_EQ(evaluate(parse("x * x"), {{"x", 1ull << 32}}), 0u);
}

TEST(Evaluate, UnboundVariableThrows) {
    EXPECT_THROW(evaluate(parse("x + y"), {{"x", 1}}), UnboundVariable);
}

TEST(BitWidthTest, RejectsUnsupportedWidths) {
    EXPECT_THROW(BitWidth(7), std::invalid_argument);
    EXPECT_EQ(BitWidth(4).mask(), 15u);
    EXPECT_EQ(BitWidth().bits(), 64u);
}

TEST(Measures, SizeDepthAndVars) {
    const Expr e = parse("(x | y) + (x & ~z)");
    EXPECT_EQ(tree_size(e), 8u);
    EXPECT_EQ(depth(e), 3u);
    EXPECT_EQ(free_vars(e), (std::set<std::string>{"x", "y", "z"}));
    EXPECT_EQ(depth(parse("x")), 0u);
}

TEST(Measures, SharedSubtermsCountPerOccurrence) {
    Expr e = Expr::var("x");
    for (int i = 0; i < 40; ++i) e = Expr::apply(Op::Add, e, e);
    EXPECT_EQ(tree_size(e), (std::uint64_t{1} << 41) - 1);
    EXPECT_EQ(depth(e), 40u);
}

namespace {

RandomExprOptions random_opts(std::mt19937_64& rng) {
    RandomExprOptions o;
    o.vars = {"x", "y", "z"};
    o.size = 1 + rng() % 25;
    o.const_probability = 0.3;
    o.max_const = 1000;
    return o;
}

}  // namespace

TEST(Property, PrintParseRoundTrip) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10000; ++i) {
        const Expr e = random_expr(rng, random_opts(rng));
        ASSERT_EQ(parse(print(e)), e) << print(e);
    }
}

TEST(Property, RandomExprHasRequestedSize) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 1000; ++i) {
        const auto o = random_opts(rng);
        EXPECT_EQ(oracle::size(random_expr(rng, o)), o.size);
    }
}

TEST(Property, EvaluationMatchesStepwiseOracleAndStaysInRange) {
    std::mt19937_64 rng(3);
    const unsigned widths[] = {4, 8, 16, 32, 64};
    for (int i = 0; i < 2000; ++i) {
        const Expr e = random_expr(rng, random_opts(rng));
        const unsigned bits = widths[rng() % 5];
        const Environment env{{"x", rng()}, {"y", rng()}, {"z", rng()}};
        const std::map<std::string, std::uint64_t> plain(env.begin(), env.end());
        const std::uint64_t v = evaluate(e, env, BitWidth(bits));
        EXPECT_EQ(v, oracle::eval(e, plain, bits)) << print(e);
        EXPECT_EQ(v & ~BitWidth(bits).mask(), 0u);
    }
}

TEST(Property, NarrowWidthIsReductionOfWideWidth) {
    std::mt19937_64 rng(4);
    const unsigned widths[] = {4, 8, 16, 32, 64};
    for (int i = 0; i < 2000; ++i) {
        const Expr e = random_expr(rng, random_opts(rng));
        const Environment env{{"x", rng()}, {"y", rng()}, {"z", rng()}};
        const std::size_t lo = rng() % 5;
        const std::size_t hi = lo + rng() % (5 - lo);
        const BitWidth narrow(widths[lo]), wide(widths[hi]);
        EXPECT_EQ(evaluate(e, env, narrow), narrow.reduce(evaluate(e, env, wide))) << print(e);
    }
}
