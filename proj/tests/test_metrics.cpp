#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "mbagen/errors.hpp"
#include "mbagen/metrics.hpp"
#include "mbagen/random_expr.hpp"

using namespace mbagen;

namespace {

// Plain recursive recount over the tree, independent of the DAG walk.
struct Naive {
    std::uint64_t vars = 0, consts = 0, ops = 0, alternation = 0, op_edges = 0;
    std::map<std::string, double> tokens, leaves;

    void walk(const Expr& e) {
        if (e.is_var()) {
            ++vars;
            tokens["v:" + e.name()] += 1;
            leaves["v:" + e.name()] += 1;
            return;
        }
        if (e.is_const()) {
            ++consts;
            tokens["c:" + std::to_string(e.value())] += 1;
            leaves["c:" + std::to_string(e.value())] += 1;
            return;
        }
        ++ops;
        tokens[e.children().size() == 1 && e.op() == Op::Neg ? "neg" : std::string(symbol(e.op())) +
                                                                              std::to_string(e.children().size())] += 1;
        for (const Expr& c : e.children()) {
            if (c.is_apply()) {
                ++op_edges;
                if (category(c.op()) != category(e.op())) ++alternation;
            }
            walk(c);
        }
    }

    static double entropy(const std::map<std::string, double>& f) {
        double n = 0, h = 0;
        for (const auto& [k, v] : f) n += v;
        for (const auto& [k, v] : f) h -= v / n * std::log2(v / n);
        return h;
    }
};

}  // namespace

TEST(Measure, SumOfTwoVariables) {
    const MetricsReport m = measure(parse("x + y"));
    EXPECT_EQ(m.ast_size, 3u);
    EXPECT_EQ(m.var_count, 2u);
    EXPECT_EQ(m.const_count, 0u);
    EXPECT_EQ(m.op_count, 1u);
    EXPECT_EQ(m.mba_alternation, 0u);
    EXPECT_NEAR(m.entropy_tokens, 1.58, 0.01);
    EXPECT_NEAR(m.entropy_tokens, std::log2(3.0), 1e-12);
    EXPECT_NEAR(m.entropy_leaves, 1.0, 1e-12);
}

TEST(Measure, MixedSum) {
    const MetricsReport m = measure(parse("((x|y)+(x&y))"));
    EXPECT_EQ(m.ast_size, 7u);
    EXPECT_EQ(m.var_count, 4u);
    EXPECT_EQ(m.const_count, 0u);
    EXPECT_EQ(m.op_count, 3u);
    EXPECT_EQ(m.mba_alternation, 2u);
}

TEST(Measure, SingleLeaf) {
    const MetricsReport m = measure(parse("x"));
    EXPECT_EQ(m.ast_size, 1u);
    EXPECT_EQ(m.var_count, 1u);
    EXPECT_EQ(m.mba_alternation, 0u);
    EXPECT_EQ(m.entropy_tokens, 0.0);
}

TEST(Measure, NegationAndSubtractionAreDistinctLabels) {
    // "(- x) - y" has four distinct labels: -, neg, x, y.
    EXPECT_NEAR(measure(parse("-x - y")).entropy_tokens, 2.0, 1e-12);
    // Equal constants share a label.
    EXPECT_NEAR(measure(parse("3 + 3")).entropy_leaves, 0.0, 1e-12);
}

TEST(Measure, SharedSubtermsCountByMultiplicity) {
    Expr e = parse("x & 1");
    for (int i = 0; i < 50; ++i) e = Expr::apply(Op::Add, e, e);
    const MetricsReport m = measure(e);
    const std::uint64_t copies = std::uint64_t{1} << 50;
    EXPECT_EQ(m.var_count, copies);
    EXPECT_EQ(m.const_count, copies);
    EXPECT_EQ(m.ast_size, 4 * copies - 1);
    EXPECT_EQ(m.mba_alternation, copies);
}

TEST(Aggregate, MeansAndCsv) {
    const MetricsReport a = measure(parse("x + y"));
    const MetricsReport b = measure(parse("x + (y & 1)"));
    std::vector<std::pair<MetricsReport, MetricsReport>> pairs{{a, a}, {a, b}};
    const AggregateReport r = aggregate(pairs);
    EXPECT_EQ(r.count, 2u);
    EXPECT_DOUBLE_EQ(r.original.ast_size, 3.0);
    EXPECT_DOUBLE_EQ(r.obfuscated.ast_size, 4.0);
    EXPECT_DOUBLE_EQ(r.obfuscated.const_count, 0.5);
    EXPECT_EQ(to_csv(r),
              "variant,ast_size,var_count,const_count,op_count,mba_alternation,entropy\n"
              "original,3.00,2.00,0.00,1.00,0.00,1.58\n"
              "obfuscated,4.00,2.00,0.50,1.50,0.50,1.95\n");
    EXPECT_THROW(aggregate(std::span<const std::pair<MetricsReport, MetricsReport>>{}), EmptyCorpus);
}

TEST(Property, MeasureAgreesWithNaiveRecount) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 3000; ++i) {
        RandomExprOptions o;
        o.vars = {"x", "y", "z"};
        o.size = 1 + rng() % 30;
        o.const_probability = 0.3;
        o.max_const = 4;
        o.unary_probability = 0.3;
        const Expr e = random_expr(rng, o);
        const MetricsReport m = measure(e);
        Naive n;
        n.walk(e);
        ASSERT_EQ(m.var_count, n.vars) << print(e);
        ASSERT_EQ(m.const_count, n.consts);
        ASSERT_EQ(m.op_count, n.ops);
        ASSERT_EQ(m.mba_alternation, n.alternation);
        EXPECT_NEAR(m.entropy_tokens, Naive::entropy(n.tokens), 1e-9);
        EXPECT_NEAR(m.entropy_leaves, Naive::entropy(n.leaves), 1e-9);

        EXPECT_EQ(m.ast_size, m.var_count + m.const_count + m.op_count);
        EXPECT_LE(m.mba_alternation, n.op_edges);
        EXPECT_GE(m.entropy_tokens, 0.0);
        EXPECT_LE(m.entropy_tokens, std::log2(static_cast<double>(m.ast_size)) + 1e-9);
        EXPECT_EQ(measure(e), m);
    }
}
