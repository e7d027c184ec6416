#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mbagen/builtin_rules.hpp"
#include "mbagen/errors.hpp"
#include "mbagen/expansion.hpp"
#include "mbagen/random_expr.hpp"
#include "oracle.hpp"

using namespace mbagen;

namespace {

const std::vector<Rule>& default_rules() {
    static const auto rules = parse_rules(kDefaultRules);
    return rules;
}

std::vector<Rule> addor() { return parse_rules("addor : ?a + ?b => (?a | ?b) + (?a & ?b)"); }

EGraph grown(const Expr& e, std::span<const Rule> rules, std::size_t iters, ClassId& root) {
    EGraph g;
    root = g.add_expr(e);
    ExpansionConfig cfg;
    cfg.iter_limit = iters;
    cfg.node_limit = 60;
    cfg.time_limit.reset();
    grow(g, root, rules, cfg);
    return g;
}

}  // namespace

TEST(Expand, SingleRuleClosedForm) {
    ExpansionConfig cfg;
    cfg.iter_limit = 1;
    cfg.extraction_rounds = 2;
    const auto rules = addor();
    const ExpansionReport r = expand(parse("x + y"), rules, cfg);
    EXPECT_EQ(print(r.output), "((x | y) + (x & y))");
    EXPECT_EQ(r.metrics_out.ast_size, 7u);
    EXPECT_TRUE(r.stop == StopReason::IterLimit || r.stop == StopReason::Saturated);
    EXPECT_EQ(r.iterations, 1u);

    cfg.extraction_rounds = 1;
    EXPECT_EQ(print(expand(parse("x + y"), rules, cfg).output), "(x + y)");
}

TEST(Expand, SingleRuleOracleEnumeration) {
    // All terms of depth <= 2 in the root class after one addor step.
    ClassId root;
    const auto rules = addor();
    const EGraph g = grown(parse("x + y"), rules, 1, root);
    const auto ts = oracle::terms(g, root, 2);
    std::size_t best = 0;
    for (const Expr& t : ts) best = std::max(best, oracle::size(t));
    EXPECT_EQ(ts.size(), 2u);
    EXPECT_EQ(best, 7u);
    EXPECT_EQ(print(extract_max(g, root, 2)), "((x | y) + (x & y))");
    EXPECT_EQ(print(extract_max(g, root, 1)), "(x + y)");
    EXPECT_EQ(print(extract_min(g, root)), "(x + y)");
}

TEST(Expand, NoApplicableRuleLeavesInputUnchanged) {
    const auto rules = parse_rules(kOperatorRules);
    const ExpansionReport r = expand(parse("5"), rules);
    EXPECT_EQ(print(r.output), "5");
    EXPECT_EQ(r.stop, StopReason::Saturated);
    EXPECT_EQ(r.metrics_out, r.metrics_in);
}

TEST(Expand, NodeLimitIsRespected) {
    ExpansionConfig cfg;
    cfg.iter_limit.reset();
    cfg.node_limit = 500;
    const ExpansionReport r = expand(parse("x + y"), default_rules(), cfg);
    EXPECT_EQ(r.stop, StopReason::NodeLimit);
    EXPECT_LE(r.final_node_count, 500u);
    EXPECT_GT(r.final_node_count, 100u);
}

TEST(Expand, TimeLimitFires) {
    ExpansionConfig cfg;
    cfg.iter_limit.reset();
    cfg.node_limit.reset();
    cfg.time_limit = std::chrono::milliseconds(1);
    cfg.max_output_nodes = 1000;
    const ExpansionReport r = expand(parse("(x ^ y) + (x & y)"), default_rules(), cfg);
    EXPECT_EQ(r.stop, StopReason::TimeLimit);
}

TEST(Expand, TargetSizeEndsGrowthEarly) {
    ExpansionConfig cfg;
    cfg.iter_limit.reset();
    cfg.target_ast_size = 100;
    const ExpansionReport r = expand(parse("x + y"), default_rules(), cfg);
    EXPECT_EQ(r.stop, StopReason::TargetSizeReached);
    EXPECT_GE(r.metrics_out.ast_size, 100u);
}

TEST(Expand, ConfigValidation) {
    ExpansionConfig cfg;
    cfg.node_limit = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.node_limit.reset();
    cfg.iter_limit.reset();
    cfg.time_limit.reset();
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.extraction_rounds = 0;
    EXPECT_THROW(expand(parse("x"), default_rules(), cfg), std::invalid_argument);
}

TEST(Expand, OutputStaysWithinBudget) {
    ExpansionConfig cfg;
    cfg.max_output_nodes = 1000;
    const ExpansionReport r = expand(parse("x + y"), default_rules(), cfg);
    EXPECT_LE(r.metrics_out.ast_size, 1000u);
    EXPECT_GE(r.metrics_out.ast_size, 500u);
}

TEST(Expand, DeepInputSurvivesSmallRoundCount) {
    ExpansionConfig cfg;
    cfg.extraction_rounds = 1;
    const Expr deep = parse("((x + y) * (x - y)) ^ ~(x | 3)");
    const ExpansionReport r = expand(deep, default_rules(), cfg);
    EXPECT_GE(r.metrics_out.ast_size, r.metrics_in.ast_size);
    EXPECT_TRUE(oracle::equivalent_exhaustive(deep, r.output, 4));
}

TEST(Extract, UnextractableAndTooLarge) {
    EGraph g;
    const ClassId root = g.add_expr(parse("(x + y) * z"));
    g.rebuild();
    EXPECT_THROW(extract_max(g, root, 1), Unextractable);
    EXPECT_EQ(print(extract_max(g, root, 2)), "((x + y) * z)");
    EXPECT_THROW(extract_max(g, root, 0), std::invalid_argument);

    EGraph cyc;
    const ClassId r2 = cyc.add_expr(parse("x + y"));
    ExpansionConfig cfg;
    grow(cyc, r2, default_rules(), cfg);
    EXPECT_THROW(extract_max(cyc, r2, 40, 10'000'000), OutputTooLarge);
}

TEST(Extract, MaxExtractorMatchesEnumeration) {
    std::mt19937_64 rng(21);
    const auto rules = parse_rules(kOperatorRules);
    for (int trial = 0; trial < 20; ++trial) {
        RandomExprOptions o;
        o.size = 3 + rng() % 4;
        ClassId root;
        const EGraph g = grown(random_expr(rng, o), rules, 1 + rng() % 2, root);
        const MaxExtractor ex(g, 3);
        for (std::size_t r = 0; r <= 3; ++r) {
            const auto ts = oracle::terms(g, root, r, 200000);
            ASSERT_LT(ts.size(), 200000u);
            std::size_t best = 0;
            for (const Expr& t : ts) best = std::max(best, oracle::size(t));
            const auto got = ex.best(root, r);
            if (ts.empty()) {
                EXPECT_FALSE(got);
                continue;
            }
            ASSERT_TRUE(got);
            EXPECT_EQ(*got, best);
            const Expr e = ex.extract(root, r);
            EXPECT_EQ(oracle::size(e), best);
            EXPECT_LE(depth(e), r);
            EXPECT_TRUE(std::any_of(ts.begin(), ts.end(), [&](const Expr& t) { return t == e; }));
        }
    }
}

TEST(Extract, MinNeverExceedsMax) {
    ClassId root;
    const EGraph g = grown(parse("(x & y) - ~x"), default_rules(), 2, root);
    const MaxExtractor ex(g, 12);
    for (ClassId c : g.class_ids()) {
        const auto mx = ex.best(c, ex.rounds());
        ASSERT_TRUE(mx);
        EXPECT_LE(tree_size(extract_min(g, c)), *mx);
    }
}

TEST(Property, ExpansionIsEquivalentToInput) {
    std::mt19937_64 rng(31);
    ExpansionConfig cfg;
    cfg.max_output_nodes = 1000;
    for (int trial = 0; trial < 30; ++trial) {
        RandomExprOptions o;
        o.size = 3 + rng() % 9;
        o.vars = trial % 3 ? std::vector<std::string>{"x", "y"} : std::vector<std::string>{"x", "y", "z"};
        o.const_probability = 0.15;
        const Expr in = random_expr(rng, o);
        const ExpansionReport r = expand(in, default_rules(), cfg);
        EXPECT_TRUE(oracle::equivalent_exhaustive(in, r.output, 4)) << print(in);
        std::map<std::string, std::uint64_t> env;
        for (int k = 0; k < 1000; ++k) {
            env = {{"x", rng()}, {"y", rng()}, {"z", rng()}};
            ASSERT_EQ(oracle::eval(in, env, 64), oracle::eval(r.output, env, 64)) << print(in);
        }
        EXPECT_GE(r.metrics_out.ast_size, r.metrics_in.ast_size);
    }
}

TEST(Property, GrowthIsMonotone) {
    for (const char* input : {"x + y", "x & ~y", "(x ^ y) * 3"}) {
        std::uint64_t prev_rounds = 0;
        for (std::size_t rounds = 1; rounds <= 8; ++rounds) {
            ExpansionConfig cfg;
            cfg.extraction_rounds = rounds;
            const auto size = expand(parse(input), default_rules(), cfg).metrics_out.ast_size;
            EXPECT_GE(size, prev_rounds) << input << " rounds " << rounds;
            prev_rounds = size;
        }
        std::uint64_t prev_iters = 0;
        for (std::size_t iters = 1; iters <= 3; ++iters) {
            ExpansionConfig cfg;
            cfg.iter_limit = iters;
            cfg.extraction_rounds = 6;
            const auto size = expand(parse(input), default_rules(), cfg).metrics_out.ast_size;
            EXPECT_GE(size, prev_iters) << input << " iterations " << iters;
            prev_iters = size;
        }
    }
}

TEST(Property, ExpansionIsDeterministic) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        RandomExprOptions o;
        o.size = 3 + rng() % 9;
        const Expr in = random_expr(rng, o);
        const auto a = expand(in, default_rules());
        const auto b = expand(in, default_rules());
        EXPECT_EQ(print(a.output), print(b.output));
        EXPECT_EQ(a.final_node_count, b.final_node_count);
        EXPECT_EQ(a.metrics_out, b.metrics_out);
    }
}
