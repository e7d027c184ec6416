#include <gtest/gtest.h>

#include <random>

#include "mbagen/builtin_rules.hpp"
#include "mbagen/errors.hpp"
#include "mbagen/program.hpp"
#include "mbagen/random_expr.hpp"
#include "mbagen/verify.hpp"
#include "oracle.hpp"

using namespace mbagen;

namespace {

Rule rule(std::string_view text) { return parse_rules(text).front(); }

// First failing case index under the documented enumeration order, by a
// plain nested loop over the variable values.
std::optional<std::uint64_t> first_failure(const Expr& a, const Expr& b, unsigned bits) {
    std::set<std::string> vs = oracle::vars(a);
    vs.merge(oracle::vars(b));
    const std::vector<std::string> names(vs.begin(), vs.end());
    const std::uint64_t per = 1ull << bits;
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < names.size(); ++i) total *= per;
    for (std::uint64_t i = 0; i < total; ++i) {
        std::map<std::string, std::uint64_t> env;
        std::uint64_t rest = i;
        for (const auto& n : names) {
            env[n] = rest % per;
            rest /= per;
        }
        if (oracle::eval(a, env, bits) != oracle::eval(b, env, bits)) return i;
    }
    return std::nullopt;
}

}  // namespace

TEST(CheckRule, SoundRulesPassExhaustively) {
    const CheckResult r = check_rule(rule("addor : ?a + ?b => (?a | ?b) + (?a & ?b)"), BitWidth(4));
    EXPECT_TRUE(r.passed);
    EXPECT_FALSE(r.counterexample);
    EXPECT_EQ(r.cases_checked, 256u);

    const CheckResult m = check_rule(rule("mulid : ?y * 1 => ?y"), BitWidth(4));
    EXPECT_TRUE(m.passed);
    EXPECT_EQ(m.cases_checked, 16u);

    EXPECT_EQ(check_rule(rule("addor : ?a + ?b => (?a | ?b) + (?a & ?b)"), BitWidth(8)).cases_checked, 65536u);
}

TEST(CheckRule, CarryBreaksUnsoundRule) {
    const Rule bad = rule("bad : ?a + ?b => ?a | ?b");
    const CheckResult r = check_rule(bad, BitWidth(4));
    ASSERT_FALSE(r.passed);
    ASSERT_TRUE(r.counterexample);
    EXPECT_EQ(r.counterexample->env, (Environment{{"a", 1}, {"b", 1}}));
    EXPECT_EQ(r.counterexample->lhs_value, 2u);
    EXPECT_EQ(r.counterexample->rhs_value, 1u);
    const auto oracle_index = first_failure(to_expr(bad.lhs), to_expr(bad.rhs), 4);
    ASSERT_TRUE(oracle_index);
    EXPECT_EQ(r.cases_checked, *oracle_index + 1);
}

TEST(CheckRule, RandomTrials) {
    const CheckResult ok = check_rule_random(rule("r : ?a ^ ?b => (?a | ?b) - (?a & ?b)"), BitWidth(64), 10000, 7);
    EXPECT_TRUE(ok.passed);
    EXPECT_EQ(ok.cases_checked, 10000u);

    const CheckResult bad = check_rule_random(rule("bad : ?a => ?a + 1"), BitWidth(64), 10000, 7);
    EXPECT_FALSE(bad.passed);
    EXPECT_EQ(bad.cases_checked, 1u);
    EXPECT_EQ(bad.counterexample->rhs_value, bad.counterexample->lhs_value + 1);
}

TEST(CheckRule, SameSeedSameResult) {
    const Rule flaky = rule("flaky : ?a & ?b => ?a & ?b & 0xFFFFFFFFFFFFFFF0");
    const CheckResult a = check_rule_random(flaky, BitWidth(64), 1000, 3);
    const CheckResult b = check_rule_random(flaky, BitWidth(64), 1000, 3);
    EXPECT_FALSE(a.passed);
    EXPECT_EQ(a.cases_checked, b.cases_checked);
    EXPECT_EQ(a.counterexample->env, b.counterexample->env);
}

TEST(CheckRule, FeasibilityGuard) {
    const Rule wide = rule("w : ?a + ?b + ?c + ?d => ?d + ?c + ?b + ?a");
    EXPECT_THROW(check_rule(wide, BitWidth(8)), TooManyCases);
    EXPECT_EQ(check_rule(wide, BitWidth(4)).cases_checked, 65536u);
}

TEST(CheckRule, ShippedRulesAreSound) {
    for (const Rule& r : parse_rules(kDefaultRules)) {
        const auto audits = audit_rule(r, 10000, 0);
        ASSERT_EQ(audits.size(), 3u);
        EXPECT_EQ(audits[0].bits, 4u);
        EXPECT_EQ(audits[1].bits, 8u);
        EXPECT_EQ(audits[2].bits, 64u);
        for (const RuleAudit& a : audits) EXPECT_TRUE(a.result.passed) << r.name << " at " << a.bits;
        // Independent check at 4 bits.
        EXPECT_FALSE(first_failure(to_expr(r.lhs), to_expr(r.rhs), 4)) << r.name;
    }
}

TEST(Equivalence, StrategySelection) {
    const Expr a = parse("x + y"), b = parse("(x | y) + (x & y)");
    EXPECT_EQ(check_equivalence(a, b, BitWidth(8), 10, 0).cases_checked, 65536u);
    EXPECT_EQ(check_equivalence(a, b, BitWidth(64), 10, 0).cases_checked, 10u);
    EXPECT_TRUE(check_equivalence(parse("5"), parse("5"), BitWidth(64), 10, 0).passed);
    EXPECT_EQ(check_exhaustive(parse("5"), parse("2 + 3"), BitWidth(8)).cases_checked, 1u);
}

TEST(Property, KernelsMatchTreeWalkingReference) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 200; ++i) {
        RandomExprOptions o;
        o.vars = {"x", "y"};
        o.size = 1 + rng() % 15;
        o.const_probability = 0.2;
        const Expr a = random_expr(rng, o);
        // Half of the pairs are equal-by-construction rewrites, the rest random.
        const Expr b = i % 2 ? Expr::apply(Op::Sub, Expr::apply(Op::Add, a, Expr::var("y")), Expr::var("y"))
                             : random_expr(rng, o);
        for (unsigned bits : {4u, 8u}) {
            const CheckResult k = check_exhaustive(a, b, BitWidth(bits));
            const CheckResult r = reference::check_exhaustive(a, b, BitWidth(bits));
            ASSERT_EQ(k.passed, r.passed) << print(a) << " vs " << print(b);
            EXPECT_EQ(k.cases_checked, r.cases_checked);
            if (!k.passed) EXPECT_EQ(k.counterexample->env, r.counterexample->env);
            const auto idx = first_failure(a, b, bits);
            EXPECT_EQ(k.passed, !idx);
            if (idx) EXPECT_EQ(k.cases_checked, *idx + 1);
        }
        const std::uint64_t seed = rng();
        const CheckResult k = check_random(a, b, BitWidth(64), 2000, seed);
        const CheckResult r = reference::check_random(a, b, BitWidth(64), 2000, seed);
        ASSERT_EQ(k.passed, r.passed);
        EXPECT_EQ(k.cases_checked, r.cases_checked);
        if (!k.passed) EXPECT_EQ(k.counterexample->env, r.counterexample->env);
    }
}

TEST(Program, SharesRepeatedSubterms) {
    Expr e = parse("x ^ 3");
    for (int i = 0; i < 30; ++i) e = Expr::apply(Op::Add, e, e);
    const std::string inputs[] = {"x"};
    const Expr roots[] = {e};
    const Program p = Program::compile(roots, inputs);
    EXPECT_LE(p.instruction_count(), 40u);
    Program::Scratch scratch(p, 4);
    const std::uint64_t in[] = {0, 1, 2, 0xFFFF};
    std::uint64_t out[4];
    p.run(in, 4, out, scratch);
    // Thirty doublings of (x ^ 3).
    for (int j = 0; j < 4; ++j) EXPECT_EQ(out[j], (in[j] ^ 3) << 30);
}

TEST(Program, AgreesWithEvaluateOnRandomTrees) {
    std::mt19937_64 rng(17);
    const std::string inputs[] = {"x", "y", "z"};
    for (int i = 0; i < 300; ++i) {
        RandomExprOptions o;
        o.vars = {"x", "y", "z"};
        o.size = 1 + rng() % 40;
        o.const_probability = 0.25;
        o.max_const = 1u << 20;
        const Expr roots[] = {random_expr(rng, o), random_expr(rng, o)};
        const Program p = Program::compile(roots, inputs);
        constexpr std::size_t lanes = 7;
        Program::Scratch scratch(p, lanes);
        std::vector<std::uint64_t> in(3 * lanes), out(2 * lanes);
        for (auto& v : in) v = rng();
        p.run(in, lanes, out, scratch);
        for (std::size_t j = 0; j < lanes; ++j) {
            const Environment env{{"x", in[j]}, {"y", in[lanes + j]}, {"z", in[2 * lanes + j]}};
            ASSERT_EQ(out[j], evaluate(roots[0], env)) << print(roots[0]);
            ASSERT_EQ(out[lanes + j], evaluate(roots[1], env)) << print(roots[1]);
        }
    }
}

TEST(Program, UnknownInputThrows) {
    const std::string inputs[] = {"x"};
    const Expr roots[] = {parse("x + y")};
    EXPECT_THROW(Program::compile(roots, inputs), UnboundVariable);
}
