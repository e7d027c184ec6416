#include "mbagen/verify.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <random>
#include <set>

#include "mbagen/errors.hpp"
#include "mbagen/program.hpp"

namespace mbagen {

namespace {

constexpr std::size_t kLanes = 256;
constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();

std::vector<std::string> joint_vars(const Expr& a, const Expr& b) {
    std::set<std::string> vars = free_vars(a);
    vars.merge(free_vars(b));
    return {vars.begin(), vars.end()};
}

// Case i assigns variable k the k-th base-2^bits digit of i.
std::uint64_t exhaustive_total(std::size_t vars, BitWidth width) {
    const std::uint64_t bits = static_cast<std::uint64_t>(vars) * width.bits();
    if (bits > 24) throw TooManyCases(static_cast<unsigned>(vars), width.bits());
    return std::uint64_t{1} << bits;
}

std::uint64_t digit(std::uint64_t index, std::size_t k, BitWidth width) {
    return (index >> (k * width.bits())) & width.mask();
}

std::vector<std::uint64_t> random_table(std::size_t vars, BitWidth width, std::uint64_t trials,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> table(trials * vars);
    for (std::uint64_t& v : table) v = rng() & width.mask();
    return table;
}

Environment make_env(const std::vector<std::string>& vars, auto&& value_of) {
    Environment env;
    for (std::size_t k = 0; k < vars.size(); ++k) env.emplace(vars[k], value_of(k));
    return env;
}

CheckResult finish(const Expr& a, const Expr& b, BitWidth width, std::uint64_t total, std::uint64_t fail,
                   Environment env_at_fail) {
    CheckResult r;
    if (fail == kNone) {
        r.cases_checked = total;
        return r;
    }
    r.passed = false;
    r.cases_checked = fail + 1;
    Counterexample cx;
    cx.lhs_value = evaluate(a, env_at_fail, width);
    cx.rhs_value = evaluate(b, env_at_fail, width);
    cx.env = std::move(env_at_fail);
    r.counterexample = std::move(cx);
    return r;
}

// Finds the smallest case index on which the two compiled outputs differ
// modulo 2^bits. `fill(start, n, inputs)` writes n cases input-major.
template <class Fill>
std::uint64_t first_mismatch(const Program& prog, std::size_t vars, BitWidth width, std::uint64_t total,
                             Fill fill) {
    std::atomic<std::uint64_t> first{kNone};
    const auto blocks = static_cast<std::int64_t>((total + kLanes - 1) / kLanes);
    const std::uint64_t mask = width.mask();
#pragma omp parallel
    {
        Program::Scratch scratch(prog, kLanes);
        std::vector<std::uint64_t> in(std::max<std::size_t>(vars, 1) * kLanes);
        std::vector<std::uint64_t> out(2 * kLanes);
#pragma omp for schedule(dynamic, 8)
        for (std::int64_t blk = 0; blk < blocks; ++blk) {
            const std::uint64_t start = static_cast<std::uint64_t>(blk) * kLanes;
            if (start > first.load(std::memory_order_relaxed)) continue;
            const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kLanes, total - start));
            fill(start, n, in.data());
            prog.run(in, n, out, scratch);
            for (std::size_t j = 0; j < n; ++j) {
                if (((out[j] ^ out[n + j]) & mask) == 0) continue;
                std::uint64_t seen = first.load(std::memory_order_relaxed);
                const std::uint64_t idx = start + j;
                while (idx < seen && !first.compare_exchange_weak(seen, idx)) {}
                break;
            }
        }
    }
    return first.load();
}

Program compile_pair(const Expr& a, const Expr& b, const std::vector<std::string>& vars) {
    const Expr roots[] = {a, b};
    return Program::compile(roots, vars);
}

}  // namespace

CheckResult check_exhaustive(const Expr& a, const Expr& b, BitWidth width) {
    const auto vars = joint_vars(a, b);
    const std::uint64_t total = exhaustive_total(vars.size(), width);
    const Program prog = compile_pair(a, b, vars);
    const std::uint64_t fail = first_mismatch(prog, vars.size(), width, total,
                                              [&](std::uint64_t start, std::size_t n, std::uint64_t* in) {
                                                  for (std::size_t k = 0; k < vars.size(); ++k)
                                                      for (std::size_t j = 0; j < n; ++j)
                                                          in[k * n + j] = digit(start + j, k, width);
                                              });
    Environment env;
    if (fail != kNone) env = make_env(vars, [&](std::size_t k) { return digit(fail, k, width); });
    return finish(a, b, width, total, fail, std::move(env));
}

CheckResult check_random(const Expr& a, const Expr& b, BitWidth width, std::uint64_t trials, std::uint64_t seed) {
    const auto vars = joint_vars(a, b);
    const std::size_t nv = vars.size();
    const auto table = random_table(nv, width, trials, seed);
    const Program prog = compile_pair(a, b, vars);
    const std::uint64_t fail = first_mismatch(prog, nv, width, trials,
                                              [&](std::uint64_t start, std::size_t n, std::uint64_t* in) {
                                                  for (std::size_t k = 0; k < nv; ++k)
                                                      for (std::size_t j = 0; j < n; ++j)
                                                          in[k * n + j] = table[(start + j) * nv + k];
                                              });
    Environment env;
    if (fail != kNone) env = make_env(vars, [&](std::size_t k) { return table[fail * nv + k]; });
    return finish(a, b, width, trials, fail, std::move(env));
}

CheckResult check_equivalence(const Expr& a, const Expr& b, BitWidth width, std::uint64_t trials,
                              std::uint64_t seed) {
    const std::size_t nv = joint_vars(a, b).size();
    if (nv * width.bits() <= 24) return check_exhaustive(a, b, width);
    return check_random(a, b, width, trials, seed);
}

CheckResult check_rule(const Rule& rule, BitWidth width) {
    return check_exhaustive(to_expr(rule.lhs), to_expr(rule.rhs), width);
}

CheckResult check_rule_random(const Rule& rule, BitWidth width, std::uint64_t trials, std::uint64_t seed) {
    return check_random(to_expr(rule.lhs), to_expr(rule.rhs), width, trials, seed);
}

std::vector<RuleAudit> audit_rule(const Rule& rule, std::uint64_t random_trials, std::uint64_t seed) {
    std::vector<RuleAudit> out;
    const Expr lhs = to_expr(rule.lhs);
    const Expr rhs = to_expr(rule.rhs);
    const std::size_t nv = joint_vars(lhs, rhs).size();
    for (unsigned bits : {4u, 8u}) {
        const BitWidth w(bits);
        if (nv * bits <= 24)
            out.push_back({rule.name, bits, true, check_exhaustive(lhs, rhs, w)});
        else
            out.push_back({rule.name, bits, false, check_random(lhs, rhs, w, random_trials, seed)});
    }
    out.push_back({rule.name, 64, false, check_random(lhs, rhs, BitWidth(64), random_trials, seed)});
    return out;
}

CheckResult reference::check_exhaustive(const Expr& a, const Expr& b, BitWidth width) {
    const auto vars = joint_vars(a, b);
    const std::uint64_t total = exhaustive_total(vars.size(), width);
    for (std::uint64_t i = 0; i < total; ++i) {
        Environment env = make_env(vars, [&](std::size_t k) { return digit(i, k, width); });
        if (evaluate(a, env, width) != evaluate(b, env, width)) return finish(a, b, width, total, i, std::move(env));
    }
    return finish(a, b, width, total, kNone, {});
}

CheckResult reference::check_random(const Expr& a, const Expr& b, BitWidth width, std::uint64_t trials,
                                    std::uint64_t seed) {
    const auto vars = joint_vars(a, b);
    const auto table = random_table(vars.size(), width, trials, seed);
    for (std::uint64_t t = 0; t < trials; ++t) {
        Environment env = make_env(vars, [&](std::size_t k) { return table[t * vars.size() + k]; });
        if (evaluate(a, env, width) != evaluate(b, env, width)) return finish(a, b, width, trials, t, std::move(env));
    }
    return finish(a, b, width, trials, kNone, {});
}

}  // namespace mbagen
