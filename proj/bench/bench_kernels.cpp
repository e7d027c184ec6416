// Parallel kernels against their serial references.
//
//   bench_kernels [--reps N]

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>

#include "mbagen/builtin_rules.hpp"
#include "mbagen/expansion.hpp"
#include "mbagen/verify.hpp"

using namespace mbagen;
using Clock = std::chrono::steady_clock;

namespace {

// Best of `reps` wall-clock runs, in milliseconds.
double time_ms(int reps, const std::function<std::size_t()>& f, std::size_t& result) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t = Clock::now();
        result = f();
        best = std::min(best, std::chrono::duration<double, std::milli>(Clock::now() - t).count());
    }
    return best;
}

void row(const char* name, int reps, const std::function<std::size_t()>& par,
         const std::function<std::size_t()>& ser) {
    std::size_t rp = 0, rs = 0;
    const double tp = time_ms(reps, par, rp);
    const double ts = time_ms(reps, ser, rs);
    std::printf("%-34s %12.2f %12.2f %8.2fx  %s\n", name, ts, tp, ts / tp, rp == rs ? "agree" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    int reps = 5;
    for (int i = 1; i + 1 < argc; ++i)
        if (!std::strcmp(argv[i], "--reps")) reps = std::max(1, std::atoi(argv[i + 1]));

    std::printf("threads: %d, best of %d\n", omp_get_max_threads(), reps);
    std::printf("%-34s %12s %12s %9s\n", "kernel", "serial ms", "parallel ms", "speedup");

    const auto rules = parse_rules(kDefaultRules);
    EGraph g;
    const ClassId root = g.add_expr(parse("(x + y) ^ (x & ~y)"));
    ExpansionConfig cfg;
    cfg.iter_limit.reset();
    cfg.time_limit.reset();
    cfg.node_limit = 3000;
    grow(g, root, rules, cfg);
    g.rebuild();

    const std::string label = "ematch, all rules, " + std::to_string(g.node_count()) + " e-nodes";
    row(label.c_str(), reps,
        [&] {
            std::size_t n = 0;
            for (const Rule& r : rules) n += ematch(g, r.lhs).size();
            return n;
        },
        [&] {
            std::size_t n = 0;
            for (const Rule& r : rules) n += reference::ematch(g, r.lhs).size();
            return n;
        });

    ExpansionConfig small;
    small.max_output_nodes = 2000;
    const Expr a = parse("(x - y) * (x ^ y)");
    const Expr b = expand(a, rules, small).output;
    row("check_exhaustive, 2 vars, 8 bits", reps,
        [&] { return check_exhaustive(a, b, BitWidth(8)).cases_checked; },
        [&] { return reference::check_exhaustive(a, b, BitWidth(8)).cases_checked; });
    row("check_random, 64 bits, 10^5 trials", reps,
        [&] { return check_random(a, b, BitWidth(64), 100'000, 1).cases_checked; },
        [&] { return reference::check_random(a, b, BitWidth(64), 100'000, 1).cases_checked; });
    return 0;
}
