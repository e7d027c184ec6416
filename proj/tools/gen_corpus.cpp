// Writes a random expression corpus, one expression per line.
//
//   gen_corpus [--count N] [--seed S] > corpus.txt
//
// Sizes are 3 + Binomial(12, 0.37), i.e. in [3, 15] with mean about 7.4.
// Nine in ten expressions range over {x, y}, the rest over {x, y, z}.
// Every expression mentions at least one variable and lines are unique.

#include <iostream>
#include <random>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "mbagen/random_expr.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Random expression corpus generator"};
    std::size_t count = 100;
    std::uint64_t seed = 2024;
    app.add_option("--count", count, "Number of expressions")->capture_default_str();
    app.add_option("--seed", seed, "Generator seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    std::mt19937_64 rng(seed);
    std::binomial_distribution<std::size_t> extra(12, 0.37);
    std::bernoulli_distribution three_vars(0.1);

    std::cout << "# gen_corpus --count " << count << " --seed " << seed << "\n";
    std::set<std::string> seen;
    while (seen.size() < count) {
        mbagen::RandomExprOptions opts;
        opts.size = 3 + extra(rng);
        if (three_vars(rng)) opts.vars = {"x", "y", "z"};
        const mbagen::Expr e = mbagen::random_expr(rng, opts);
        if (mbagen::free_vars(e).empty()) continue;
        std::string line = mbagen::print(e);
        if (seen.insert(line).second) std::cout << line << "\n";
    }
}
