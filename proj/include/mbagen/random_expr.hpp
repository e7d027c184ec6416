#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mbagen/expr.hpp"

namespace mbagen {

struct RandomExprOptions {
    std::vector<std::string> vars{"x", "y"};
    std::size_t size = 7;               // exact tree size
    double const_probability = 0.1;     // per leaf
    std::uint64_t max_const = 15;       // constants drawn from [0, max_const]
    double unary_probability = 0.15;    // per interior node with room for either
    BitWidth width{};
};

/// Uniform-ish random tree of exactly `opts.size` nodes.
Expr random_expr(std::mt19937_64& rng, const RandomExprOptions& opts);

}  // namespace mbagen
