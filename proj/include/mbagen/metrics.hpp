#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>

#include "mbagen/expr.hpp"

namespace mbagen {

/// Structural complexity of one expression (tree view).
struct MetricsReport {
    std::uint64_t ast_size = 0;
    std::uint64_t var_count = 0;    // variable occurrences
    std::uint64_t const_count = 0;  // constant occurrences
    std::uint64_t op_count = 0;     // operator occurrences
    /// Parent-child edges joining an arithmetic and a boolean operator.
    std::uint64_t mba_alternation = 0;
    /// Shannon entropy (bits) of all node labels.
    double entropy_tokens = 0.0;
    /// Shannon entropy (bits) of leaf labels only.
    double entropy_leaves = 0.0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Linear in the number of distinct subterm objects, not in tree size.
MetricsReport measure(const Expr& e);

struct MetricMeans {
    double ast_size = 0;
    double var_count = 0;
    double const_count = 0;
    double op_count = 0;
    double mba_alternation = 0;
    double entropy_tokens = 0;
    double entropy_leaves = 0;
};

struct AggregateReport {
    std::size_t count = 0;
    MetricMeans original;
    MetricMeans obfuscated;
};

/// Per-field arithmetic means. Throws EmptyCorpus on an empty list.
AggregateReport aggregate(std::span<const std::pair<MetricsReport, MetricsReport>> reports);

/// Header plus "original" and "obfuscated" rows, two decimals, columns
/// ast_size, var_count, const_count, op_count, mba_alternation, entropy.
std::string to_csv(const AggregateReport& report);

}  // namespace mbagen
