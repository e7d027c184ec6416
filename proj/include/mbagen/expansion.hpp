#pragma once

// Equality expansion: grow an e-graph with sound rewrite rules under resource
// limits, then extract the largest equivalent term.

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mbagen/egraph.hpp"
#include "mbagen/expr.hpp"
#include "mbagen/metrics.hpp"
#include "mbagen/rewrite.hpp"

namespace mbagen {

enum class StopReason { NodeLimit, IterLimit, TimeLimit, TargetSizeReached, Saturated };

std::string_view to_string(StopReason r) noexcept;

struct ExpansionConfig {
    std::optional<std::size_t> node_limit = 3000;
    /// Match-apply-rebuild rounds.
    std::optional<std::size_t> iter_limit = 2;
    std::optional<std::chrono::milliseconds> time_limit = std::chrono::milliseconds(2000);
    /// Stop growing once the extractable term reaches this size.
    std::optional<std::uint64_t> target_ast_size;
    /// Depth cap of the maximizing extractor.
    std::size_t extraction_rounds = 64;
    /// Largest term the expander will materialize; extraction uses the
    /// deepest round whose best term fits.
    std::uint64_t max_output_nodes = 50'000;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on zero limits or when no limit is set.
    void validate() const;
};

struct ExpansionReport {
    Expr output;
    StopReason stop = StopReason::Saturated;
    std::size_t iterations = 0;
    std::size_t final_node_count = 0;
    std::size_t final_class_count = 0;
    std::size_t extraction_round = 0;
    std::chrono::steady_clock::duration elapsed{};
    MetricsReport metrics_in;
    MetricsReport metrics_out;
};

struct GrowthResult {
    StopReason stop = StopReason::Saturated;
    std::size_t iterations = 0;
};

/// The scheduling loop on an existing graph: match every rule, apply every
/// match that fits the node limit, rebuild; repeat until a limit fires.
GrowthResult grow(EGraph& g, ClassId root, std::span<const Rule> rules, const ExpansionConfig& cfg);

/// Full pipeline for one input expression. Deterministic for identical
/// inputs as long as the time limit does not fire.
ExpansionReport expand(const Expr& input, std::span<const Rule> rules, const ExpansionConfig& cfg = {});

/// Round-indexed maximizing extraction. Round 0 admits only leaves; a node
/// is available at round r when all its children are available at r - 1.
/// Sizes saturate at 2^64 - 1.
class MaxExtractor {
public:
    MaxExtractor(const EGraph& g, std::size_t rounds);

    std::size_t rounds() const noexcept { return rounds_; }
    /// Largest tree size available for the class at `round`, if any.
    std::optional<std::uint64_t> best(ClassId c, std::size_t round) const;
    /// Deepest round <= rounds() whose best term has at most `budget` nodes.
    std::optional<std::size_t> deepest_within(ClassId c, std::uint64_t budget) const;
    /// Rebuilds the chosen term; shared subterms are shared in the result.
    Expr extract(ClassId c, std::size_t round) const;

private:
    static constexpr std::int32_t kCarry = -1;
    static constexpr std::int32_t kNone = -2;

    std::size_t slot(ClassId c) const;

    const EGraph& g_;
    std::size_t rounds_;
    std::vector<ClassId> ids_;
    std::vector<std::vector<std::uint64_t>> cost_;   // [round][slot], 0 = unavailable
    std::vector<std::vector<std::int32_t>> choice_;  // node index, kCarry or kNone
};

/// Largest term of depth <= rounds. Throws Unextractable, or OutputTooLarge
/// when that term exceeds max_output_nodes.
Expr extract_max(const EGraph& g, ClassId root, std::size_t rounds,
                 std::uint64_t max_output_nodes = 10'000'000);

/// Smallest term by tree size (ties by node order).
Expr extract_min(const EGraph& g, ClassId root);

}  // namespace mbagen
