#pragma once

// Corpus runner shared by the CLI `bench` subcommand and the acceptance suite.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbagen/expansion.hpp"
#include "mbagen/metrics.hpp"
#include "mbagen/verify.hpp"

namespace mbagen {

struct BenchOptions {
    ExpansionConfig expansion;
    BitWidth width{};
    bool selfcheck = false;
    std::uint64_t selfcheck_trials = 1000;
};

struct BenchEntry {
    std::size_t line = 0;  // 1-based line in the corpus file
    std::string input;
    std::optional<ExpansionReport> report;
    std::optional<CheckResult> selfcheck;
    std::string error;  // set when the line could not be processed
    bool resource_error = false;
};

/// Nonblank lines of a corpus file that do not start with '#', with their
/// 1-based line numbers.
std::vector<std::pair<std::size_t, std::string>> read_corpus(const std::string& path);

/// Expands every line independently (in parallel); results keep input order.
std::vector<BenchEntry> run_corpus(std::span<const std::pair<std::size_t, std::string>> lines,
                                   std::span<const Rule> rules, const BenchOptions& opts);

/// Means over the successfully processed entries. Throws EmptyCorpus when
/// there are none.
AggregateReport aggregate(std::span<const BenchEntry> entries);

}  // namespace mbagen
