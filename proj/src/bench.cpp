#include "mbagen/bench.hpp"

#include <fstream>

#include "mbagen/errors.hpp"

namespace mbagen {

std::vector<std::pair<std::size_t, std::string>> read_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open corpus '" + path + "'");
    std::vector<std::pair<std::size_t, std::string>> out;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        out.emplace_back(n, line);
    }
    return out;
}

std::vector<BenchEntry> run_corpus(std::span<const std::pair<std::size_t, std::string>> lines,
                                   std::span<const Rule> rules, const BenchOptions& opts) {
    opts.expansion.validate();
    std::vector<BenchEntry> entries(lines.size());
    const auto n = static_cast<std::ptrdiff_t>(lines.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        BenchEntry& entry = entries[idx];
        entry.line = lines[idx].first;
        entry.input = lines[idx].second;
        try {
            const Expr input = parse(entry.input, opts.width);
            entry.report = expand(input, rules, opts.expansion);
            if (opts.selfcheck)
                entry.selfcheck = check_equivalence(input, entry.report->output, opts.width,
                                                    opts.selfcheck_trials, opts.expansion.seed);
        } catch (const OutputTooLarge& e) {
            entry.error = e.what();
            entry.resource_error = true;
        } catch (const CapacityExceeded& e) {
            entry.error = e.what();
            entry.resource_error = true;
        } catch (const Error& e) {
            entry.error = e.what();
        }
    }
    return entries;
}

AggregateReport aggregate(std::span<const BenchEntry> entries) {
    std::vector<std::pair<MetricsReport, MetricsReport>> pairs;
    for (const BenchEntry& e : entries)
        if (e.report) pairs.emplace_back(e.report->metrics_in, e.report->metrics_out);
    return aggregate(std::span<const std::pair<MetricsReport, MetricsReport>>(pairs));
}

}  // namespace mbagen
