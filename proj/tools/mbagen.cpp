// mbagen: command-line front end for the MBA expansion engine.
//
// Exit codes: 0 success, 1 a soundness check found a counterexample,
// 2 input error (syntax, rule file, configuration, corpus), 3 resource error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mbagen/bench.hpp"
#include "mbagen/builtin_rules.hpp"
#include "mbagen/errors.hpp"
#include "mbagen/expansion.hpp"
#include "mbagen/metrics.hpp"
#include "mbagen/report.hpp"
#include "mbagen/rewrite.hpp"
#include "mbagen/verify.hpp"

namespace {

using namespace mbagen;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;
constexpr int kResourceError = 3;

struct Options {
    std::string expr;
    std::string corpus;
    std::string rules_path;
    std::string check_path;
    std::string output;
    std::size_t node_limit = 3000;
    std::size_t iter_limit = 2;
    long long time_limit_ms = 2000;
    std::uint64_t target_size = 0;
    std::size_t rounds = 64;
    std::uint64_t max_output = 50'000;
    unsigned bitwidth = 64;
    std::uint64_t seed = 0;
    std::uint64_t trials = 1000;
    bool selfcheck = false;
    bool no_check = false;
    bool json = false;
};

// A limit of 0 on the command line disables that limit.
ExpansionConfig expansion_config(const Options& o) {
    ExpansionConfig cfg;
    cfg.node_limit = o.node_limit ? std::optional<std::size_t>(o.node_limit) : std::nullopt;
    cfg.iter_limit = o.iter_limit ? std::optional<std::size_t>(o.iter_limit) : std::nullopt;
    cfg.time_limit = o.time_limit_ms ? std::optional(std::chrono::milliseconds(o.time_limit_ms)) : std::nullopt;
    if (o.target_size) cfg.target_ast_size = o.target_size;
    cfg.extraction_rounds = o.rounds;
    cfg.max_output_nodes = o.max_output;
    cfg.seed = o.seed;
    cfg.validate();
    return cfg;
}

std::vector<Rule> load(const Options& o, BitWidth width) {
    if (o.rules_path.empty()) return parse_rules(kDefaultRules, width);
    return load_rules(o.rules_path, width);
}

std::string format_env(const Environment& env) {
    std::string out = "{";
    for (const auto& [name, value] : env) {
        if (out.size() > 1) out += ", ";
        out += name + ": " + std::to_string(value);
    }
    return out + "}";
}

void print_counterexample(std::ostream& os, const std::string& what, const Counterexample& cx) {
    os << what << ": counterexample " << format_env(cx.env) << " gives " << cx.lhs_value << " vs "
       << cx.rhs_value << "\n";
}

// Runs the admission checks; prints failures to stderr and returns false on any.
bool audit(std::span<const Rule> rules, std::ostream& log, bool verbose) {
    bool ok = true;
    for (const Rule& rule : rules) {
        bool rule_ok = true;
        for (const RuleAudit& a : audit_rule(rule)) {
            if (a.result.passed) continue;
            rule_ok = false;
            print_counterexample(std::cerr,
                                 "rule '" + rule.name + "' unsound at " + std::to_string(a.bits) + " bits",
                                 *a.result.counterexample);
        }
        if (verbose && rule_ok) log << "ok " << rule.name << "\n";
        ok &= rule_ok;
    }
    return ok;
}

int run_obfuscate(const Options& o) {
    const BitWidth width(o.bitwidth);
    const ExpansionConfig cfg = expansion_config(o);
    const std::vector<Rule> rules = load(o, width);
    if (!o.no_check && !audit(rules, std::cerr, false)) return kInputError;

    const Expr input = parse(o.expr, width);
    const ExpansionReport report = expand(input, rules, cfg);

    std::optional<CheckResult> check;
    if (o.selfcheck) check = check_equivalence(input, report.output, width, o.trials, o.seed);

    if (o.json) {
        auto j = to_json(o.expr, report);
        if (check) j["selfcheck"] = check->passed ? "passed" : "failed";
        std::cout << j.dump() << "\n";
    } else {
        std::cout << print(report.output) << "\n";
    }
    if (check && !check->passed) {
        print_counterexample(std::cerr, "self-check failed", *check->counterexample);
        return kCheckFailed;
    }
    return kOk;
}

int run_bench(const Options& o) {
    BenchOptions opts;
    opts.width = BitWidth(o.bitwidth);
    opts.expansion = expansion_config(o);
    opts.selfcheck = o.selfcheck;
    opts.selfcheck_trials = o.trials;
    const std::vector<Rule> rules = load(o, opts.width);
    if (!o.no_check && !audit(rules, std::cerr, false)) return kInputError;

    const auto lines = read_corpus(o.corpus);
    if (lines.empty()) throw EmptyCorpus();
    const std::vector<BenchEntry> entries = run_corpus(lines, rules, opts);

    std::size_t failed = 0;
    bool resource = false;
    bool unsound = false;
    std::string jsonl;
    for (const BenchEntry& e : entries) {
        jsonl += to_json(e).dump() + "\n";
        if (!e.report) {
            ++failed;
            resource |= e.resource_error;
            std::cerr << o.corpus << ":" << e.line << ": " << e.error << "\n";
        } else if (e.selfcheck && !e.selfcheck->passed) {
            unsound = true;
            print_counterexample(std::cerr, o.corpus + ":" + std::to_string(e.line) + ": self-check failed",
                                 *e.selfcheck->counterexample);
        }
    }
    if (failed) std::cerr << failed << " of " << entries.size() << " lines skipped\n";
    if (failed == entries.size()) return resource ? kResourceError : kInputError;

    const std::string csv = to_csv(aggregate(entries));
    if (o.output.empty()) {
        std::cout << csv;
    } else {
        std::ofstream(o.output + ".jsonl", std::ios::binary) << jsonl;
        std::ofstream(o.output + ".csv", std::ios::binary) << csv;
    }
    return unsound ? kCheckFailed : kOk;
}

int run_check_rules(const Options& o) {
    const std::vector<Rule> rules = load_rules(o.check_path, BitWidth(o.bitwidth));
    return audit(rules, std::cout, true) ? kOk : kCheckFailed;
}

int run_metrics(const Options& o) {
    const MetricsReport m = measure(parse(o.expr, BitWidth(o.bitwidth)));
    if (o.json) {
        std::cout << to_json(m).dump() << "\n";
        return kOk;
    }
    std::printf("ast_size %llu\nvar_count %llu\nconst_count %llu\nop_count %llu\nmba_alternation %llu\n"
                "entropy_tokens %.4f\nentropy_leaves %.4f\n",
                static_cast<unsigned long long>(m.ast_size), static_cast<unsigned long long>(m.var_count),
                static_cast<unsigned long long>(m.const_count), static_cast<unsigned long long>(m.op_count),
                static_cast<unsigned long long>(m.mba_alternation), m.entropy_tokens, m.entropy_leaves);
    return kOk;
}

void add_expansion_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("-r,--rules", o.rules_path, "Rule file (default: built-in rule set)")->check(CLI::ExistingFile);
    cmd->add_option("--node-limit", o.node_limit, "Maximum e-nodes, 0 for none")->capture_default_str();
    cmd->add_option("--iter-limit", o.iter_limit, "Maximum match/apply/rebuild rounds, 0 for none")
        ->capture_default_str();
    cmd->add_option("--time-limit-ms", o.time_limit_ms, "Wall-clock budget in milliseconds, 0 for none")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--target-size", o.target_size, "Stop growing once a term of this size is extractable");
    cmd->add_option("--rounds", o.rounds, "Depth cap of the maximizing extractor")->capture_default_str();
    cmd->add_option("--max-output", o.max_output, "Largest term to materialize")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Seed for randomized checks")->capture_default_str();
    cmd->add_flag("--selfcheck", o.selfcheck, "Check input/output equivalence after expansion");
    cmd->add_option("--trials", o.trials, "Random environments per self-check")->capture_default_str();
    cmd->add_flag("--no-check", o.no_check, "Skip rule soundness checks");
}

void add_width_flag(CLI::App* cmd, Options& o) {
    cmd->add_option("--bitwidth", o.bitwidth, "Word size in bits")
        ->capture_default_str()
        ->check(CLI::IsMember({4u, 8u, 16u, 32u, 64u}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed boolean-arithmetic expression generator based on e-graph expansion"};
    app.require_subcommand(1);
    Options o;

    auto* obf = app.add_subcommand("obfuscate", "Expand one expression");
    obf->add_option("-e,--expr", o.expr, "Input expression")->required();
    obf->add_flag("--json", o.json, "Print the full JSON report");
    add_expansion_flags(obf, o);
    add_width_flag(obf, o);

    auto* bench = app.add_subcommand("bench", "Expand every line of a corpus and aggregate metrics");
    bench->add_option("-f,--corpus", o.corpus, "Corpus file, one expression per line")->required();
    bench->add_option("-o,--output", o.output, "Write <path>.jsonl and <path>.csv instead of CSV to stdout");
    add_expansion_flags(bench, o);
    add_width_flag(bench, o);

    auto* check = app.add_subcommand("check-rules", "Verify every rule of a rule file");
    check->add_option("file", o.check_path, "Rule file")->required()->check(CLI::ExistingFile);
    add_width_flag(check, o);

    auto* metrics = app.add_subcommand("metrics", "Print the complexity metrics of an expression");
    metrics->add_option("-e,--expr", o.expr, "Expression")->required();
    metrics->add_flag("--json", o.json, "JSON output");
    add_width_flag(metrics, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*obf) return run_obfuscate(o);
        if (*bench) return run_bench(o);
        if (*check) return run_check_rules(o);
        return run_metrics(o);
    } catch (const OutputTooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kResourceError;
    } catch (const CapacityExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kResourceError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}
