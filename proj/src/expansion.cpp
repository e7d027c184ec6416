#include "mbagen/expansion.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

#include "mbagen/errors.hpp"

namespace mbagen {

std::string_view to_string(StopReason r) noexcept {
    switch (r) {
        case StopReason::NodeLimit: return "NodeLimit";
        case StopReason::IterLimit: return "IterLimit";
        case StopReason::TimeLimit: return "TimeLimit";
        case StopReason::TargetSizeReached: return "TargetSizeReached";
        case StopReason::Saturated: return "Saturated";
    }
    return "Unknown";
}

void ExpansionConfig::validate() const {
    if (node_limit && *node_limit == 0) throw std::invalid_argument("node limit must be positive");
    if (iter_limit && *iter_limit == 0) throw std::invalid_argument("iteration limit must be positive");
    if (time_limit && time_limit->count() <= 0) throw std::invalid_argument("time limit must be positive");
    if (!node_limit && !iter_limit && !time_limit)
        throw std::invalid_argument("at least one of node, iteration or time limit is required");
    if (target_ast_size && *target_ast_size == 0) throw std::invalid_argument("target size must be positive");
    if (extraction_rounds == 0) throw std::invalid_argument("extraction rounds must be positive");
    if (max_output_nodes == 0) throw std::invalid_argument("output node limit must be positive");
}

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

Expr leaf_expr(const EGraph& g, const Label& l) {
    if (l.kind == Expr::Kind::Var) return Expr::var(g.symbol_name(l.payload));
    return Expr::constant(l.payload);
}

Expr node_expr(const EGraph& g, const ENode& n, std::span<const Expr> kids) {
    if (n.is_leaf()) return leaf_expr(g, n.label());
    if (kids.size() == 1) return Expr::apply(n.label().op, kids[0]);
    return Expr::apply(n.label().op, kids[0], kids[1]);
}

using Clock = std::chrono::steady_clock;

GrowthResult grow_from(EGraph& g, ClassId root, std::span<const Rule> rules, const ExpansionConfig& cfg,
                       Clock::time_point start) {
    auto out_of_time = [&] { return cfg.time_limit && Clock::now() - start >= *cfg.time_limit; };
    g.rebuild();
    GrowthResult res;
    for (;;) {
        if (cfg.iter_limit && res.iterations >= *cfg.iter_limit) {
            res.stop = StopReason::IterLimit;
            return res;
        }

        bool timeout = false;
        std::vector<std::vector<Match>> matches;
        matches.reserve(rules.size());
        for (const Rule& rule : rules) {
            if (out_of_time()) {
                timeout = true;
                break;
            }
            matches.push_back(ematch(g, rule.lhs));
        }

        bool changed = false;
        bool hit_node_limit = false;
        for (std::size_t i = 0; i < matches.size() && !timeout; ++i) {
            for (const Match& m : matches[i]) {
                if (out_of_time()) {
                    timeout = true;
                    break;
                }
                if (cfg.node_limit &&
                    g.node_count() + count_new_nodes(g, rules[i].rhs, m.subst) > *cfg.node_limit) {
                    hit_node_limit = true;
                    continue;
                }
                changed |= apply_match(g, rules[i], m);
            }
        }
        g.rebuild();
        ++res.iterations;

        if (timeout) {
            res.stop = StopReason::TimeLimit;
            return res;
        }
        if (hit_node_limit) {
            res.stop = StopReason::NodeLimit;
            return res;
        }
        if (!changed) {
            res.stop = StopReason::Saturated;
            return res;
        }
        if (cfg.target_ast_size) {
            const MaxExtractor ex(g, cfg.extraction_rounds);
            if (auto r = ex.deepest_within(root, cfg.max_output_nodes);
                r && *ex.best(root, *r) >= *cfg.target_ast_size) {
                res.stop = StopReason::TargetSizeReached;
                return res;
            }
        }
    }
}

}  // namespace

GrowthResult grow(EGraph& g, ClassId root, std::span<const Rule> rules, const ExpansionConfig& cfg) {
    cfg.validate();
    return grow_from(g, root, rules, cfg, Clock::now());
}

ExpansionReport expand(const Expr& input, std::span<const Rule> rules, const ExpansionConfig& cfg) {
    cfg.validate();
    const auto start = Clock::now();
    const std::size_t cap = cfg.node_limit ? 4 * *cfg.node_limit : EGraph::kUnlimited;
    EGraph g(std::max<std::size_t>(cap, 1));
    const ClassId root = g.add_expr(input);

    ExpansionReport report;
    const GrowthResult grown = grow_from(g, root, rules, cfg, start);
    report.stop = grown.stop;
    report.iterations = grown.iterations;
    report.final_node_count = g.node_count();
    report.final_class_count = g.class_count();

    const std::size_t input_depth = depth(input);
    const MaxExtractor ex(g, std::max(cfg.extraction_rounds, input_depth));
    const auto round = ex.deepest_within(root, cfg.max_output_nodes);
    if (!round) {
        if (auto b = ex.best(root, ex.rounds())) throw OutputTooLarge(*b, cfg.max_output_nodes);
        throw Unextractable(g.find(root).value(), ex.rounds());
    }
    report.metrics_in = measure(input);
    if (*ex.best(root, *round) < report.metrics_in.ast_size) {
        // The budget forced a round shallower than the input itself.
        report.output = input;
        report.extraction_round = input_depth;
    } else {
        report.output = ex.extract(root, *round);
        report.extraction_round = *round;
    }
    report.metrics_out = measure(report.output);
    report.elapsed = Clock::now() - start;
    return report;
}

// ---------------------------------------------------------------------------

MaxExtractor::MaxExtractor(const EGraph& g, std::size_t rounds) : g_(g), rounds_(rounds), ids_(g.class_ids()) {
    const std::size_t n = ids_.size();
    // Child slots per node, flattened per class.
    std::vector<std::vector<std::vector<std::size_t>>> kid_slots(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (const ENode& node : g.eclass(ids_[s]).nodes) {
            std::vector<std::size_t> ks;
            for (ClassId c : node.children()) ks.push_back(slot(c));
            kid_slots[s].push_back(std::move(ks));
        }
    }

    cost_.assign(rounds + 1, std::vector<std::uint64_t>(n, 0));
    choice_.assign(rounds + 1, std::vector<std::int32_t>(n, kNone));
    for (std::size_t s = 0; s < n; ++s) {
        const auto& nodes = g.eclass(ids_[s]).nodes;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].is_leaf()) {
                cost_[0][s] = 1;
                choice_[0][s] = static_cast<std::int32_t>(i);
                break;
            }
        }
    }
    for (std::size_t r = 1; r <= rounds; ++r) {
        const auto& prev = cost_[r - 1];
        for (std::size_t s = 0; s < n; ++s) {
            std::uint64_t best = prev[s];
            std::int32_t pick = best ? kCarry : kNone;
            const auto& nodes = g.eclass(ids_[s]).nodes;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                std::uint64_t total = 1;
                bool ok = true;
                for (std::size_t k : kid_slots[s][i]) {
                    if (prev[k] == 0) {
                        ok = false;
                        break;
                    }
                    total = sat_add(total, prev[k]);
                }
                if (ok && total > best) {
                    best = total;
                    pick = static_cast<std::int32_t>(i);
                }
            }
            cost_[r][s] = best;
            choice_[r][s] = pick;
        }
    }
}

std::size_t MaxExtractor::slot(ClassId c) const {
    const ClassId canon = g_.find(c);
    auto it = std::lower_bound(ids_.begin(), ids_.end(), canon);
    if (it == ids_.end() || *it != canon) throw InvalidId(c.value());
    return static_cast<std::size_t>(it - ids_.begin());
}

std::optional<std::uint64_t> MaxExtractor::best(ClassId c, std::size_t round) const {
    const std::uint64_t v = cost_.at(round)[slot(c)];
    if (v == 0) return std::nullopt;
    return v;
}

std::optional<std::size_t> MaxExtractor::deepest_within(ClassId c, std::uint64_t budget) const {
    const std::size_t s = slot(c);
    for (std::size_t r = rounds_ + 1; r-- > 0;)
        if (cost_[r][s] != 0 && cost_[r][s] <= budget) return r;
    return std::nullopt;
}

Expr MaxExtractor::extract(ClassId c, std::size_t round) const {
    if (round > rounds_ || !best(c, round)) throw Unextractable(g_.find(c).value(), round);
    std::map<std::pair<std::size_t, std::size_t>, Expr> memo;
    auto go = [&](auto&& self, std::size_t s, std::size_t r) -> Expr {
        while (choice_[r][s] == kCarry) --r;
        if (auto it = memo.find({s, r}); it != memo.end()) return it->second;
        const ENode& node = g_.eclass(ids_[s]).nodes[static_cast<std::size_t>(choice_[r][s])];
        std::vector<Expr> kids;
        for (ClassId k : node.children()) kids.push_back(self(self, slot(k), r - 1));
        Expr e = node_expr(g_, node, kids);
        memo.emplace(std::make_pair(s, r), e);
        return e;
    };
    return go(go, slot(c), round);
}

Expr extract_max(const EGraph& g, ClassId root, std::size_t rounds, std::uint64_t max_output_nodes) {
    if (rounds == 0) throw std::invalid_argument("extraction needs at least one round");
    const MaxExtractor ex(g, rounds);
    const auto size = ex.best(root, rounds);
    if (!size) throw Unextractable(g.find(root).value(), rounds);
    if (*size > max_output_nodes) throw OutputTooLarge(*size, max_output_nodes);
    return ex.extract(root, rounds);
}

Expr extract_min(const EGraph& g, ClassId root) {
    const std::vector<ClassId> ids = g.class_ids();
    auto slot = [&](ClassId c) {
        return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), g.find(c)) - ids.begin());
    };
    std::vector<std::uint64_t> cost(ids.size(), 0);
    std::vector<std::size_t> pick(ids.size(), 0);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < ids.size(); ++s) {
            const auto& nodes = g.eclass(ids[s]).nodes;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                std::uint64_t total = 1;
                bool ok = true;
                for (ClassId k : nodes[i].children()) {
                    const std::uint64_t ck = cost[slot(k)];
                    if (ck == 0) {
                        ok = false;
                        break;
                    }
                    total = sat_add(total, ck);
                }
                if (ok && (cost[s] == 0 || total < cost[s])) {
                    cost[s] = total;
                    pick[s] = i;
                    changed = true;
                }
            }
        }
    }
    if (cost[slot(root)] == 0) throw Unextractable(g.find(root).value(), 0);
    std::vector<std::optional<Expr>> memo(ids.size());
    auto go = [&](auto&& self, std::size_t s) -> Expr {
        if (memo[s]) return *memo[s];
        const ENode& node = g.eclass(ids[s]).nodes[pick[s]];
        std::vector<Expr> kids;
        for (ClassId k : node.children()) kids.push_back(self(self, slot(k)));
        memo[s] = node_expr(g, node, kids);
        return *memo[s];
    };
    return go(go, slot(root));
}

}  // namespace mbagen
