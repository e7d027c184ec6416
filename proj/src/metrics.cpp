#include "mbagen/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>
#include <vector>

#include "mbagen/errors.hpp"

namespace mbagen {

namespace {

double entropy(const std::map<std::string, std::uint64_t>& freq) {
    std::uint64_t total = 0;
    for (const auto& [_, n] : freq) total += n;
    if (total == 0) return 0.0;
    double h = 0.0;
    for (const auto& [_, n] : freq) {
        const double p = static_cast<double>(n) / static_cast<double>(total);
        h -= p * std::log2(p);
    }
    return h == 0.0 ? 0.0 : h;  // avoid -0
}

std::string label_of(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Var: return "v:" + e.name();
        case Expr::Kind::Const: return "c:" + std::to_string(e.value());
        case Expr::Kind::Apply: break;
    }
    return "o:" + std::string(label_name(e.op()));
}

}  // namespace

MetricsReport measure(const Expr& e) {
    // Distinct subterm objects in topological order (parents before children),
    // then occurrence multiplicities pushed down from the root.
    std::vector<Expr> order;
    std::unordered_map<const void*, std::size_t> index;
    auto visit = [&](auto&& self, const Expr& x) -> void {
        if (index.contains(x.identity())) return;
        for (const Expr& c : x.children()) self(self, c);
        index.emplace(x.identity(), order.size());
        order.push_back(x);
    };
    visit(visit, e);

    std::vector<std::uint64_t> mult(order.size(), 0);
    mult.back() = 1;
    for (std::size_t i = order.size(); i-- > 0;)
        for (const Expr& c : order[i].children()) mult[index.at(c.identity())] += mult[i];

    MetricsReport r;
    std::map<std::string, std::uint64_t> tokens;
    std::map<std::string, std::uint64_t> leaves;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Expr& x = order[i];
        const std::uint64_t m = mult[i];
        const std::string label = label_of(x);
        tokens[label] += m;
        r.ast_size += m;
        switch (x.kind()) {
            case Expr::Kind::Var: r.var_count += m; leaves[label] += m; break;
            case Expr::Kind::Const: r.const_count += m; leaves[label] += m; break;
            case Expr::Kind::Apply:
                r.op_count += m;
                for (const Expr& c : x.children())
                    if (c.is_apply() && category(c.op()) != category(x.op())) r.mba_alternation += m;
                break;
        }
    }
    r.entropy_tokens = entropy(tokens);
    r.entropy_leaves = entropy(leaves);
    return r;
}

AggregateReport aggregate(std::span<const std::pair<MetricsReport, MetricsReport>> reports) {
    if (reports.empty()) throw EmptyCorpus();
    AggregateReport out;
    out.count = reports.size();
    auto add = [](MetricMeans& m, const MetricsReport& r) {
        m.ast_size += static_cast<double>(r.ast_size);
        m.var_count += static_cast<double>(r.var_count);
        m.const_count += static_cast<double>(r.const_count);
        m.op_count += static_cast<double>(r.op_count);
        m.mba_alternation += static_cast<double>(r.mba_alternation);
        m.entropy_tokens += r.entropy_tokens;
        m.entropy_leaves += r.entropy_leaves;
    };
    auto scale = [](MetricMeans& m, double n) {
        m.ast_size /= n;
        m.var_count /= n;
        m.const_count /= n;
        m.op_count /= n;
        m.mba_alternation /= n;
        m.entropy_tokens /= n;
        m.entropy_leaves /= n;
    };
    for (const auto& [in, obf] : reports) {
        add(out.original, in);
        add(out.obfuscated, obf);
    }
    scale(out.original, static_cast<double>(out.count));
    scale(out.obfuscated, static_cast<double>(out.count));
    return out;
}

std::string to_csv(const AggregateReport& report) {
    std::string out = "variant,ast_size,var_count,const_count,op_count,mba_alternation,entropy\n";
    auto row = [&out](const char* name, const MetricMeans& m) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s,%.2f,%.2f,%.2f,%.2f,%.2f,%.2f\n", name, m.ast_size, m.var_count,
                      m.const_count, m.op_count, m.mba_alternation, m.entropy_tokens);
        out += buf;
    };
    row("original", report.original);
    row("obfuscated", report.obfuscated);
    return out;
}

}  // namespace mbagen
