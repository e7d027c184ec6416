#include "mbagen/report.hpp"

namespace mbagen {

nlohmann::ordered_json to_json(const MetricsReport& m) {
    nlohmann::ordered_json j;
    j["ast_size"] = m.ast_size;
    j["var_count"] = m.var_count;
    j["const_count"] = m.const_count;
    j["op_count"] = m.op_count;
    j["mba_alternation"] = m.mba_alternation;
    j["entropy_tokens"] = m.entropy_tokens;
    j["entropy_leaves"] = m.entropy_leaves;
    return j;
}

nlohmann::ordered_json to_json(const std::string& input, const ExpansionReport& r) {
    nlohmann::ordered_json j;
    j["input"] = input;
    j["output"] = print(r.output);
    j["stop"] = std::string(to_string(r.stop));
    j["iterations"] = r.iterations;
    j["egraph_nodes"] = r.final_node_count;
    j["metrics_in"] = to_json(r.metrics_in);
    j["metrics_out"] = to_json(r.metrics_out);
    return j;
}

nlohmann::ordered_json to_json(const BenchEntry& e) {
    if (!e.report) {
        nlohmann::ordered_json j;
        j["line"] = e.line;
        j["input"] = e.input;
        j["error"] = e.error;
        return j;
    }
    nlohmann::ordered_json j = to_json(e.input, *e.report);
    if (e.selfcheck) j["selfcheck"] = e.selfcheck->passed ? "passed" : "failed";
    return j;
}

}  // namespace mbagen
