#pragma once

// JSON renderings of metrics and run reports.

#include <string>

#include <json.hpp>

#include "mbagen/bench.hpp"
#include "mbagen/expansion.hpp"
#include "mbagen/metrics.hpp"

namespace mbagen {

nlohmann::ordered_json to_json(const MetricsReport& m);

/// {"input", "output", "stop", "iterations", "egraph_nodes", "metrics_in",
/// "metrics_out"}; timing is left out so that reruns are byte-identical.
nlohmann::ordered_json to_json(const std::string& input, const ExpansionReport& r);

/// The run report, or {"line", "input", "error"} for a failed line.
nlohmann::ordered_json to_json(const BenchEntry& e);

}  // namespace mbagen
