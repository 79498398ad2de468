#pragma once

#include <string>
#include <vector>

#include "heatlab/metric_graph.hpp"

namespace heatlab {

/// Canonical names of the builtin reference graphs, all with unit edges and
/// one Dirichlet vertex.
const std::vector<std::string>& suite_names();

bool is_suite_name(const std::string& name);

/// Builtin graph by name; accepts the alias "interval" for path1.
MetricGraph suite_graph(const std::string& name);

/// Builtin graph by name, or a graph file by path.
MetricGraph load_graph(const std::string& name_or_path);

}  // namespace heatlab
