#include "heatlab/suite.hpp"

#include <fstream>
#include <sstream>

namespace heatlab {

namespace {

MetricGraph star(int leaves) {
  std::vector<std::string> ids{"vD"};
  std::vector<Edge> edges;
  for (int i = 1; i <= leaves; ++i) {
    ids.push_back("l" + std::to_string(i));
    edges.push_back({0, i, 1.0});
  }
  return MetricGraph::make(std::move(ids), std::move(edges), {"vD"});
}

MetricGraph cycle_pendant(int cycle) {
  std::vector<std::string> ids{"vD"};
  std::vector<Edge> edges{{0, 1, 1.0}};
  for (int i = 1; i <= cycle; ++i) {
    ids.push_back("c" + std::to_string(i));
    if (i > 1) edges.push_back({i - 1, i, 1.0});
  }
  edges.push_back({cycle, 1, 1.0});
  return MetricGraph::make(std::move(ids), std::move(edges), {"vD"});
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "path1",    "path2",          "path3",
      "path4",    "pitchfork",      "pitchfork-long",
      "star3",    "star4",          "figure-eight",
      "theta",    "cycle3-pendant", "cycle4-pendant",
  };
  return names;
}

bool is_suite_name(const std::string& name) {
  if (name == "interval") return true;
  for (const auto& n : suite_names())
    if (n == name) return true;
  return false;
}

MetricGraph suite_graph(const std::string& name) {
  if (name == "path1" || name == "interval")
    return MetricGraph::path_graph(1.0, 1);
  if (name == "path2") return MetricGraph::path_graph(2.0, 2);
  if (name == "path3") return MetricGraph::path_graph(3.0, 3);
  if (name == "path4") return MetricGraph::path_graph(4.0, 4);
  if (name == "pitchfork")
    return MetricGraph::make({"vD", "w", "a", "b"},
                             {{0, 1, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}}, {"vD"});
  if (name == "pitchfork-long")
    return MetricGraph::make(
        {"vD", "a", "w", "b", "c"},
        {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {2, 4, 1.0}}, {"vD"});
  if (name == "star3") return star(3);
  if (name == "star4") return star(4);
  if (name == "figure-eight")
    return MetricGraph::make(
        {"vD", "a", "b"},
        {{0, 1, 1.0}, {1, 0, 1.0}, {0, 2, 1.0}, {2, 0, 1.0}}, {"vD"});
  if (name == "theta")
    return MetricGraph::make({"vD", "w"},
                             {{0, 1, 1.0}, {0, 1, 1.0}, {0, 1, 1.0}}, {"vD"});
  if (name == "cycle3-pendant") return cycle_pendant(3);
  if (name == "cycle4-pendant") return cycle_pendant(4);
  throw input_error("unknown builtin graph '" + name + "'");
}

MetricGraph load_graph(const std::string& name_or_path) {
  if (is_suite_name(name_or_path)) return suite_graph(name_or_path);
  std::ifstream in(name_or_path);
  if (!in)
    throw input_error("cannot open graph file '" + name_or_path +
                      "' (and it is not a builtin graph name)");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

}  // namespace heatlab
