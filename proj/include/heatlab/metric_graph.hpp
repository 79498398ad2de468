#pragma once

#include <span>
#include <string>
#include <vector>

#include "heatlab/common.hpp"

namespace heatlab {

/// One edge of a metric graph: endpoint vertex indices plus a positive length.
/// Parallel edges are distinct entries; u == v is a self-loop (legal away from
/// Dirichlet vertices, counted twice in the degree).
struct Edge {
  int u = -1;
  int v = -1;
  double length = 0.0;
};

class MetricGraph;
struct EquilateralGraph;
EquilateralGraph equilateralize(const MetricGraph& g, double rel_tol,
                                long max_denominator);

/// A compact connected metric graph with a non-empty set of Dirichlet
/// (absorbing) vertices. Immutable after construction; construction validates:
///   - at least one edge, all lengths positive and finite,
///   - vertex ids unique, non-empty, and not using the reserved "_sub" prefix,
///   - every edge endpoint and Dirichlet id known,
///   - the graph is connected,
///   - no self-loop at a Dirichlet vertex.
/// Connectivity of the complement of the Dirichlet set is computed and
/// exposed as a flag, not enforced: graphs such as two loops joined at the
/// absorbing vertex split into independent components whose heat contents add.
class MetricGraph {
 public:
  static MetricGraph make(std::vector<std::string> vertex_ids,
                          std::vector<Edge> edges,
                          std::vector<std::string> dirichlet_ids);

  /// Path with n_edges equal edges, total length given, Dirichlet at one end.
  /// Vertices are named vD, v1, ..., vn.
  static MetricGraph path_graph(double total_length, int n_edges);

  int vertex_count() const { return static_cast<int>(ids_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::string& vertex_id(int v) const { return ids_.at(v); }
  int vertex_index(const std::string& id) const;  // throws input_error
  std::span<const Edge> edges() const { return edges_; }
  const std::vector<int>& dirichlet() const { return dirichlet_; }
  bool is_dirichlet(int v) const { return dirichlet_mask_.at(v) != 0; }
  int degree(int v) const { return degree_.at(v); }
  double total_length() const { return total_length_; }
  double min_edge_length() const { return min_length_; }
  bool complement_connected() const { return complement_connected_; }

  /// All Dirichlet vertices identified into one (the first id is kept).
  /// Preserves the total length and the multiset of edge lengths. An edge
  /// joining two Dirichlet vertices would become a self-loop at the merged
  /// vertex and is rejected.
  MetricGraph merge_dirichlet() const;

 private:
  MetricGraph() = default;
  void finalize(bool allow_reserved_ids);

  std::vector<std::string> ids_;
  std::vector<Edge> edges_;
  std::vector<int> dirichlet_;        // sorted indices
  std::vector<char> dirichlet_mask_;
  std::vector<int> degree_;
  double total_length_ = 0.0;
  double min_length_ = 0.0;
  bool complement_connected_ = true;

  friend EquilateralGraph equilateralize(const MetricGraph&, double, long);
  friend struct EquilateralGraph;
};

/// Result of subdividing a graph into edges of one common length.
struct EquilateralGraph {
  MetricGraph graph;     ///< subdivided skeleton; dummy vertices use "_sub:"
  double edge_length;    ///< common length; edge_count * edge_length == |Gamma|
  std::vector<std::vector<int>> chains;  ///< original edge -> new edge indices
};

/// Subdivide so every edge has one common length. Length ratios are snapped
/// to rationals by continued fractions (denominators capped); the common
/// length is then snapped so the total length is preserved exactly. A
/// self-loop that would survive as a single edge forces one global halving
/// of the common length, so the result is always loop-free.
/// Throws input_error when the lengths are not rationally dependent within
/// the tolerance.
EquilateralGraph equilateralize(const MetricGraph& g, double rel_tol = 1e-9,
                                long max_denominator = 1000000);

/// Parse the graph file format: an object with keys "vertices" (array of
/// strings), "edges" (array of [string, string, number]), "dirichlet"
/// (array of strings). Errors carry a line number for syntax problems and a
/// named rule for invariant violations.
MetricGraph parse_graph(const std::string& text);

/// Canonical serialization; parse_graph(write_graph(g)) reproduces g and
/// write_graph of the reparse is byte-identical.
std::string write_graph(const MetricGraph& g);

/// Hop distances from src over the combinatorial skeleton (-1 = unreachable).
std::vector<int> bfs_distances(const MetricGraph& g, int src);

}  // namespace heatlab
