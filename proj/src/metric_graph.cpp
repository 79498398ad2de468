#include "heatlab/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace heatlab {

namespace {

constexpr const char* kReservedPrefix = "_sub:";

bool has_reserved_prefix(const std::string& id) {
  return id.rfind("_sub", 0) == 0;
}

}  // namespace

void MetricGraph::finalize(bool allow_reserved_ids) {
  const int n = static_cast<int>(ids_.size());
  if (n == 0) throw input_error("graph invariant violated: vertex list empty");
  if (edges_.empty())
    throw input_error("graph invariant violated: graph has no edges");

  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (id.empty())
      throw input_error("graph invariant violated: empty vertex id");
    if (!allow_reserved_ids && has_reserved_prefix(id))
      throw input_error(
          "graph invariant violated: vertex id uses reserved prefix \"_sub\" "
          "(id '" + id + "')");
    if (!seen.insert(id).second)
      throw input_error("graph invariant violated: duplicate vertex id '" +
                        id + "'");
  }

  degree_.assign(n, 0);
  total_length_ = 0.0;
  min_length_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
      throw input_error("graph invariant violated: edge " + std::to_string(i) +
                        " references an unknown vertex");
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      throw input_error("graph invariant violated: edge " + std::to_string(i) +
                        " length must be positive and finite");
    degree_[e.u] += 1;
    degree_[e.v] += 1;  // a self-loop contributes 2 on purpose
    total_length_ += e.length;
    min_length_ = std::min(min_length_, e.length);
  }

  if (dirichlet_.empty())
    throw input_error("graph invariant violated: dirichlet set empty");
  std::sort(dirichlet_.begin(), dirichlet_.end());
  dirichlet_.erase(std::unique(dirichlet_.begin(), dirichlet_.end()),
                   dirichlet_.end());
  dirichlet_mask_.assign(n, 0);
  for (int v : dirichlet_) {
    if (v < 0 || v >= n)
      throw input_error("graph invariant violated: dirichlet id unknown");
    dirichlet_mask_[v] = 1;
  }
  for (const Edge& e : edges_)
    if (e.u == e.v && dirichlet_mask_[e.u])
      throw input_error(
          "graph invariant violated: self-loop at a Dirichlet vertex '" +
          ids_[e.u] + "'");

  // Connectivity of the whole graph over the combinatorial skeleton.
  {
    std::vector<std::vector<int>> adj(n);
    for (const Edge& e : edges_) {
      adj[e.u].push_back(e.v);
      adj[e.v].push_back(e.u);
    }
    std::vector<char> vis(n, 0);
    std::deque<int> q{0};
    vis[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int w : adj[u])
        if (!vis[w]) {
          vis[w] = 1;
          ++reached;
          q.push_back(w);
        }
    }
    if (reached != n)
      throw input_error("graph invariant violated: graph is disconnected");
  }

  // Connectivity of the metric complement of the Dirichlet set: edge
  // interiors are glued through shared non-Dirichlet endpoints. Recorded,
  // not enforced; a disconnected complement just splits the heat content
  // into a sum over components.
  {
    const int m = static_cast<int>(edges_.size());
    std::vector<std::vector<int>> incident(n);
    for (int i = 0; i < m; ++i) {
      if (!dirichlet_mask_[edges_[i].u]) incident[edges_[i].u].push_back(i);
      if (!dirichlet_mask_[edges_[i].v] && edges_[i].v != edges_[i].u)
        incident[edges_[i].v].push_back(i);
    }
    std::vector<char> vis(m, 0);
    std::deque<int> q{0};
    vis[0] = 1;
    int reached = 1;
    while (!q.empty()) {
      int ei = q.front();
      q.pop_front();
      for (int end : {edges_[ei].u, edges_[ei].v}) {
        if (dirichlet_mask_[end]) continue;
        for (int ej : incident[end])
          if (!vis[ej]) {
            vis[ej] = 1;
            ++reached;
            q.push_back(ej);
          }
      }
    }
    complement_connected_ = (reached == m);
  }
}

MetricGraph MetricGraph::make(std::vector<std::string> vertex_ids,
                              std::vector<Edge> edges,
                              std::vector<std::string> dirichlet_ids) {
  MetricGraph g;
  g.ids_ = std::move(vertex_ids);
  g.edges_ = std::move(edges);
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(g.ids_.size()); ++i)
    index.emplace(g.ids_[i], i);
  for (const auto& id : dirichlet_ids) {
    auto it = index.find(id);
    if (it == index.end())
      throw input_error("graph invariant violated: dirichlet id '" + id +
                        "' unknown");
    g.dirichlet_.push_back(it->second);
  }
  g.finalize(/*allow_reserved_ids=*/false);
  return g;
}

MetricGraph MetricGraph::path_graph(double total_length, int n_edges) {
  if (!(total_length > 0.0) || !std::isfinite(total_length))
    throw input_error("path_graph: total length must be positive");
  if (n_edges < 1) throw input_error("path_graph: need at least one edge");
  MetricGraph g;
  g.ids_.push_back("vD");
  for (int i = 1; i <= n_edges; ++i) g.ids_.push_back("v" + std::to_string(i));
  const double ell = total_length / n_edges;
  for (int i = 0; i < n_edges; ++i) g.edges_.push_back({i, i + 1, ell});
  g.dirichlet_ = {0};
  g.finalize(/*allow_reserved_ids=*/false);
  return g;
}

int MetricGraph::vertex_index(const std::string& id) const {
  for (int i = 0; i < vertex_count(); ++i)
    if (ids_[i] == id) return i;
  throw input_error("unknown vertex id '" + id + "'");
}

MetricGraph MetricGraph::merge_dirichlet() const {
  if (dirichlet_.size() == 1) return *this;
  const int keep = dirichlet_.front();
  std::vector<int> remap(vertex_count(), -1);
  MetricGraph g;
  for (int v = 0; v < vertex_count(); ++v) {
    if (is_dirichlet(v) && v != keep) continue;
    remap[v] = static_cast<int>(g.ids_.size());
    g.ids_.push_back(ids_[v]);
  }
  for (int v : dirichlet_) remap[v] = remap[keep];
  for (const Edge& e : edges_) {
    Edge ne{remap[e.u], remap[e.v], e.length};
    if (ne.u == ne.v)
      throw input_error(
          "merge_dirichlet: edge between two Dirichlet vertices would become "
          "a self-loop at the merged vertex");
    g.edges_.push_back(ne);
  }
  g.dirichlet_ = {remap[keep]};
  g.finalize(/*allow_reserved_ids=*/true);
  return g;
}

std::vector<int> bfs_distances(const MetricGraph& g, int src) {
  std::vector<std::vector<int>> adj(g.vertex_count());
  for (const Edge& e : g.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<int> q{src};
  dist.at(src) = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int w : adj[u])
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push_back(w);
      }
  }
  return dist;
}

namespace {

/// Best rational p/q ~ r with q <= max_den and relative error <= rel_tol.
/// Continued-fraction convergents; returns false if none reaches the
/// tolerance within the denominator cap.
bool rational_snap(double r, double rel_tol, long max_den, std::int64_t* p_out,
                   std::int64_t* q_out) {
  std::int64_t p0 = 1, q0 = 0, p1 = 0, q1 = 1;  // convergents h(-1), h(-2)
  double x = r;
  for (int iter = 0; iter < 64; ++iter) {
    double a_f = std::floor(x);
    if (a_f > 4e18) return false;
    std::int64_t a = static_cast<std::int64_t>(a_f);
    std::int64_t p2 = a * p0 + p1;
    std::int64_t q2 = a * q0 + q1;
    if (q2 > max_den || q2 < 0 || p2 < 0) return false;
    p1 = p0; q1 = q0; p0 = p2; q0 = q2;
    if (q0 > 0 && std::abs(r - double(p0) / double(q0)) <= rel_tol * r) {
      *p_out = p0;
      *q_out = q0;
      return true;
    }
    double frac = x - a_f;
    if (frac <= 1e-15) return false;
    x = 1.0 / frac;
  }
  return false;
}

std::int64_t checked_lcm(std::int64_t a, std::int64_t b) {
  std::int64_t g = std::gcd(a, b);
  __int128 l = static_cast<__int128>(a / g) * b;
  if (l > 1000000000000LL)
    throw input_error(
        "equilateralize: edge lengths not rationally dependent within "
        "tolerance (common denominator overflow)");
  return static_cast<std::int64_t>(l);
}

}  // namespace

EquilateralGraph equilateralize(const MetricGraph& g, double rel_tol,
                                long max_denominator) {
  const auto edges = g.edges();
  const double base = g.min_edge_length();

  std::vector<std::int64_t> p(edges.size()), q(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!rational_snap(edges[i].length / base, rel_tol, max_denominator,
                       &p[i], &q[i]))
      throw input_error(
          "equilateralize: edge lengths not rationally dependent within "
          "tolerance (edge " + std::to_string(i) + " vs shortest edge, ratio " +
          format_double(edges[i].length / base) + ")");
  }

  // Common length = base * gcd(p_i/q_i); counts k_i = (p_i/q_i) / that gcd.
  std::int64_t gp = p[0], lq = q[0];
  for (std::size_t i = 1; i < edges.size(); ++i) {
    gp = std::gcd(gp, p[i]);
    lq = checked_lcm(lq, q[i]);
  }
  std::vector<std::int64_t> counts(edges.size());
  std::int64_t total = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    counts[i] = p[i] * (lq / q[i]) / gp;
    total += counts[i];
    if (total > 200000)
      throw input_error("equilateralize: subdivision would exceed 200000 edges");
  }

  // The walk layer requires a loop-free skeleton: a self-loop mapping to a
  // single equilateral edge forces one global halving of the common length.
  bool halve = false;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].u == edges[i].v && counts[i] == 1) halve = true;
  if (halve) {
    total = 0;
    for (auto& k : counts) {
      k *= 2;
      total += k;
    }
  }

  // Snap so the total length is preserved exactly.
  const double ell = g.total_length() / static_cast<double>(total);

  MetricGraph out;
  for (int v = 0; v < g.vertex_count(); ++v) out.ids_.push_back(g.vertex_id(v));
  EquilateralGraph result;
  result.chains.resize(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::int64_t k = counts[i];
    int prev = edges[i].u;
    for (std::int64_t j = 1; j < k; ++j) {
      int dummy = static_cast<int>(out.ids_.size());
      out.ids_.push_back("_sub:" + std::to_string(i) + ":" + std::to_string(j));
      result.chains[i].push_back(static_cast<int>(out.edges_.size()));
      out.edges_.push_back({prev, dummy, ell});
      prev = dummy;
    }
    result.chains[i].push_back(static_cast<int>(out.edges_.size()));
    out.edges_.push_back({prev, edges[i].v, ell});
  }
  out.dirichlet_ = g.dirichlet();
  out.finalize(/*allow_reserved_ids=*/true);

  result.graph = std::move(out);
  result.edge_length = ell;
  return result;
}

MetricGraph parse_graph(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw input_error("graph file parse error at line " + std::to_string(line) +
                      ": " + e.what());
  }
  if (!j.is_object())
    throw input_error("graph file: top level must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "vertices" && key != "edges" && key != "dirichlet")
      throw input_error("graph file: unknown key '" + key + "'");
  if (!j.contains("vertices") || !j["vertices"].is_array())
    throw input_error("graph file: missing \"vertices\" array");
  if (!j.contains("edges") || !j["edges"].is_array())
    throw input_error("graph file: missing \"edges\" array");
  if (!j.contains("dirichlet") || !j["dirichlet"].is_array())
    throw input_error("graph file: missing \"dirichlet\" array");

  std::vector<std::string> ids;
  for (const auto& v : j["vertices"]) {
    if (!v.is_string())
      throw input_error("graph file: vertex ids must be strings");
    ids.push_back(v.get<std::string>());
  }
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(ids.size()); ++i) index.emplace(ids[i], i);

  std::vector<Edge> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_string() ||
        !e[1].is_string() || !e[2].is_number())
      throw input_error(
          "graph file: each edge must be [vertex, vertex, length]");
    auto iu = index.find(e[0].get<std::string>());
    auto iv = index.find(e[1].get<std::string>());
    if (iu == index.end() || iv == index.end())
      throw input_error("graph file: edge endpoint '" +
                        (iu == index.end() ? e[0] : e[1]).get<std::string>() +
                        "' is not a listed vertex");
    edges.push_back({iu->second, iv->second, e[2].get<double>()});
  }

  std::vector<std::string> dirichlet;
  for (const auto& d : j["dirichlet"]) {
    if (!d.is_string())
      throw input_error("graph file: dirichlet ids must be strings");
    dirichlet.push_back(d.get<std::string>());
  }
  return MetricGraph::make(std::move(ids), std::move(edges),
                           std::move(dirichlet));
}

std::string write_graph(const MetricGraph& g) {
  std::ostringstream os;
  os << "{\"vertices\":[";
  for (int v = 0; v < g.vertex_count(); ++v)
    os << (v ? "," : "") << '"' << g.vertex_id(v) << '"';
  os << "],\"edges\":[";
  for (int i = 0; i < g.edge_count(); ++i) {
    const Edge& e = g.edges()[i];
    os << (i ? "," : "") << "[\"" << g.vertex_id(e.u) << "\",\""
       << g.vertex_id(e.v) << "\"," << format_double(e.length) << ']';
  }
  os << "],\"dirichlet\":[";
  for (std::size_t i = 0; i < g.dirichlet().size(); ++i)
    os << (i ? "," : "") << '"' << g.vertex_id(g.dirichlet()[i]) << '"';
  os << "]}";
  return os.str();
}

}  // namespace heatlab
