#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "heatlab/common.hpp"
#include "heatlab/metric_graph.hpp"

namespace heatlab {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

/// Symmetric random walk on the combinatorial skeleton: from v, probability
/// 1/deg(v) per incident edge end, parallel edges contributing multiplicity.
/// The absorbing vertex keeps a unit row on itself.
template <typename S>
struct WalkChain {
  int n = 0;
  int absorbing = -1;
  std::vector<std::vector<std::pair<int, S>>> rows;
  // The walk row the absorbing vertex would have if it were not absorbed;
  // return-time laws start with one step along it.
  std::vector<std::pair<int, S>> free_row;
  std::vector<int> degree;

  /// Row-vector product p -> p W.
  std::vector<S> step(const std::vector<S>& p) const {
    std::vector<S> out(n, S(0));
    for (int u = 0; u < n; ++u) {
      if (p[u] == S(0)) continue;
      for (const auto& [v, w] : rows[u]) out[v] += p[u] * w;
    }
    return out;
  }
};

template <typename S>
WalkChain<S> build_chain(const MetricGraph& skeleton) {
  if (skeleton.dirichlet().size() != 1)
    throw input_error(
        "build_chain: exactly one absorbing vertex required (merge the "
        "Dirichlet set first)");
  WalkChain<S> chain;
  chain.n = skeleton.vertex_count();
  chain.absorbing = skeleton.dirichlet().front();
  chain.degree.resize(chain.n);
  for (int v = 0; v < chain.n; ++v) chain.degree[v] = skeleton.degree(v);

  // Merged multiplicities: one (target, mult/deg) entry per distinct neighbor.
  std::vector<std::vector<int>> mult(chain.n, std::vector<int>());
  std::vector<std::vector<int>> nbr(chain.n);
  auto add = [&](int u, int v) {
    for (std::size_t i = 0; i < nbr[u].size(); ++i)
      if (nbr[u][i] == v) {
        mult[u][i] += 1;
        return;
      }
    nbr[u].push_back(v);
    mult[u].push_back(1);
  };
  for (const Edge& e : skeleton.edges()) {
    add(e.u, e.v);
    add(e.v, e.u);
  }
  chain.rows.resize(chain.n);
  for (int u = 0; u < chain.n; ++u) {
    std::vector<std::pair<int, S>> row;
    for (std::size_t i = 0; i < nbr[u].size(); ++i)
      row.push_back({nbr[u][i], S(mult[u][i]) / S(chain.degree[u])});
    if (u == chain.absorbing) {
      chain.free_row = std::move(row);
      chain.rows[u] = {{u, S(1)}};
    } else {
      chain.rows[u] = std::move(row);
    }
  }
  return chain;
}

template <typename S>
WalkChain<S> build_chain(const EquilateralGraph& g) {
  return build_chain<S>(g.graph);
}

/// Truncated law of the first hitting time tau = min{k >= 1 : X_k = target}.
/// alive[k] = P[tau > k] is exact (a partial sum of the pmf subtracted from
/// 1 telescopes away); tail_sum_bound certifies sum_{j > n_max} P[tau > j]
/// through a contraction block of the killed chain.
template <typename S>
struct HittingDistribution {
  int start = -1;
  int target = -1;
  int n_max = 0;
  std::vector<S> pmf;    // pmf[k] = P[tau = k], k = 1..n_max; pmf[0] = 0
  std::vector<S> alive;  // alive[k] = P[tau > k], k = 0..n_max
  S tail_mass = S(0);    // P[tau > n_max], exact
  int tail_block = 0;    // m with ||Q^m||_inf <= 1/2
  S tail_rho = S(0);
  S tail_sum_bound = S(0);
  bool truncation_warning = false;
};

namespace detail {

/// Smallest m with ||Q^m||_inf <= 1/2 for the chain killed at target,
/// together with that norm. Q^m 1 is built by m successive killed steps.
template <typename S>
std::pair<int, S> contraction_block(const WalkChain<S>& chain, int target) {
  std::vector<S> u(chain.n, S(1));
  u[target] = S(0);
  const S half = S(1) / S(2);
  for (int m = 1; m <= 16384; ++m) {
    std::vector<S> nu(chain.n, S(0));
    for (int v = 0; v < chain.n; ++v) {
      if (v == target) continue;
      for (const auto& [w, p] : chain.rows[v]) nu[v] += p * u[w];
    }
    u = std::move(nu);
    S rho = S(0);
    for (int v = 0; v < chain.n; ++v)
      if (v != target) rho = std::max(rho, u[v]);
    if (rho <= half) return {m, rho};
  }
  throw tolerance_error(
      "hitting_distribution: killed chain did not contract within 16384 "
      "steps");
}

}  // namespace detail

template <typename S>
HittingDistribution<S> hitting_distribution(const WalkChain<S>& chain,
                                            int start, int n_max,
                                            double tail_tolerance = 1e-9) {
  if (n_max < 1) throw input_error("hitting_distribution: n_max must be >= 1");
  if (start < 0 || start >= chain.n)
    throw input_error("hitting_distribution: start vertex out of range");
  const int target = chain.absorbing;

  HittingDistribution<S> dist;
  dist.start = start;
  dist.target = target;
  dist.n_max = n_max;
  dist.pmf.assign(n_max + 1, S(0));
  dist.alive.assign(n_max + 1, S(0));
  dist.alive[0] = S(1);

  // First step uses the walk row of `start`, not the absorbing unit row.
  std::vector<S> p(chain.n, S(0));
  for (const auto& [v, w] :
       start == target ? chain.free_row : chain.rows[start])
    p[v] += w;

  for (int k = 1; k <= n_max; ++k) {
    dist.pmf[k] = p[target];
    p[target] = S(0);
    S sum = S(0);
    for (const S& x : p) sum += x;
    dist.alive[k] = sum;
    if (k < n_max) p = chain.step(p);
  }
  dist.tail_mass = dist.alive[n_max];

  auto [m, rho] = detail::contraction_block(chain, target);
  dist.tail_block = m;
  dist.tail_rho = rho;
  // alive[n_max + i] <= alive[n_max] * rho^floor(i/m); summed over i >= 1
  // this is at most alive[n_max] * (m - 1 + m rho/(1 - rho)).
  dist.tail_sum_bound =
      dist.tail_mass * (S(m - 1) + S(m) * rho / (S(1) - rho));
  dist.truncation_warning = to_double(dist.tail_mass) > tail_tolerance;
  return dist;
}

/// Closed interval certified to contain a value.
template <typename S>
struct Bracket {
  S low = S(0);
  S high = S(0);
};

/// E[tau] = sum_{j >= 0} P[tau > j], bracketed by the certified tail.
template <typename S>
Bracket<S> expected_return_time(const HittingDistribution<S>& dist) {
  S partial = S(0);
  for (int j = 0; j <= dist.n_max; ++j) partial += dist.alive[j];
  return {partial, partial + dist.tail_sum_bound};
}

/// E[(tau - n) 1{tau >= n+1}] = sum_{j >= n} P[tau > j].
template <typename S>
Bracket<S> truncated_tail_expectation(const HittingDistribution<S>& dist,
                                      int n) {
  if (n < 0) throw input_error("truncated_tail_expectation: n must be >= 0");
  if (n > dist.n_max) return {S(0), dist.tail_sum_bound};
  S partial = S(0);
  for (int j = n; j <= dist.n_max; ++j) partial += dist.alive[j];
  return {partial, partial + dist.tail_sum_bound};
}

/// Exact E_start[tau] through the fundamental system (I - Q) x = 1 on the
/// non-absorbed states, x_target = 0; for start == target this is the
/// return time 1 + sum_v P[start -> v] x_v. Gaussian elimination with
/// partial pivoting; exact when S is rational.
template <typename S>
S exact_expected_return_time(const WalkChain<S>& chain, int start) {
  const int target = chain.absorbing;
  const int n = chain.n;
  if (n - 1 > 2000)
    throw input_error("exact_expected_return_time: chain too large");

  std::vector<int> idx(n, -1);
  int nn = 0;
  for (int v = 0; v < n; ++v)
    if (v != target) idx[v] = nn++;

  std::vector<std::vector<S>> a(nn, std::vector<S>(nn + 1, S(0)));
  for (int v = 0; v < n; ++v) {
    if (v == target) continue;
    const int r = idx[v];
    a[r][r] += S(1);
    for (const auto& [w, p] : chain.rows[v])
      if (w != target) a[r][idx[w]] -= p;
    a[r][nn] = S(1);
  }
  for (int c = 0; c < nn; ++c) {
    int piv = -1;
    for (int r = c; r < nn; ++r)
      if (a[r][c] != S(0)) {
        if (piv < 0) piv = r;
        if constexpr (std::is_same_v<S, double>) {
          if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        }
      }
    if (piv < 0)
      throw tolerance_error("exact_expected_return_time: singular system");
    std::swap(a[c], a[piv]);
    for (int r = 0; r < nn; ++r) {
      if (r == c || a[r][c] == S(0)) continue;
      S f = a[r][c] / a[c][c];
      for (int k = c; k <= nn; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<S> x(n, S(0));
  for (int v = 0; v < n; ++v)
    if (v != target) x[v] = a[idx[v]][nn] / a[idx[v]][idx[v]];

  if (start != target) return x[start];
  S e = S(1);
  for (const auto& [v, w] : chain.free_row) e += w * x[v];
  return e;
}

/// Exhaustive enumeration of length-n walks from the absorbing vertex that
/// avoid it after step 0, each weighted by prod 1/deg of the visited
/// prefix. Equals P[tau >= n+1]; an independent oracle for the chain.
template <typename S>
S path_sum_oracle(const MetricGraph& skeleton, int n) {
  if (skeleton.dirichlet().size() != 1)
    throw input_error("path_sum_oracle: exactly one absorbing vertex required");
  if (n < 0) throw input_error("path_sum_oracle: n must be >= 0");
  if (n > 14) throw input_error("path_sum_oracle: enumeration budget exceeded");
  const int vd = skeleton.dirichlet().front();

  std::vector<std::vector<int>> nbr(skeleton.vertex_count());
  for (const Edge& e : skeleton.edges()) {
    nbr[e.u].push_back(e.v);
    nbr[e.v].push_back(e.u);
  }

  S total = S(0);
  // Iterative DFS over (vertex, depth, accumulated weight).
  struct Frame {
    int vertex;
    int depth;
    S weight;
  };
  std::vector<Frame> stack{{vd, 0, S(1)}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.depth == n) {
      total += f.weight;
      continue;
    }
    const S w = f.weight / S(skeleton.degree(f.vertex));
    for (int v : nbr[f.vertex]) {
      if (v == vd) continue;
      stack.push_back({v, f.depth + 1, w});
    }
  }
  return total;
}

template <typename S>
S path_sum_oracle(const EquilateralGraph& g, int n) {
  return path_sum_oracle<S>(g.graph, n);
}

}  // namespace heatlab
