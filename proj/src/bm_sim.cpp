#include "heatlab/bm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

namespace heatlab {

namespace {

// Counter-based stream: every trajectory owns an independent sequence keyed
// by (seed, index), so parallel reductions are order-free by construction.
struct TrajectoryRng {
  std::uint64_t state;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  TrajectoryRng(std::uint64_t seed, std::uint64_t trajectory) {
    state = mix(seed + 0x9e3779b97f4a7c15ull) ^
            mix(trajectory + 0xbf58476d1ce4e5b9ull);
  }

  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ull;
    return mix(state);
  }

  double next_unit() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  int next_below(int n) { return static_cast<int>(next_u64() % n); }

  bool cached = false;
  double cache = 0.0;

  double next_gaussian() {  // Marsaglia polar
    if (cached) {
      cached = false;
      return cache;
    }
    double u, v, s;
    do {
      u = 2.0 * next_unit() - 1.0;
      v = 2.0 * next_unit() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cache = v * m;
    cached = true;
    return u * m;
  }
};

// (edge, end) pairs per vertex; a self-loop contributes one entry per end,
// so each list's length is the metric degree.
std::vector<std::vector<std::pair<int, int>>> incidence(const MetricGraph& g) {
  std::vector<std::vector<std::pair<int, int>>> inc(g.vertex_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    inc[g.edges()[e].u].push_back({e, 0});
    inc[g.edges()[e].v].push_back({e, 1});
  }
  return inc;
}

void validate(const MetricGraph& g, const SimulationConfig& cfg) {
  const double cap = g.min_edge_length() * g.min_edge_length() / 100.0;
  if (!(cfg.time_step > 0.0) || cfg.time_step > cap * (1.0 + 1e-12))
    throw input_error(
        "simulation time_step must lie in (0, (min edge length)^2/100] = (0, " +
        format_double(cap) + "]");
  if (!(cfg.horizon > 0.0))
    throw input_error("simulation horizon must be positive");
  if (cfg.samples < 1) throw input_error("simulation needs samples >= 1");
}

constexpr int kBlocks = 8;  // fixed block count keeps reductions deterministic

// Runs body(block, first, last) over kBlocks contiguous trajectory ranges.
template <typename F>
void parallel_blocks(long samples, F body) {
  std::vector<std::future<void>> futures;
  for (int b = 0; b < kBlocks; ++b) {
    const long first = samples * b / kBlocks;
    const long last = samples * (b + 1) / kBlocks;
    if (first == last) continue;
    futures.push_back(std::async(std::launch::async, body, b, first, last));
  }
  for (auto& f : futures) f.get();
}

struct EdgeStart {
  int edge;
  double position;
};

// Uniform on the graph: edge by length, position uniform along it.
EdgeStart uniform_start(const MetricGraph& g, TrajectoryRng& rng) {
  const double r = rng.next_unit() * g.total_length();
  double acc = 0.0;
  for (int e = 0; e + 1 < g.edge_count(); ++e) {
    const double len = g.edges()[e].length;
    if (r < acc + len) return {e, r - acc};
    acc += len;
  }
  const int e = g.edge_count() - 1;
  return {e, std::min(r - acc, g.edges()[e].length)};
}

// Time for a walk at `position` on `edge` to first reach a vertex other
// than `home` (home < 0: any vertex ends the walk). No vertex absorbs
// here; the traversal-time law is what is measured. Within-step arrivals
// at a terminating endpoint are recovered by the Brownian-bridge crossing
// probability; an undetected touch of `home` only re-randomizes the edge,
// which cannot change the arrival time on an equilateral graph.
struct Arrival {
  double time;
  int vertex;
};

Arrival walk_to_vertex(const MetricGraph& g,
                       const std::vector<std::vector<std::pair<int, int>>>& inc,
                       TrajectoryRng& rng, int edge, double x, int home,
                       double var, double dt, double horizon) {
  const double sd = std::sqrt(var);
  for (long step = 0; step * dt < horizon; ++step) {
    const double t = step * dt;
    double len = g.edges()[edge].length;
    const double x2 = x + sd * rng.next_gaussian();
    if (x2 > 0.0 && x2 < len) {
      const Edge& ed = g.edges()[edge];
      if (ed.u != home && 2.0 * x * x2 < 20.0 * var &&
          rng.next_unit() < std::exp(-2.0 * x * x2 / var))
        return {t + dt / 2.0, ed.u};
      const double du = len - x, du2 = len - x2;
      if (ed.v != home && 2.0 * du * du2 < 20.0 * var &&
          rng.next_unit() < std::exp(-2.0 * du * du2 / var))
        return {t + dt / 2.0, ed.v};
      x = x2;
      continue;
    }
    // Crossing chain: the residual displacement continues through vertices,
    // re-rolled uniformly among incident edge ends at each one. Arrival
    // time interpolates by the fraction of path length consumed.
    double remaining = std::abs(x2 - x);
    const double total = remaining;
    bool down = x2 <= 0.0;
    while (true) {
      const double to_boundary = down ? x : len - x;
      if (remaining < to_boundary) {
        x = down ? x - remaining : x + remaining;
        break;
      }
      remaining -= to_boundary;
      const Edge& ed = g.edges()[edge];
      const int vertex = down ? ed.u : ed.v;
      if (vertex != home)
        return {t + dt * (total > 0.0 ? (total - remaining) / total : 0.5),
                vertex};
      const auto& choice =
          inc[vertex][rng.next_below(static_cast<int>(inc[vertex].size()))];
      edge = choice.first;
      len = g.edges()[edge].length;
      down = choice.second == 1;  // entered at the v end: coordinate falls
      x = down ? len : 0.0;
    }
  }
  return {horizon, -1};
}

}  // namespace

SurvivalEstimate simulate_survival(const MetricGraph& g,
                                   const SimulationConfig& cfg,
                                   std::vector<double> t_grid) {
  validate(g, cfg);
  if (t_grid.empty()) throw input_error("simulate_survival: empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0))
      throw input_error("simulate_survival: grid times must be nonnegative");
    if (i > 0 && t_grid[i] <= t_grid[i - 1])
      throw input_error(
          "simulate_survival: time grid must be strictly increasing");
  }
  if (t_grid.back() > cfg.horizon * (1.0 + 1e-12))
    throw input_error("simulate_survival: grid exceeds the horizon");

  const auto inc = incidence(g);
  const double dt = cfg.time_step;
  const double var = scale_factor(cfg.generator_scale) * 2.0 * dt;
  const double sd = std::sqrt(var);
  const long max_steps = static_cast<long>(std::ceil(t_grid.back() / dt - 1e-12));

  std::vector<std::vector<long>> alive(kBlocks,
                                       std::vector<long>(t_grid.size(), 0));
  parallel_blocks(cfg.samples, [&](int block, long first, long last) {
    for (long i = first; i < last; ++i) {
      TrajectoryRng rng(cfg.seed, static_cast<std::uint64_t>(i));
      EdgeStart at = uniform_start(g, rng);
      int edge = at.edge;
      double x = at.position;
      double absorbed_at = -1.0;  // < 0: survived past the grid
      for (long step = 0; step < max_steps && absorbed_at < 0.0; ++step) {
        const double t = step * dt;
        double len = g.edges()[edge].length;
        const double x2 = x + sd * rng.next_gaussian();
        if (x2 > 0.0 && x2 < len) {
          // Interior move: within-step hits of a Dirichlet endpoint are
          // recovered by the bridge crossing probability. The kill time is
          // spread uniformly over the step so the expected survival curve
          // is piecewise linear rather than a midpoint staircase.
          const Edge& ed = g.edges()[edge];
          if (g.is_dirichlet(ed.u) && 2.0 * x * x2 < 20.0 * var &&
              rng.next_unit() < std::exp(-2.0 * x * x2 / var)) {
            absorbed_at = t + dt * rng.next_unit();
            break;
          }
          const double du = len - x, du2 = len - x2;
          if (g.is_dirichlet(ed.v) && 2.0 * du * du2 < 20.0 * var &&
              rng.next_unit() < std::exp(-2.0 * du * du2 / var)) {
            absorbed_at = t + dt * rng.next_unit();
            break;
          }
          // A bridge touch of a Kirchhoff vertex re-rolls the edge label
          // uniformly over its incident ends at the same distance. Without
          // the re-roll every interior vertex acts as a weak barrier and
          // survival drifts high by O(sqrt(dt)).
          if (!g.is_dirichlet(ed.u) && 2.0 * x * x2 < 20.0 * var &&
              rng.next_unit() < std::exp(-2.0 * x * x2 / var)) {
            const auto& choice = inc[ed.u][rng.next_below(
                static_cast<int>(inc[ed.u].size()))];
            const double nlen = g.edges()[choice.first].length;
            if (x2 < nlen) {
              edge = choice.first;
              x = choice.second == 0 ? x2 : nlen - x2;
              continue;
            }
          } else if (!g.is_dirichlet(ed.v) && 2.0 * du * du2 < 20.0 * var &&
                     rng.next_unit() < std::exp(-2.0 * du * du2 / var)) {
            const auto& choice = inc[ed.v][rng.next_below(
                static_cast<int>(inc[ed.v].size()))];
            const double nlen = g.edges()[choice.first].length;
            if (du2 < nlen) {
              edge = choice.first;
              x = choice.second == 1 ? nlen - du2 : du2;
              continue;
            }
          }
          x = x2;
          continue;
        }
        double remaining = std::abs(x2 - x);
        const double total = remaining;
        bool down = x2 <= 0.0;
        while (absorbed_at < 0.0) {
          const double to_boundary = down ? x : len - x;
          if (remaining < to_boundary) {
            x = down ? x - remaining : x + remaining;
            break;
          }
          remaining -= to_boundary;
          const Edge& ed = g.edges()[edge];
          const int vertex = down ? ed.u : ed.v;
          if (g.is_dirichlet(vertex)) {
            absorbed_at =
                t + dt * (total > 0.0 ? (total - remaining) / total : 0.5);
            break;
          }
          const auto& choice = inc[vertex][rng.next_below(
              static_cast<int>(inc[vertex].size()))];
          edge = choice.first;
          len = g.edges()[edge].length;
          down = choice.second == 1;
          x = down ? len : 0.0;
        }
      }
      for (std::size_t j = 0; j < t_grid.size(); ++j)
        if (absorbed_at < 0.0 || absorbed_at >= t_grid[j])
          alive[block][j] += 1;
    }
  });

  SurvivalEstimate est;
  est.config = cfg;
  est.survival.resize(t_grid.size());
  est.std_error.resize(t_grid.size());
  const double total = g.total_length();
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    long count = 0;
    for (int b = 0; b < kBlocks; ++b) count += alive[b][j];
    const double p = static_cast<double>(count) / cfg.samples;
    est.survival[j] = total * p;
    est.std_error[j] = total * std::sqrt(p * (1.0 - p) / cfg.samples);
  }
  est.t_grid = std::move(t_grid);
  return est;
}

IncrementStudy empirical_increments(const EquilateralGraph& g,
                                    const SimulationConfig& cfg,
                                    int n_increments, long samples) {
  validate(g.graph, cfg);
  if (n_increments < 1)
    throw input_error("empirical_increments: need n_increments >= 1");
  if (samples < 100)
    throw input_error("empirical_increments: need at least 100 samples");

  const auto inc = incidence(g.graph);
  const double dt = cfg.time_step;
  const double var = scale_factor(cfg.generator_scale) * 2.0 * dt;
  // Arrival times have finite mean, so uncapped walks terminate; the config
  // horizon only bounds survival grids.
  const double cap = std::numeric_limits<double>::infinity();

  IncrementStudy study;
  study.config = cfg;
  study.eta0.assign(samples, 0.0);
  study.increments.assign(n_increments, std::vector<double>(samples, 0.0));

  parallel_blocks(samples, [&](int, long first, long last) {
    for (long i = first; i < last; ++i) {
      TrajectoryRng rng(cfg.seed, static_cast<std::uint64_t>(i));
      // One walk per trajectory: a uniform start on edge 0 runs to its
      // first vertex, then each increment is the onward traversal to the
      // next distinct vertex.
      const double x0 = rng.next_unit() * g.edge_length;
      Arrival r = walk_to_vertex(g.graph, inc, rng, 0, x0, -1, var, dt, cap);
      study.eta0[i] = r.time;
      int at = r.vertex;
      for (int k = 0; k < n_increments; ++k) {
        const auto& choice =
            inc[at][rng.next_below(static_cast<int>(inc[at].size()))];
        const int edge = choice.first;
        const double pos =
            choice.second == 1 ? g.graph.edges()[edge].length : 0.0;
        r = walk_to_vertex(g.graph, inc, rng, edge, pos, at, var, dt, cap);
        study.increments[k][i] = r.time;
        at = r.vertex;
      }
    }
  });

  if (n_increments >= 2) {
    const std::size_t pairs =
        std::min<std::size_t>(1024, static_cast<std::size_t>(samples));
    std::vector<double> a(study.increments[0].begin(),
                          study.increments[0].begin() + pairs);
    std::vector<double> b(study.increments[1].begin(),
                          study.increments[1].begin() + pairs);
    study.distance_correlation = distance_correlation(a, b);
  }
  return study;
}

VertexMassEstimate first_vertex_distribution(const EquilateralGraph& g,
                                             const SimulationConfig& cfg,
                                             long samples) {
  SimulationConfig local = cfg;
  local.samples = samples;
  validate(g.graph, local);

  const auto inc = incidence(g.graph);
  const double dt = cfg.time_step;
  const double var = scale_factor(cfg.generator_scale) * 2.0 * dt;
  const double cap = std::numeric_limits<double>::infinity();
  const int nv = g.graph.vertex_count();

  std::vector<std::vector<long>> hits(kBlocks, std::vector<long>(nv, 0));
  parallel_blocks(samples, [&](int block, long first, long last) {
    for (long i = first; i < last; ++i) {
      TrajectoryRng rng(cfg.seed, static_cast<std::uint64_t>(i));
      EdgeStart at = uniform_start(g.graph, rng);
      Arrival r = walk_to_vertex(g.graph, inc, rng, at.edge, at.position, -1,
                                 var, dt, cap);
      hits[block][r.vertex] += 1;
    }
  });

  VertexMassEstimate est;
  est.config = local;
  est.mass.resize(nv);
  est.std_error.resize(nv);
  const double total = g.graph.total_length();
  for (int v = 0; v < nv; ++v) {
    long count = 0;
    for (int b = 0; b < kBlocks; ++b) count += hits[b][v];
    const double p = static_cast<double>(count) / samples;
    est.mass[v] = total * p;
    est.std_error[v] = total * std::sqrt(p * (1.0 - p) / samples);
  }
  return est;
}

double ks_one_sample(std::vector<double> samples,
                     const std::function<double(double)>& cdf) {
  if (samples.empty()) throw input_error("ks_one_sample: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    worst = std::max(worst, std::abs(f - static_cast<double>(i) / n));
    worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return worst;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw input_error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // Ties are real here (bridge arrivals share midpoint times), so both
  // empirical CDFs must step past a shared value before they are compared.
  double worst = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / a.size() -
                                     static_cast<double>(j) / b.size()));
  }
  return worst;
}

double ks_two_sample_threshold(std::size_t n, std::size_t m) {
  // c(alpha) = 1.628 at alpha = 0.01 in the large-sample approximation.
  return 1.628 * std::sqrt(static_cast<double>(n + m) /
                           (static_cast<double>(n) * static_cast<double>(m)));
}

double distance_correlation(const std::vector<double>& x,
                            const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw input_error("distance_correlation: need two equal-size samples");
  const std::size_t n = x.size();
  std::vector<double> ax(n, 0.0), ay(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      ax[i] += std::abs(x[i] - x[j]);
      ay[i] += std::abs(y[i] - y[j]);
    }
    ax[i] /= n;
    ay[i] /= n;
  }
  const double gx = std::accumulate(ax.begin(), ax.end(), 0.0) / n;
  const double gy = std::accumulate(ay.begin(), ay.end(), 0.0) / n;
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double da = std::abs(x[i] - x[j]) - ax[i] - ax[j] + gx;
      const double db = std::abs(y[i] - y[j]) - ay[i] - ay[j] + gy;
      cov += da * db;
      vx += da * da;
      vy += db * db;
    }
  }
  if (vx <= 0.0 || vy <= 0.0) return 0.0;
  return std::sqrt(std::max(0.0, cov) / std::sqrt(vx * vy));
}

}  // namespace heatlab
