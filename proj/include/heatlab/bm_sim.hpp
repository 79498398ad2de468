#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "heatlab/alpha.hpp"
#include "heatlab/common.hpp"
#include "heatlab/metric_graph.hpp"

namespace heatlab {

/// Monte Carlo discretization parameters. time_step must satisfy
/// time_step <= (min edge length)^2 / 100 for the graph it is used on;
/// the default production choice is (min edge length)^2 / 1000.
struct SimulationConfig {
  double time_step = 0.0;
  double horizon = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
  GeneratorScale generator_scale = GeneratorScale::FULL;
};

/// Empirical survival curve: survival[i] estimates the integral over the
/// graph of the probability that absorption happens after t_grid[i],
/// scaled by |Gamma|. Binomial standard errors.
struct SurvivalEstimate {
  std::vector<double> t_grid;
  std::vector<double> survival;
  std::vector<double> std_error;
  SimulationConfig config;
};

/// Trajectories start uniformly on the graph (edge proportional to length,
/// position uniform), step by Gaussian increments of variance
/// scale * time_step (1 for HALF, 2 for FULL), choose uniformly among
/// incident edge ends at every vertex arrival, and die at Dirichlet
/// vertices. Within-step absorption is recovered by a Brownian-bridge
/// crossing probability against Dirichlet endpoints, so the discretization
/// bias is first order in time_step. Trajectories are keyed by a
/// counter-based generator on (seed, index): results are bit-identical for
/// a fixed config regardless of thread scheduling.
SurvivalEstimate simulate_survival(const MetricGraph& g,
                                   const SimulationConfig& cfg,
                                   std::vector<double> t_grid);

/// Per-trajectory traversal times on an equilateral graph: eta0 holds the
/// first vertex-hitting time of a walk started uniformly on one edge, and
/// increments[k] holds the same walk's k-th onward traversal to the next
/// distinct vertex (Dirichlet vertices are passed through: the traversal
/// law, not survival, is being measured). distance_correlation estimates
/// the dependence between the first two increments (0 when
/// n_increments < 2).
struct IncrementStudy {
  std::vector<double> eta0;
  std::vector<std::vector<double>> increments;
  double distance_correlation = 0.0;
  SimulationConfig config;
};

IncrementStudy empirical_increments(const EquilateralGraph& g,
                                    const SimulationConfig& cfg,
                                    int n_increments, long samples);

/// Empirical mass of the first vertex hit from a uniform start, scaled by
/// |Gamma|; indexed like the graph's vertices. The masses sum to |Gamma|.
struct VertexMassEstimate {
  std::vector<double> mass;
  std::vector<double> std_error;
  SimulationConfig config;
};

VertexMassEstimate first_vertex_distribution(const EquilateralGraph& g,
                                             const SimulationConfig& cfg,
                                             long samples);

/// sup_t |empirical CDF - cdf(t)| over the sample points.
double ks_one_sample(std::vector<double> samples,
                     const std::function<double(double)>& cdf);

/// sup_t |empirical CDF difference| between two samples.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Two-sample Kolmogorov-Smirnov rejection threshold at level 0.01.
double ks_two_sample_threshold(std::size_t n, std::size_t m);

/// Distance correlation in [0, 1]; 0 characterizes independence in the
/// population limit. O(n^2) time, O(n) memory.
double distance_correlation(const std::vector<double>& x,
                            const std::vector<double>& y);

}  // namespace heatlab
