#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "heatlab/common.hpp"

namespace heatlab {

/// Time normalization of the survival laws: HALF solves u_t = (1/2) u_xx,
/// FULL solves u_t = u_xx. FULL matches the heat semigroup the spectral
/// module discretizes; HALF tables equal FULL tables at doubled time.
enum class GeneratorScale { HALF, FULL };

/// Law of one edge-traversal increment: ONE_SIDED is the level-hitting law
/// erfc(l/sqrt(2 t sigma)); TWO_SIDED is the exit law of the reflected
/// motion from distance l. Cross-method adjudication selected TWO_SIDED.
enum class IncrementLaw { ONE_SIDED, TWO_SIDED };

struct Convention {
  GeneratorScale generator_scale = GeneratorScale::FULL;
  IncrementLaw increment_law = IncrementLaw::TWO_SIDED;
};

/// Multiplier s of u_xx in the generator: 1/2 for HALF, 1 for FULL.
double scale_factor(GeneratorScale scale);

/// "half-one", "half-two", "full-one", "full-two".
std::string convention_name(Convention conv);
Convention parse_convention(const std::string& name);

/// Edge-averaged survival of the first exit from (0, l):
/// sum_{n>=0} [8 l/((2n+1)^2 pi^2)] exp(-t s (2n+1)^2 pi^2 / l^2),
/// with a certified truncation bound. t <= 0 returns l exactly.
ValueWithBound alpha_zero(double t, double ell, Convention conv,
                          int n_terms = 100000);

/// CDF of one increment at time t; 0 for t <= 0.
double increment_cdf(double t, double ell, Convention conv);

/// alpha_n(t) = l P[X_0 + ... + X_n >= t] on an evaluation grid, with
/// per-entry error bounds from mesh halving plus series truncation.
struct AlphaTable {
  double common_length = 0.0;
  Convention convention;
  std::vector<double> t_grid;
  int n_max = 0;
  int grid_resolution = 0;  // convolution mesh intervals
  double window = 0.0;      // convolution mesh covers [0, window]
  std::vector<std::vector<double>> values;  // values[i][n], i over t_grid
  std::vector<std::vector<double>> error;   // same shape
  double density_mass_x0 = 0.0;        // discretized X_0 mass, should be ~1
  double density_mass_increment = 0.0; // discretized increment mass
  double flag_tolerance = 0.0;

  /// Mesh too coarse to meet flag_tolerance at this entry.
  bool flagged(std::size_t i, int n) const {
    return error[i][n] > flag_tolerance;
  }
  /// Index of a t that must already be a grid point.
  std::size_t grid_index(double t) const;
};

/// Geometric grid, 200 points per decade over [1e-3 l^2, 1e2 l^2].
std::vector<double> default_t_grid(double ell);

AlphaTable build_alpha_table(double ell, Convention conv,
                             std::vector<double> t_grid, int n_max,
                             int grid_resolution = 16384,
                             double flag_tolerance = 1e-3);

/// (l - alpha_{k+1}(t)) / (alpha_{k+1}(t) - alpha_k(t)) at a grid point;
/// throws tolerance_error when the gap is below its error bound.
double hierarchy_ratio(const AlphaTable& table, int k, double t);

}  // namespace heatlab
