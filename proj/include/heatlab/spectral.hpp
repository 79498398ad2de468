#pragma once

#include <vector>

#include <Eigen/Dense>

#include "heatlab/common.hpp"
#include "heatlab/metric_graph.hpp"

namespace heatlab {

/// Piecewise-linear finite elements on every edge, with one shared unknown
/// per non-Dirichlet vertex (continuity) and Dirichlet unknowns eliminated.
/// Each edge carries max(2, ceil(length/h)) equal elements, so self-loops
/// always have interior nodes. Consistent mass matrix throughout.
struct Discretization {
  double target_h = 0.0;
  int unknowns = 0;
  int elements = 0;
  double total_mass = 0.0;    ///< sum of all hat integrals; equals |Gamma|
  double total_length = 0.0;
  Eigen::MatrixXd stiffness;  ///< symmetric positive definite (Dirichlet set non-empty)
  Eigen::MatrixXd mass;       ///< symmetric positive definite
  Eigen::VectorXd load;       ///< integral of each free hat function
};

/// Dense assembly; sized for desk-scale graphs (at most 5000 unknowns).
Discretization assemble(const MetricGraph& g, double h);

/// min edge length / 50.
double default_mesh_size(const MetricGraph& g);

/// Eigenpairs of the Dirichlet form, ascending, with overlaps o_k = <phi_k, 1>.
/// eigenvalue_error is zero for a raw single-mesh solve and carries the
/// extrapolation residual estimate when produced by compute_spectral.
/// overlap_error bounds |o_k| against the mesh pair; the per-index estimate
/// is tight only for simple eigenvalues (a clustered pair may rotate between
/// meshes, which inflates the estimate and keeps it conservative).
struct SpectralData {
  std::vector<double> eigenvalues;
  std::vector<double> overlaps;
  std::vector<double> eigenvalue_error;
  std::vector<double> overlap_error;
  double mesh_size = 0.0;
  double total_length = 0.0;
  int count() const { return static_cast<int>(eigenvalues.size()); }
};

/// Lowest `count` generalized eigenpairs, mass-orthonormalized.
SpectralData eigensolve(const Discretization& d, int count);

/// min(200, unknowns).
int default_mode_count(const Discretization& d);

/// Production pipeline: solve at h and h/2, Richardson-extrapolate each
/// eigenvalue (second-order elements), keep the fine-mesh overlaps, and
/// record |lambda(h/2) - lambda(h)|/3 as the per-mode error estimate.
/// count <= 0 selects min(200, unknowns at mesh h).
SpectralData compute_spectral(const MetricGraph& g, double h, int count = 0);

/// Q_t = sum_k exp(-t lambda_k) o_k^2. The bound combines the truncation
/// deficit exp(-t lambda_K)(|Gamma| - sum o_k^2) with the propagated
/// eigenvalue error sum_k t exp(-t lambda_k) o_k^2 err_k.
ValueWithBound mercer_heat_content(const SpectralData& s, double t);

struct HeatContentCurve {
  std::vector<double> t_grid;
  std::vector<double> values;
  std::vector<double> error;
};

/// Crank-Nicolson march of the mass/stiffness system from the L2 projection
/// of the all-ones function, sampled on t_grid by linear interpolation
/// between steps. Runs at (h, dt), (h, dt/2), (h/2, dt/2): the finest pair
/// is reported and the successive differences form the per-point error bar.
/// A grid entry t = 0 is exact: |Gamma| with zero error. lumped_mass swaps
/// in the row-sum diagonal mass matrix (diagnostic only; lower accuracy).
HeatContentCurve cn_heat_content(const MetricGraph& g, double h, double dt,
                                 std::vector<double> t_grid,
                                 bool lumped_mass = false);

/// Torsional rigidity: solve stiffness u = load, return load . u. Equals
/// sum_k o_k^2 / lambda_k of the matched discretization exactly.
double torsional_rigidity(const MetricGraph& g, double h);

}  // namespace heatlab
