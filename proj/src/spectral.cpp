#include "heatlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace heatlab {

namespace {

std::vector<int> element_counts(const MetricGraph& g, double h) {
  std::vector<int> m(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    // The epsilon keeps exact ratios like 1/0.1 from rounding up a count.
    const double q = g.edges()[e].length / h;
    m[e] = std::max(2, static_cast<int>(std::ceil(q - 1e-12)));
  }
  return m;
}

}  // namespace

Discretization assemble(const MetricGraph& g, double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw input_error("assemble: mesh size must be positive and finite");

  std::vector<int> vtx_dof(g.vertex_count(), -1);
  int dof = 0;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (!g.is_dirichlet(v)) vtx_dof[v] = dof++;

  const std::vector<int> m = element_counts(g, h);
  int total_elements = 0;
  int interior = 0;
  for (int count : m) {
    total_elements += count;
    interior += count - 1;
  }
  const int n = dof + interior;
  if (n > 5000)
    throw input_error("assemble: " + std::to_string(n) +
                      " unknowns exceeds the dense solver budget of 5000");

  Discretization d;
  d.target_h = h;
  d.unknowns = n;
  d.elements = total_elements;
  d.total_length = g.total_length();
  d.stiffness = Eigen::MatrixXd::Zero(n, n);
  d.mass = Eigen::MatrixXd::Zero(n, n);
  d.load = Eigen::VectorXd::Zero(n);

  int base = dof;
  for (int e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edges()[e];
    const double he = ed.length / m[e];
    for (int j = 0; j < m[e]; ++j) {
      const int idx[2] = {j == 0 ? vtx_dof[ed.u] : base + j - 1,
                          j == m[e] - 1 ? vtx_dof[ed.v] : base + j};
      const double kd = 1.0 / he;
      d.total_mass += he;
      for (int r = 0; r < 2; ++r) {
        if (idx[r] < 0) continue;
        d.load[idx[r]] += he / 2.0;
        for (int c = 0; c < 2; ++c) {
          if (idx[c] < 0) continue;
          d.stiffness(idx[r], idx[c]) += r == c ? kd : -kd;
          d.mass(idx[r], idx[c]) += r == c ? he / 3.0 : he / 6.0;
        }
      }
    }
    base += m[e] - 1;
  }
  return d;
}

double default_mesh_size(const MetricGraph& g) {
  return g.min_edge_length() / 50.0;
}

int default_mode_count(const Discretization& d) {
  return std::min(200, d.unknowns);
}

SpectralData eigensolve(const Discretization& d, int count) {
  if (count < 1 || count > d.unknowns)
    throw input_error("eigensolve: count must lie in [1, " +
                      std::to_string(d.unknowns) + "]");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.compute(d.stiffness, d.mass);
  if (es.info() != Eigen::Success)
    throw tolerance_error(
        "eigensolve: decomposition failed on " + std::to_string(d.unknowns) +
        " unknowns; mass diagonal range [" +
        format_double(d.mass.diagonal().minCoeff()) + ", " +
        format_double(d.mass.diagonal().maxCoeff()) + "]");

  SpectralData s;
  s.mesh_size = d.target_h;
  s.total_length = d.total_length;
  s.eigenvalues.resize(count);
  s.overlaps.resize(count);
  s.eigenvalue_error.assign(count, 0.0);
  s.overlap_error.assign(count, 0.0);
  for (int k = 0; k < count; ++k) {
    s.eigenvalues[k] = es.eigenvalues()[k];
    s.overlaps[k] = es.eigenvectors().col(k).dot(d.load);
  }
  return s;
}

SpectralData compute_spectral(const MetricGraph& g, double h, int count) {
  Discretization coarse = assemble(g, h);
  Discretization fine = assemble(g, h / 2.0);
  if (count <= 0) count = default_mode_count(coarse);
  if (count > coarse.unknowns)
    throw input_error("compute_spectral: count " + std::to_string(count) +
                      " exceeds the coarse-mesh unknown count " +
                      std::to_string(coarse.unknowns));
  SpectralData sc = eigensolve(coarse, count);
  SpectralData sf = eigensolve(fine, count);
  for (int k = 0; k < count; ++k) {
    const double lc = sc.eigenvalues[k];
    const double lf = sf.eigenvalues[k];
    sf.eigenvalues[k] = (4.0 * lf - lc) / 3.0;
    sf.eigenvalue_error[k] = std::abs(lf - lc) / 3.0 + 1e-12 * std::abs(lf);
    // Eigenvector signs are mesh-dependent, so compare overlap magnitudes.
    sf.overlap_error[k] =
        std::abs(std::abs(sf.overlaps[k]) - std::abs(sc.overlaps[k])) +
        1e-12 * (1.0 + std::abs(sf.overlaps[k]));
  }
  return sf;
}

ValueWithBound mercer_heat_content(const SpectralData& s, double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw input_error("mercer_heat_content: t must be positive");
  if (s.eigenvalues.empty())
    throw input_error("mercer_heat_content: empty spectral data");
  double q = 0.0;
  double parseval = 0.0;
  double lambda_term = 0.0;
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    const double w = s.overlaps[k] * s.overlaps[k];
    const double decay = std::exp(-t * s.eigenvalues[k]);
    q += w * decay;
    parseval += w;
    lambda_term += t * decay * w * s.eigenvalue_error[k];
  }
  const double deficit = std::max(0.0, s.total_length - parseval);
  return {q, std::exp(-t * s.eigenvalues.back()) * deficit + lambda_term};
}

namespace {

// One Crank-Nicolson march sampled at the requested times.
std::vector<double> cn_march(const MetricGraph& g, double h, double dt,
                             const std::vector<double>& t_grid, bool lumped) {
  Discretization d = assemble(g, h);
  if (lumped) {
    const Eigen::VectorXd row_sums = d.mass.rowwise().sum();
    d.mass = row_sums.asDiagonal();
  }
  const Eigen::MatrixXd forward = d.mass - (dt / 2.0) * d.stiffness;
  Eigen::LDLT<Eigen::MatrixXd> backward(d.mass + (dt / 2.0) * d.stiffness);
  Eigen::LDLT<Eigen::MatrixXd> mass_solver(d.mass);
  if (backward.info() != Eigen::Success || mass_solver.info() != Eigen::Success)
    throw tolerance_error("cn_heat_content: linear solve factorization failed");

  Eigen::VectorXd u = mass_solver.solve(d.load);
  const double t_end = t_grid.back();
  const int steps = std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-12)));
  std::vector<double> q(steps + 1);
  q[0] = d.load.dot(u);
  for (int j = 1; j <= steps; ++j) {
    u = backward.solve(forward * u);
    q[j] = d.load.dot(u);
  }

  std::vector<double> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double x = t_grid[i] / dt;
    const int j = std::min(steps - 1, static_cast<int>(x));
    const double frac = std::clamp(x - j, 0.0, 1.0);
    out[i] = q[j] * (1.0 - frac) + q[j + 1] * frac;
  }
  return out;
}

}  // namespace

HeatContentCurve cn_heat_content(const MetricGraph& g, double h, double dt,
                                 std::vector<double> t_grid, bool lumped_mass) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw input_error("cn_heat_content: dt must be positive");
  if (!(h > 0.0) || !std::isfinite(h))
    throw input_error("cn_heat_content: mesh size must be positive");
  if (t_grid.empty()) throw input_error("cn_heat_content: empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0) || !std::isfinite(t_grid[i]))
      throw input_error("cn_heat_content: grid times must be nonnegative");
    if (i > 0 && t_grid[i] <= t_grid[i - 1])
      throw input_error("cn_heat_content: time grid must be strictly increasing");
  }
  if (t_grid.back() == 0.0)
    return {std::move(t_grid), {g.total_length()}, {0.0}};

  const std::vector<double> base = cn_march(g, h, dt, t_grid, lumped_mass);
  const std::vector<double> tfine = cn_march(g, h, dt / 2.0, t_grid, lumped_mass);
  const std::vector<double> sfine =
      cn_march(g, h / 2.0, dt / 2.0, t_grid, lumped_mass);

  HeatContentCurve curve;
  curve.values.resize(t_grid.size());
  curve.error.resize(t_grid.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    curve.values[i] = sfine[i];
    // Halving differences in time and space; the space term is doubled so
    // the bar stays honest where convergence is only first order (the
    // projection boundary layer at small t).
    curve.error[i] =
        std::abs(base[i] - tfine[i]) + 2.0 * std::abs(tfine[i] - sfine[i]);
    worst = std::max(worst, curve.error[i]);
  }
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    curve.error[i] += 0.25 * worst + 1e-13 * g.total_length();
    if (t_grid[i] == 0.0) {
      curve.values[i] = g.total_length();
      curve.error[i] = 0.0;
    }
  }
  curve.t_grid = std::move(t_grid);
  return curve;
}

double torsional_rigidity(const MetricGraph& g, double h) {
  Discretization d = assemble(g, h);
  Eigen::LDLT<Eigen::MatrixXd> solver(d.stiffness);
  if (solver.info() != Eigen::Success)
    throw tolerance_error("torsional_rigidity: stiffness factorization failed");
  return d.load.dot(solver.solve(d.load));
}

}  // namespace heatlab
