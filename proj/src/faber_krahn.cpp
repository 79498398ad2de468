#include "heatlab/faber_krahn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "heatlab/bm_sim.hpp"

namespace heatlab {

namespace {

/// Suffix sums e[n] = sum_{j=n..n_max} P[tau > j], accumulated smallest
/// term first. Together with the walk tail bound these bracket
/// E[(tau - n) 1{tau >= n+1}] in [e[n], e[n] + tail_sum_bound].
std::vector<double> alive_suffix_sums(const HittingDistribution<Rational>& d) {
  std::vector<double> e(d.n_max + 2, 0.0);
  for (int n = d.n_max; n >= 0; --n)
    e[n] = e[n + 1] + to_double(d.alive[n]);
  return e;
}

ValueWithBound rearranged_eval(const AlphaTable& table,
                               const HittingDistribution<Rational>& dist,
                               int degree, double t) {
  if (table.n_max < dist.n_max)
    throw input_error("probabilistic_heat_content: alpha table truncated "
                      "below the hitting law");
  const std::size_t i = table.grid_index(t);
  const double ell = table.common_length;
  const double tsb = to_double(dist.tail_sum_bound);
  const std::vector<double> e = alive_suffix_sums(dist);
  const int last = dist.n_max;

  double value = 0.0;
  double alpha_err = 0.0;
  double bracket = 0.0;
  double prev = 0.0;
  for (int n = 0; n <= last; ++n) {
    const double a = table.values[i][n];
    const double c = a - prev;  // alpha_0 itself at n = 0
    value += c * (e[n] + 0.5 * tsb);
    bracket += std::abs(c) * 0.5 * tsb;
    alpha_err += (table.error[i][n] + (n ? table.error[i][n - 1] : 0.0)) *
                 (e[n] + tsb);
    prev = a;
  }
  const double tail =
      std::max(0.0, ell - table.values[i][last] + table.error[i][last]) * tsb;
  const double half_deg = 0.5 * degree;
  return {half_deg * value, half_deg * (alpha_err + bracket + tail)};
}

ValueWithBound survival_eval(const AlphaTable& table,
                             const HittingDistribution<Rational>& dist,
                             int degree, double t) {
  if (table.n_max < dist.n_max)
    throw input_error("survival_series_heat_content: alpha table truncated "
                      "below the hitting law");
  const std::size_t i = table.grid_index(t);
  const double tsb = to_double(dist.tail_sum_bound);

  double value = 0.0;
  double alpha_err = 0.0;
  for (int n = dist.n_max; n >= 0; --n) {
    const double alive = to_double(dist.alive[n]);
    value += table.values[i][n] * alive;
    alpha_err += table.error[i][n] * alive;
  }
  const double tail = table.common_length * tsb;
  const double half_deg = 0.5 * degree;
  return {half_deg * value, half_deg * (alpha_err + tail)};
}

/// Comparison series (deg/2) sum_n (alpha_n - alpha_{n-1}) S_n with exact
/// inner sums; sound only when both laws share E[tau] (equal edge count
/// and absorbing degree), which callers must have checked.
ValueWithBound compare_eval(const AlphaTable& table,
                            const HittingDistribution<Rational>& da,
                            const HittingDistribution<Rational>& db,
                            int degree, double t) {
  const std::size_t i = table.grid_index(t);
  const int last = std::min({da.n_max, db.n_max, table.n_max});
  const std::vector<Rational> s = comparison_inner_sums(da, db, last);

  double value = 0.0;
  double alpha_err = 0.0;
  for (int n = 1; n <= last; ++n) {
    const double c = table.values[i][n] - table.values[i][n - 1];
    const double sn = to_double(s[n]);
    value += c * sn;
    alpha_err += (table.error[i][n] + table.error[i][n - 1]) * std::abs(sn);
  }
  const double coeff = std::max(
      0.0, table.common_length - table.values[i][last] + table.error[i][last]);
  const double tail =
      coeff * (to_double(truncated_tail_expectation(da, last + 1).high) +
               to_double(truncated_tail_expectation(db, last + 1).high));
  const double half_deg = 0.5 * degree;
  return {half_deg * value, half_deg * (alpha_err + tail)};
}

void check_context(const ProbContext& ctx, const char* who) {
  const std::string where(who);
  if (ctx.shape.graph.dirichlet().size() != 1)
    throw input_error(where + ": shape must have exactly one absorbing vertex");
  const int vd = ctx.shape.graph.dirichlet().front();
  if (ctx.dist.start != vd || ctx.dist.target != vd)
    throw input_error(where +
                      ": hitting law must start and end at the absorbing "
                      "vertex");
  if (std::abs(ctx.table.common_length - ctx.shape.edge_length) >
      1e-12 * ctx.shape.edge_length)
    throw input_error(where + ": alpha table edge length mismatch");
  if (ctx.table.n_max < ctx.dist.n_max)
    throw input_error(where + ": alpha table truncated below the hitting law");
}

double min_edge_length_sq(const MetricGraph& g) {
  double m = std::numeric_limits<double>::infinity();
  for (const Edge& e : g.edges()) m = std::min(m, e.length);
  return m * m;
}

void check_scan_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw input_error("scan grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0))
      throw input_error("scan grid times must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw input_error("scan grid must be strictly increasing");
  }
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::MERCER: return "mercer";
    case Method::PROBABILISTIC: return "probabilistic";
    case Method::MONTE_CARLO: return "monte-carlo";
    case Method::CN: return "cn";
  }
  throw input_error("method_name: unknown method");
}

Method parse_method(const std::string& name) {
  if (name == "mercer") return Method::MERCER;
  if (name == "probabilistic") return Method::PROBABILISTIC;
  if (name == "monte-carlo") return Method::MONTE_CARLO;
  if (name == "cn") return Method::CN;
  throw input_error("unknown method '" + name +
                    "' (expected mercer, probabilistic, monte-carlo, cn)");
}

std::string verdict_name(ScanVerdict v) {
  switch (v) {
    case ScanVerdict::POSITIVE: return "positive";
    case ScanVerdict::NEGATIVE: return "negative";
    case ScanVerdict::INCONCLUSIVE: return "inconclusive";
  }
  throw input_error("verdict_name: unknown verdict");
}

ProbContext make_prob_context(const MetricGraph& g, Convention conv,
                              std::vector<double> t_grid, int n_max) {
  EquilateralGraph eq = equilateralize(g.merge_dirichlet());
  const int vd = eq.graph.dirichlet().front();
  const WalkChain<Rational> chain = build_chain<Rational>(eq);

  HittingDistribution<Rational> dist;
  if (n_max > 0) {
    dist = hitting_distribution(chain, vd, n_max);
  } else {
    for (int n : {64, 128, 256, 512}) {
      dist = hitting_distribution(chain, vd, n);
      if (!dist.truncation_warning) break;
    }
  }

  if (t_grid.empty()) t_grid = default_t_grid(eq.edge_length);
  AlphaTable table =
      build_alpha_table(eq.edge_length, conv, std::move(t_grid), dist.n_max);

  ProbContext ctx{std::move(eq), chain.degree[vd], std::move(table),
                  std::move(dist)};

  // Truncation budget at the smallest grid time: the neglected rearranged
  // terms are below (l - alpha_N(t_min)) E[tau].
  const double ell = ctx.table.common_length;
  const double e_hi = to_double(expected_return_time(ctx.dist).high);
  const double gap = std::max(
      0.0, ell - ctx.table.values.front()[ctx.dist.n_max] +
               ctx.table.error.front()[ctx.dist.n_max]);
  if (gap * e_hi >= 1e-3 * ell)
    throw tolerance_error(
        "make_prob_context: truncation budget unmet at t_min: "
        "(l - alpha_N) E[tau] = " +
        format_double(gap * e_hi) + " with n_max = " +
        std::to_string(ctx.dist.n_max));
  return ctx;
}

ValueWithBound probabilistic_heat_content(const ProbContext& ctx, double t) {
  check_context(ctx, "probabilistic_heat_content");
  return rearranged_eval(ctx.table, ctx.dist, ctx.degree, t);
}

ValueWithBound survival_series_heat_content(const ProbContext& ctx, double t) {
  check_context(ctx, "survival_series_heat_content");
  return survival_eval(ctx.table, ctx.dist, ctx.degree, t);
}

std::vector<Rational> comparison_inner_sums(
    const HittingDistribution<Rational>& a,
    const HittingDistribution<Rational>& b, int n_max) {
  if (n_max < 0 || n_max > a.n_max || n_max > b.n_max)
    throw input_error(
        "comparison_inner_sums: n_max outside both truncations");
  std::vector<Rational> s(n_max + 1, Rational(0));
  Rational prefix(0), weighted(0);
  for (int n = 1; n <= n_max; ++n) {
    const Rational d = a.pmf[n] - b.pmf[n];
    prefix += d;
    weighted += Rational(n) * d;
    s[n] = Rational(n) * prefix - weighted;
  }
  return s;
}

ValueWithBound compare_graphs(const ProbContext& a, const ProbContext& b,
                              double t) {
  check_context(a, "compare_graphs");
  check_context(b, "compare_graphs");
  if (std::abs(a.shape.edge_length - b.shape.edge_length) >
      1e-12 * a.shape.edge_length)
    throw input_error("compare_graphs: edge lengths differ");
  if (a.shape.graph.edge_count() != b.shape.graph.edge_count())
    throw input_error("compare_graphs: edge counts differ");
  if (a.degree != b.degree)
    throw input_error("compare_graphs: absorbing degrees differ");
  if (a.table.convention.generator_scale !=
          b.table.convention.generator_scale ||
      a.table.convention.increment_law != b.table.convention.increment_law)
    throw input_error("compare_graphs: conventions differ");
  return compare_eval(a.table, a.dist, b.dist, a.degree, t);
}

SmallTimeCertificate small_time_certificate(const ProbContext& ctx) {
  check_context(ctx, "small_time_certificate");
  const MetricGraph& g = ctx.shape.graph;
  const int vd = g.dirichlet().front();
  if (ctx.degree != 1)
    throw input_error(
        "small_time_certificate: absorbing vertex has degree " +
        std::to_string(ctx.degree) +
        "; the comparison argument assumes a degree-1 Dirichlet vertex "
        "(split the graph there and certify each piece)");

  const std::vector<int> hops = bfs_distances(g, vd);
  int nearest = -1;
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (g.degree(v) < 3 || hops[v] < 0) continue;
    if (nearest < 0 || hops[v] < nearest) nearest = hops[v];
  }
  if (nearest < 0)
    throw input_error(
        "small_time_certificate: graph is a path (no vertex of degree >= 3); "
        "nothing to certify");

  SmallTimeCertificate cert;
  cert.k0 = 2 * nearest;
  cert.edge_count = g.edge_count();
  cert.edge_length = ctx.shape.edge_length;
  if (cert.k0 > ctx.dist.n_max)
    throw input_error("small_time_certificate: hitting law truncated below "
                      "k0 = " + std::to_string(cert.k0));

  const MetricGraph path =
      MetricGraph::path_graph(cert.edge_count * cert.edge_length,
                              cert.edge_count);
  const WalkChain<Rational> pchain = build_chain<Rational>(path);
  const HittingDistribution<Rational> pdist = hitting_distribution(
      pchain, path.dirichlet().front(), ctx.dist.n_max);

  cert.gap = pdist.pmf[cert.k0] - ctx.dist.pmf[cert.k0];
  if (!(cert.gap > 0))
    throw tolerance_error(
        "small_time_certificate: probability gap at k0 is not positive");

  const double threshold = to_double(cert.gap) / (2.0 * cert.edge_count);
  const std::vector<double>& grid = ctx.table.t_grid;
  std::ptrdiff_t it0 = -1;
  for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(grid.size()) - 1;
       i >= 0; --i) {
    double ratio;
    try {
      ratio = hierarchy_ratio(ctx.table, cert.k0, grid[i]);
    } catch (const tolerance_error&) {
      continue;  // gap unresolved at this time, not a satisfying point
    }
    if (threshold > ratio) {
      it0 = i;
      break;
    }
  }
  if (it0 < 0)
    throw tolerance_error(
        "small_time_certificate: the hierarchy inequality never resolves on "
        "this grid");
  cert.t0 = grid[it0];

  // Re-verify: the comparison series must be strictly positive, beyond its
  // bound, at sampled grid times below t0. Times where the difference is
  // smaller than the bound stay unverified (it decays exponentially); a
  // resolved negative contradicts the certificate.
  const std::ptrdiff_t stride = std::max<std::ptrdiff_t>(1, it0 / 8);
  for (std::ptrdiff_t j = it0; j >= 0; j -= stride) {
    const ValueWithBound dq =
        compare_eval(ctx.table, pdist, ctx.dist, 1, grid[j]);
    if (dq.value > dq.bound) {
      cert.verified_t.push_back(grid[j]);
    } else if (dq.value < -dq.bound) {
      throw tolerance_error(
          "small_time_certificate: heat-content difference resolves negative "
          "at t = " + format_double(grid[j]));
    }
  }
  if (cert.verified_t.empty())
    throw tolerance_error(
        "small_time_certificate: no grid time at or below t0 resolves the "
        "heat-content difference");
  std::reverse(cert.verified_t.begin(), cert.verified_t.end());
  return cert;
}

LargeTimeCertificate large_time_certificate(const SpectralData& s_path,
                                            const SpectralData& s_g,
                                            double total_length) {
  if (s_path.count() < 1 || s_g.count() < 1)
    throw input_error("large_time_certificate: empty spectral data");
  if (s_path.overlap_error.empty() || s_g.overlap_error.empty())
    throw input_error(
        "large_time_certificate: needs two-mesh spectral data with overlap "
        "errors (compute_spectral)");
  if (!(total_length > 0.0))
    throw input_error("large_time_certificate: total length must be positive");
  if (std::abs(s_path.total_length - total_length) > 1e-9 * total_length ||
      std::abs(s_g.total_length - total_length) > 1e-9 * total_length)
    throw input_error("large_time_certificate: total lengths differ");

  const double lam_path_hi = s_path.eigenvalues[0] + s_path.eigenvalue_error[0];
  const double lam_g_lo = s_g.eigenvalues[0] - s_g.eigenvalue_error[0];

  LargeTimeCertificate cert;
  cert.gap_low = lam_g_lo - lam_path_hi;
  if (!(cert.gap_low > 0.0))
    throw tolerance_error(
        "large_time_certificate: eigenvalue gap not resolvable at this mesh "
        "(gap bound " + format_double(cert.gap_low) + "); refine the mesh");

  const double o1_lo = std::abs(s_path.overlaps[0]) - s_path.overlap_error[0];
  if (!(o1_lo > 0.0))
    throw tolerance_error(
        "large_time_certificate: ground overlap not resolvable at this mesh");
  cert.overlap_sq_low = o1_lo * o1_lo;

  cert.threshold =
      std::max(0.0, std::log(total_length / cert.overlap_sq_low)) /
      cert.gap_low;

  // Beyond the threshold the gap forces positivity; check it numerically at
  // spread-out multiples, skipping only times where both series underflow.
  for (double f : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double t = f * cert.threshold;
    if (!(t > 0.0) || lam_path_hi * t > 600.0) continue;
    const ValueWithBound qp = mercer_heat_content(s_path, t);
    const ValueWithBound qg = mercer_heat_content(s_g, t);
    const double diff = qp.value - qg.value;
    if (diff > qp.bound + qg.bound) {
      cert.verified_t.push_back(t);
    } else if (f > 1.0) {
      // At the threshold itself the true margin is error-sized; beyond it
      // an unresolved difference means the spectra are inconsistent.
      throw tolerance_error(
          "large_time_certificate: Mercer difference unresolved at t = " +
          format_double(t));
    }
  }
  if (cert.verified_t.size() < 2)
    throw tolerance_error(
        "large_time_certificate: too few resolvable verification times");
  return cert;
}

MethodCurve method_curve(const MetricGraph& g, const std::string& graph_id,
                         Method method, const std::vector<double>& t_grid,
                         const ScanOptions& opt) {
  check_scan_grid(t_grid);
  MethodCurve mc;
  mc.method = method;
  mc.graph_id = graph_id;
  mc.curve.t_grid = t_grid;
  char buf[160];

  switch (method) {
    case Method::MERCER: {
      const double h = opt.mesh_size > 0.0 ? opt.mesh_size
                                           : default_mesh_size(g);
      const SpectralData s = compute_spectral(g, h);
      mc.curve.values.reserve(t_grid.size());
      mc.curve.error.reserve(t_grid.size());
      for (double t : t_grid) {
        const ValueWithBound q = mercer_heat_content(s, t);
        mc.curve.values.push_back(q.value);
        mc.curve.error.push_back(q.bound);
      }
      std::snprintf(buf, sizeof buf, "mesh h=%g, modes=%d", s.mesh_size,
                    s.count());
      mc.truncation = buf;
      break;
    }
    case Method::CN: {
      const double h = opt.mesh_size > 0.0 ? opt.mesh_size
                                           : default_mesh_size(g);
      const double dt = opt.cn_time_step > 0.0 ? opt.cn_time_step
                                               : t_grid.back() / 4096.0;
      mc.curve = cn_heat_content(g, h, dt, t_grid);
      std::snprintf(buf, sizeof buf, "mesh h=%g, dt=%g", h, dt);
      mc.truncation = buf;
      break;
    }
    case Method::PROBABILISTIC: {
      const ProbContext ctx =
          make_prob_context(g, opt.convention, t_grid, opt.n_max);
      mc.curve.values.reserve(t_grid.size());
      mc.curve.error.reserve(t_grid.size());
      for (double t : t_grid) {
        const ValueWithBound q = probabilistic_heat_content(ctx, t);
        mc.curve.values.push_back(q.value);
        mc.curve.error.push_back(q.bound);
      }
      mc.convention = convention_name(opt.convention);
      std::snprintf(buf, sizeof buf, "n_max=%d, conv mesh=%d",
                    ctx.dist.n_max, ctx.table.grid_resolution);
      mc.truncation = buf;
      break;
    }
    case Method::MONTE_CARLO: {
      SimulationConfig cfg;
      cfg.time_step = opt.mc_time_step > 0.0 ? opt.mc_time_step
                                             : min_edge_length_sq(g) / 400.0;
      cfg.horizon = t_grid.back();
      cfg.samples = opt.mc_samples;
      cfg.seed = opt.mc_seed;
      cfg.generator_scale = opt.convention.generator_scale;
      const SurvivalEstimate est = simulate_survival(g, cfg, t_grid);
      mc.curve.values = est.survival;
      mc.curve.error = est.std_error;  // one standard error, not a bound
      mc.convention = cfg.generator_scale == GeneratorScale::FULL
                          ? "full" : "half";
      std::snprintf(buf, sizeof buf, "dt=%g, samples=%ld, seed=%llu",
                    cfg.time_step, cfg.samples,
                    static_cast<unsigned long long>(cfg.seed));
      mc.truncation = buf;
      break;
    }
  }
  return mc;
}

CrossoverScan crossover_scan(const MetricGraph& g,
                             const std::string& graph_id,
                             const std::vector<double>& t_grid,
                             const std::vector<Method>& methods,
                             const ScanOptions& opt) {
  check_scan_grid(t_grid);
  if (methods.empty()) throw input_error("crossover_scan: no methods given");

  CrossoverScan scan;
  scan.graph_id = graph_id;
  scan.convention = opt.convention;
  scan.t_grid = t_grid;

  const double length = g.total_length();
  // The probabilistic route needs the reference path subdivided to the
  // shared edge length; the continuum routes see the same metric interval
  // either way.
  int prob_edges = 0;
  for (Method m : methods)
    if (m == Method::PROBABILISTIC)
      prob_edges = equilateralize(g.merge_dirichlet()).graph.edge_count();

  for (Method m : methods) {
    const MetricGraph ref = MetricGraph::path_graph(
        length, m == Method::PROBABILISTIC ? prob_edges : 1);
    ScanOptions local = opt;
    if (m == Method::MONTE_CARLO && local.mc_time_step <= 0.0)
      local.mc_time_step =
          std::min(min_edge_length_sq(g), min_edge_length_sq(ref)) / 400.0;
    const MethodCurve cg = method_curve(g, graph_id, m, t_grid, local);
    const MethodCurve cp = method_curve(ref, "path", m, t_grid, local);

    MethodDifference md;
    md.method = m;
    md.difference.resize(t_grid.size());
    md.uncertainty.resize(t_grid.size());
    const double widen = m == Method::MONTE_CARLO ? 3.0 : 1.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      md.difference[i] = cp.curve.values[i] - cg.curve.values[i];
      md.uncertainty[i] = widen * (cp.curve.error[i] + cg.curve.error[i]);
    }
    scan.methods.push_back(std::move(md));
  }

  scan.points.resize(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    std::size_t best_any = 0;
    std::ptrdiff_t best_res = -1;
    bool pos = false, neg = false;
    for (std::size_t m = 0; m < scan.methods.size(); ++m) {
      const MethodDifference& md = scan.methods[m];
      if (md.uncertainty[i] < scan.methods[best_any].uncertainty[i])
        best_any = m;
      if (std::abs(md.difference[i]) <= md.uncertainty[i]) continue;
      (md.difference[i] > 0.0 ? pos : neg) = true;
      if (best_res < 0 ||
          md.uncertainty[i] <
              scan.methods[static_cast<std::size_t>(best_res)].uncertainty[i])
        best_res = static_cast<std::ptrdiff_t>(m);
    }
    ScanPoint& p = scan.points[i];
    p.t = t_grid[i];
    const std::size_t pick =
        best_res >= 0 ? static_cast<std::size_t>(best_res) : best_any;
    p.difference = scan.methods[pick].difference[i];
    p.uncertainty = scan.methods[pick].uncertainty[i];
    p.decided_by = scan.methods[pick].method;
    if (best_res < 0 || (pos && neg))
      p.verdict = ScanVerdict::INCONCLUSIVE;  // unresolved or contradictory
    else
      p.verdict = pos ? ScanVerdict::POSITIVE : ScanVerdict::NEGATIVE;
  }
  return scan;
}

ConventionReport select_convention() {
  ConventionReport report;
  report.candidates = {{GeneratorScale::HALF, IncrementLaw::ONE_SIDED},
                       {GeneratorScale::HALF, IncrementLaw::TWO_SIDED},
                       {GeneratorScale::FULL, IncrementLaw::ONE_SIDED},
                       {GeneratorScale::FULL, IncrementLaw::TWO_SIDED}};
  report.graphs = {"path1", "path3"};

  const int points = 24;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = 0.05 * std::pow(100.0, double(i) / (points - 1));

  std::vector<std::vector<double>> mercer_ref;
  std::vector<MetricGraph> graphs;
  graphs.push_back(MetricGraph::path_graph(1.0, 1));
  graphs.push_back(MetricGraph::path_graph(3.0, 3));
  for (const MetricGraph& g : graphs) {
    const SpectralData s = compute_spectral(g, default_mesh_size(g));
    std::vector<double> q(points);
    for (int i = 0; i < points; ++i)
      q[i] = mercer_heat_content(s, grid[i]).value;
    mercer_ref.push_back(std::move(q));
  }

  report.worst_rel.assign(report.candidates.size(),
                          std::vector<double>(graphs.size(), 0.0));
  for (std::size_t c = 0; c < report.candidates.size(); ++c) {
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      const ProbContext ctx =
          make_prob_context(graphs[gi], report.candidates[c], grid);
      double worst = 0.0;
      for (int i = 0; i < points; ++i) {
        const double q = probabilistic_heat_content(ctx, grid[i]).value;
        worst = std::max(worst,
                         std::abs(q - mercer_ref[gi][i]) / mercer_ref[gi][i]);
      }
      report.worst_rel[c][gi] = worst;
    }
  }

  std::size_t winner = 0;
  double winner_score = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < report.candidates.size(); ++c) {
    const double score =
        *std::max_element(report.worst_rel[c].begin(),
                          report.worst_rel[c].end());
    if (score < winner_score) {
      winner_score = score;
      winner = c;
    }
  }
  report.selected = report.candidates[winner];

  std::ostringstream out;
  out << "convention adjudication: probabilistic route against the Mercer "
         "series\n";
  out << "  grid: " << points
      << " geometric points on [0.05, 5] per unit edge length squared\n";
  out << "  worst relative deviation per candidate\n";
  char line[160];
  std::snprintf(line, sizeof line, "    %-10s %12s %12s\n", "candidate",
                "path1", "path3");
  out << line;
  for (std::size_t c = 0; c < report.candidates.size(); ++c) {
    std::snprintf(line, sizeof line, "    %-10s %12.3e %12.3e\n",
                  convention_name(report.candidates[c]).c_str(),
                  report.worst_rel[c][0], report.worst_rel[c][1]);
    out << line;
  }
  out << "  selected: " << convention_name(report.selected) << "\n";
  report.text = out.str();
  return report;
}

}  // namespace heatlab
