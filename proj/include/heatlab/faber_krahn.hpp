#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heatlab/alpha.hpp"
#include "heatlab/common.hpp"
#include "heatlab/metric_graph.hpp"
#include "heatlab/spectral.hpp"
#include "heatlab/walk.hpp"

namespace heatlab {

/// The four independent heat-content routes the laboratory reconciles.
enum class Method { MERCER, PROBABILISTIC, MONTE_CARLO, CN };

/// "mercer", "probabilistic", "monte-carlo", "cn".
std::string method_name(Method m);
Method parse_method(const std::string& name);

/// A heat-content curve tagged with its route and enough provenance to
/// reproduce it. error is a certified bound for deterministic routes and
/// one standard error for MONTE_CARLO.
struct MethodCurve {
  HeatContentCurve curve;
  Method method = Method::MERCER;
  std::string graph_id;
  std::string convention;  ///< empty when the route has no convention knob
  std::string truncation;  ///< human-readable discretization parameters
};

/// Everything the probabilistic formula needs about one graph: the
/// Dirichlet-merged equilateral shape, the metric degree of its absorbing
/// vertex, the alpha table at the shape's edge length, and the exact
/// return-time law truncated at table.n_max.
struct ProbContext {
  EquilateralGraph shape;
  int degree = 0;
  AlphaTable table;
  HittingDistribution<Rational> dist;
};

/// Build a ProbContext: merge Dirichlet vertices, equilateralize, take the
/// exact hitting law of the walk started and absorbed at the merged vertex.
/// An empty t_grid selects default_t_grid(edge length). n_max <= 0 grows
/// through 64, 128, 256, 512 until the certified tail mass P[tau > n_max]
/// drops below 1e-9 (512 is kept regardless, with its honest bound), then
/// checks the truncation budget (l - alpha_{n_max}(t_min)) E[tau] < 1e-3 l.
ProbContext make_prob_context(const MetricGraph& g, Convention conv = {},
                              std::vector<double> t_grid = {}, int n_max = 0);

/// Q_t = (deg/2) [alpha_0(t) E[tau] + sum_{n>=1} (alpha_n - alpha_{n-1})
/// E[(tau - n) 1{tau >= n+1}]], truncated at dist.n_max. Expectations use
/// bracket midpoints; the bound combines bracket half-widths, alpha error
/// propagation, and the tail (l - alpha_N) sum_{j > N} P[tau > j].
/// t must be a table grid point.
ValueWithBound probabilistic_heat_content(const ProbContext& ctx, double t);

/// The pre-rearrangement form of the same series, Q_t = (deg/2)
/// sum_{n>=0} alpha_n(t) P[tau >= n+1]. Agrees with the rearranged form
/// within both stated bounds; its tail l * sum_{j > N} P[tau > j] is the
/// wider of the two at small t.
ValueWithBound survival_series_heat_content(const ProbContext& ctx, double t);

/// S_n = sum_{k<=n} (n - k) (P_a[tau = k] - P_b[tau = k]), exact.
std::vector<Rational> comparison_inner_sums(
    const HittingDistribution<Rational>& a,
    const HittingDistribution<Rational>& b, int n_max);

/// Q_t(a) - Q_t(b) = (deg/2) sum_{n>=1} (alpha_n - alpha_{n-1}) S_n for
/// shapes with equal edge length, edge count, and absorbing degree (the
/// equal return means cancel the alpha_0 term). Exactly antisymmetric;
/// zero for identical hitting laws. t must be a table grid point.
ValueWithBound compare_graphs(const ProbContext& a, const ProbContext& b,
                              double t);

/// Small-time Faber-Krahn certificate against the equilateral path with
/// the same edge count and edge length. gap = P_path[tau = k0] -
/// P_graph[tau = k0] is exact; t0 is the largest grid time at which
/// gap/(2 edge_count) exceeds the alpha hierarchy ratio at k0.
struct SmallTimeCertificate {
  int k0 = 0;            ///< twice the hop distance to the nearest branch
  Rational gap = 0;      ///< probability surplus of the path at step k0
  double t0 = 0.0;       ///< certified validity threshold
  int edge_count = 0;
  double edge_length = 0.0;
  std::vector<double> verified_t;  ///< grid times <= t0 with resolved Q gap
};

/// Compute the certificate and re-verify it: the comparison series must
/// resolve strictly positive at sampled grid times below t0.
/// Throws input_error for paths ("graph is a path") and for absorbing
/// degree > 1 (reduce by splitting the Dirichlet vertex first);
/// tolerance_error when the inequality or verification never resolves.
SmallTimeCertificate small_time_certificate(const ProbContext& ctx);

/// Large-time certificate from two-mesh spectral data: beyond threshold,
/// exp(-t gap_low) < overlap_sq_low / |Gamma| forces Q(path) > Q(graph).
struct LargeTimeCertificate {
  double threshold = 0.0;        ///< T0
  double gap_low = 0.0;          ///< certified lambda_1 gap lower bound
  double overlap_sq_low = 0.0;   ///< certified o_1(path)^2 lower bound
  std::vector<double> verified_t;  ///< times with resolved Mercer gap
};

/// Requires compute_spectral data (overlap errors present), equal total
/// lengths, and an eigenvalue gap exceeding the combined error bounds
/// (else tolerance_error: refine the mesh). The Mercer difference is
/// re-verified at threshold multiples {2, 4, 8, 16}.
LargeTimeCertificate large_time_certificate(const SpectralData& s_path,
                                            const SpectralData& s_g,
                                            double total_length);

/// Sign of Q(path) - Q(graph) at one scan time. INCONCLUSIVE is a
/// first-class outcome: reported whenever no method resolves the sign or
/// resolved methods disagree, never forced to a sign.
enum class ScanVerdict { POSITIVE, NEGATIVE, INCONCLUSIVE };

/// "positive", "negative", "inconclusive".
std::string verdict_name(ScanVerdict v);

struct ScanOptions {
  Convention convention;          ///< probabilistic and Monte Carlo routes
  double mesh_size = 0.0;         ///< 0 = default per graph
  double cn_time_step = 0.0;      ///< 0 = t_max / 4096
  double mc_time_step = 0.0;      ///< 0 = min edge length^2 / 400
  long mc_samples = 20000;
  std::uint64_t mc_seed = 20250816;
  int n_max = 0;                  ///< 0 = automatic truncation growth
};

/// One route's heat-content curve with scan defaults applied.
/// MONTE_CARLO runs on the raw graph; PROBABILISTIC merges and
/// equilateralizes and therefore requires commensurable edge lengths.
MethodCurve method_curve(const MetricGraph& g, const std::string& graph_id,
                         Method method, const std::vector<double>& t_grid,
                         const ScanOptions& opt = {});

/// Q(path) - Q(graph) per grid point for one route. uncertainty combines
/// both curves' bounds (three standard errors each for MONTE_CARLO).
struct MethodDifference {
  Method method = Method::MERCER;
  std::vector<double> difference;
  std::vector<double> uncertainty;
};

struct ScanPoint {
  double t = 0.0;
  double difference = 0.0;   ///< from the deciding method
  double uncertainty = 0.0;
  Method decided_by = Method::MERCER;
  ScanVerdict verdict = ScanVerdict::INCONCLUSIVE;
};

/// Per-method difference table against the equal-length equilateral path,
/// plus one adjudicated verdict per time: the resolved method with the
/// smallest uncertainty decides; disagreement between resolved methods
/// demotes the point to INCONCLUSIVE.
struct CrossoverScan {
  std::string graph_id;
  Convention convention;
  std::vector<double> t_grid;
  std::vector<MethodDifference> methods;
  std::vector<ScanPoint> points;
};

CrossoverScan crossover_scan(const MetricGraph& g,
                             const std::string& graph_id,
                             const std::vector<double>& t_grid,
                             const std::vector<Method>& methods,
                             const ScanOptions& opt = {});

/// Cross-method adjudication of the convention: the probabilistic route
/// runs on the 1-edge and 3-edge unit paths under all four conventions
/// and the worst relative deviation from the Mercer curve decides.
struct ConventionReport {
  Convention selected;
  std::vector<Convention> candidates;
  std::vector<std::string> graphs;
  /// worst_rel[c][g]: worst relative deviation of candidate c on graph g.
  std::vector<std::vector<double>> worst_rel;
  std::string text;  ///< human-readable adjudication report
};

ConventionReport select_convention();

}  // namespace heatlab
