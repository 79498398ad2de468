#include "heatlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heatlab/csv.hpp"
#include "heatlab/suite.hpp"

namespace heatlab {

namespace {

/// Report-facing number format; CSV artifacts keep full precision.
std::string fmt6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<double> geometric_grid(double tmin, double tmax, int points) {
  if (!(tmin > 0.0) || !(tmax > tmin))
    throw input_error("time range: need 0 < tmin < tmax");
  if (points < 2) throw input_error("time range: need at least 2 points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = tmin * std::pow(tmax / tmin, double(i) / (points - 1));
  return g;
}

void deliver(const std::string& text, const std::string& path,
             std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw input_error("cannot open output file '" + path + "'");
  f << text;
  f.flush();
  if (!f) throw input_error("failed writing output file '" + path + "'");
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> methods;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string::npos) comma = list.size();
    const std::string name = list.substr(pos, comma - pos);
    if (name.empty()) throw input_error("empty method name in --methods");
    methods.push_back(parse_method(name));
    pos = comma + 1;
  }
  return methods;
}

std::string convention_line(Convention conv) {
  std::string s = convention_name(conv);
  s += "  (generator ";
  s += conv.generator_scale == GeneratorScale::FULL ? "full" : "half";
  s += ", increments ";
  s += conv.increment_law == IncrementLaw::TWO_SIDED ? "two-sided"
                                                     : "one-sided";
  s += ")";
  return s;
}

void print_inputs(std::ostream& os, const MetricGraph& g,
                  const std::string& id) {
  os << "== inputs ==\n";
  os << "graph: " << id << "  (" << g.vertex_count() << " vertices, "
     << g.edge_count() << " edges, total length " << fmt6(g.total_length())
     << ")\n";
  os << "dirichlet:";
  int degree_sum = 0;
  for (int v : g.dirichlet()) {
    os << ' ' << g.vertex_id(v);
    degree_sum += g.degree(v);
  }
  os << "  (metric degree " << degree_sum << ")\n";
}

void print_small_certificate(std::ostream& os,
                             const SmallTimeCertificate& cert) {
  os << "edge length = " << fmt6(cert.edge_length) << "\n";
  os << "edge count = " << cert.edge_count << "\n";
  os << "k0 = " << cert.k0 << "\n";
  os << "C = " << cert.gap.str() << "\n";
  os << "t0 = " << fmt6(cert.t0) << "\n";
  os << "verified: " << cert.verified_t.size()
     << " grid times <= t0 resolved positive\n";
}

void print_spectra(std::ostream& os, const SpectralData& sp,
                   const SpectralData& sg) {
  os << "== spectra ==\n";
  os << "lambda_1(path) = " << fmt6(sp.eigenvalues[0]) << " +- "
     << fmt6(sp.eigenvalue_error[0]) << "\n";
  os << "lambda_1(graph) = " << fmt6(sg.eigenvalues[0]) << " +- "
     << fmt6(sg.eigenvalue_error[0]) << "\n";
}

void print_large_certificate(std::ostream& os,
                             const LargeTimeCertificate& cert) {
  os << "gap lower bound = " << fmt6(cert.gap_low) << "\n";
  os << "o_1(path)^2 lower bound = " << fmt6(cert.overlap_sq_low) << "\n";
  os << "T0 = " << fmt6(cert.threshold) << "\n";
  os << "verified:";
  for (double t : cert.verified_t) os << " t=" << fmt6(t);
  os << " resolved positive\n";
}

struct Opts {
  std::string graph;
  std::string ref;
  std::string output;
  std::string start;
  std::string convention = "full-two";
  std::string methods = "mercer,probabilistic,monte-carlo";
  double tmin = 1e-3;
  double tmax = 100.0;
  int points = 201;
  double t = 0.0;
  double mesh = 0.0;
  double dt = 0.0;
  double mc_dt = 0.0;
  double horizon = 0.0;
  int nmax = 0;
  int modes = 0;
  long samples = 20000;
  std::uint64_t seed = 20250816;
};

/// Grid for the alpha-backed routes: the 200-per-decade default grid of
/// the shape's edge length unless the user narrowed the range.
std::vector<double> alpha_route_grid(const Opts& o, bool range_given,
                                     double edge_length) {
  if (!range_given) return default_t_grid(edge_length);
  return geometric_grid(o.tmin, o.tmax, o.points);
}

int dispatch(CLI::App& app, Opts& o, std::ostream& out) {
  const Convention conv = parse_convention(o.convention);
  CLI::App* sub = app.get_subcommands().front();
  const std::string& cmd = sub->get_name();
  const auto given = [&](const char* name) {
    const CLI::Option* op = sub->get_option_no_throw(name);
    return op && op->count() > 0;
  };
  const bool range_given =
      given("--tmin") || given("--tmax") || given("--points");

  if (cmd == "spectral") {
    const MetricGraph g = load_graph(o.graph);
    const double h = o.mesh > 0.0 ? o.mesh : default_mesh_size(g);
    const SpectralData s = compute_spectral(g, h, o.modes);
    deliver(write_csv(csv_spectral(s, o.graph)), o.output, out);
    return 0;
  }

  if (cmd == "mercer") {
    const MetricGraph g = load_graph(o.graph);
    if (given("--t")) {
      const double h = o.mesh > 0.0 ? o.mesh : default_mesh_size(g);
      const SpectralData s = compute_spectral(g, h, o.modes);
      const ValueWithBound q = mercer_heat_content(s, o.t);
      std::ostringstream line;
      line << "Q(" << fmt6(o.t) << ") = " << format_double(q.value) << " +- "
           << format_double(q.bound) << "\n";
      deliver(line.str(), o.output, out);
      return 0;
    }
    ScanOptions opt;
    opt.mesh_size = o.mesh;
    const MethodCurve c =
        method_curve(g, o.graph, Method::MERCER,
                     geometric_grid(o.tmin, o.tmax, o.points), opt);
    deliver(write_csv(csv_curve(c)), o.output, out);
    return 0;
  }

  if (cmd == "cn") {
    const MetricGraph g = load_graph(o.graph);
    ScanOptions opt;
    opt.mesh_size = o.mesh;
    opt.cn_time_step = o.dt;
    const MethodCurve c =
        method_curve(g, o.graph, Method::CN,
                     geometric_grid(o.tmin, o.tmax, o.points), opt);
    deliver(write_csv(csv_curve(c)), o.output, out);
    return 0;
  }

  if (cmd == "walk") {
    const MetricGraph g = load_graph(o.graph);
    const EquilateralGraph eq = equilateralize(g.merge_dirichlet());
    const WalkChain<Rational> chain = build_chain<Rational>(eq);
    const int start = o.start.empty() ? chain.absorbing
                                      : eq.graph.vertex_index(o.start);
    if (o.nmax <= 0) o.nmax = 64;
    const HittingDistribution<Rational> d =
        hitting_distribution(chain, start, o.nmax);
    deliver(write_csv(csv_hitting(d, o.graph, eq.graph.vertex_id(start))),
            o.output, out);
    return 0;
  }

  if (cmd == "alpha") {
    const MetricGraph g = load_graph(o.graph);
    const EquilateralGraph eq = equilateralize(g.merge_dirichlet());
    if (o.nmax <= 0) o.nmax = 64;
    const AlphaTable table =
        build_alpha_table(eq.edge_length, conv,
                          alpha_route_grid(o, range_given, eq.edge_length),
                          o.nmax);
    deliver(write_csv(csv_alpha(table)), o.output, out);
    return 0;
  }

  if (cmd == "mc") {
    const MetricGraph g = load_graph(o.graph);
    SimulationConfig cfg;
    const double min_sq = g.min_edge_length() * g.min_edge_length();
    cfg.time_step = o.mc_dt > 0.0 ? o.mc_dt : min_sq / 400.0;
    cfg.horizon = o.horizon > 0.0 ? o.horizon : o.tmax;
    cfg.samples = o.samples;
    cfg.seed = o.seed;
    cfg.generator_scale = conv.generator_scale;
    const SurvivalEstimate e = simulate_survival(
        g, cfg, geometric_grid(o.tmin, o.tmax, o.points));
    deliver(write_csv(csv_survival(e, o.graph)), o.output, out);
    return 0;
  }

  if (cmd == "prob") {
    const MetricGraph g = load_graph(o.graph);
    const EquilateralGraph eq = equilateralize(g.merge_dirichlet());
    ScanOptions opt;
    opt.convention = conv;
    opt.n_max = o.nmax;
    const MethodCurve c =
        method_curve(g, o.graph, Method::PROBABILISTIC,
                     alpha_route_grid(o, range_given, eq.edge_length), opt);
    deliver(write_csv(csv_curve(c)), o.output, out);
    return 0;
  }

  if (cmd == "compare") {
    const MetricGraph ga = load_graph(o.graph);
    const MetricGraph gb = load_graph(o.ref);
    const double ell = equilateralize(ga.merge_dirichlet()).edge_length;
    const ProbContext a = make_prob_context(
        ga, conv, alpha_route_grid(o, range_given, ell), o.nmax);
    const ProbContext b =
        make_prob_context(gb, conv, a.table.t_grid, o.nmax);
    std::vector<ValueWithBound> diff;
    diff.reserve(a.table.t_grid.size());
    for (double t : a.table.t_grid) diff.push_back(compare_graphs(a, b, t));
    deliver(write_csv(csv_comparison(o.graph, o.ref, conv, a.table.t_grid,
                                     diff)),
            o.output, out);
    return 0;
  }

  if (cmd == "certify-small") {
    const MetricGraph g = load_graph(o.graph);
    const ProbContext ctx = make_prob_context(g, conv, {}, o.nmax);
    const SmallTimeCertificate cert = small_time_certificate(ctx);
    std::ostringstream os;
    print_inputs(os, g, o.graph);
    os << "== convention ==\n" << convention_line(conv) << "\n";
    os << "== small-time certificate ==\n";
    print_small_certificate(os, cert);
    deliver(os.str(), o.output, out);
    return 0;
  }

  if (cmd == "certify-large") {
    const MetricGraph g = load_graph(o.graph);
    const MetricGraph path = MetricGraph::path_graph(g.total_length(), 1);
    const SpectralData sp = compute_spectral(
        path, o.mesh > 0.0 ? o.mesh : default_mesh_size(path));
    const SpectralData sg =
        compute_spectral(g, o.mesh > 0.0 ? o.mesh : default_mesh_size(g));
    const LargeTimeCertificate cert =
        large_time_certificate(sp, sg, g.total_length());
    std::ostringstream os;
    print_inputs(os, g, o.graph);
    print_spectra(os, sp, sg);
    os << "== large-time certificate ==\n";
    print_large_certificate(os, cert);
    deliver(os.str(), o.output, out);
    return 0;
  }

  // scan: the full report with a fixed section order
  const MetricGraph g = load_graph(o.graph);
  if (!given("--points")) o.points = 13;
  const std::vector<double> grid = geometric_grid(o.tmin, o.tmax, o.points);
  const std::vector<Method> methods = parse_methods(o.methods);

  std::ostringstream os;
  print_inputs(os, g, o.graph);
  os << "== convention ==\n" << convention_line(conv) << "\n";

  os << "== small-time certificate ==\n";
  bool small_ok = false;
  SmallTimeCertificate small;
  try {
    const ProbContext ctx = make_prob_context(g, conv, {}, o.nmax);
    small = small_time_certificate(ctx);
    small_ok = true;
    print_small_certificate(os, small);
  } catch (const input_error& e) {
    os << "not applicable: " << e.what() << "\n";
  } catch (const tolerance_error& e) {
    os << "unresolved: " << e.what() << "\n";
  }

  const MetricGraph path = MetricGraph::path_graph(g.total_length(), 1);
  const SpectralData sp = compute_spectral(
      path, o.mesh > 0.0 ? o.mesh : default_mesh_size(path));
  const SpectralData sg =
      compute_spectral(g, o.mesh > 0.0 ? o.mesh : default_mesh_size(g));
  print_spectra(os, sp, sg);

  os << "== large-time certificate ==\n";
  bool large_ok = false;
  LargeTimeCertificate large;
  try {
    large = large_time_certificate(sp, sg, g.total_length());
    large_ok = true;
    print_large_certificate(os, large);
  } catch (const input_error& e) {
    os << "not applicable: " << e.what() << "\n";
  } catch (const tolerance_error& e) {
    os << "unresolved: " << e.what() << "\n";
  }

  ScanOptions opt;
  opt.convention = conv;
  opt.mesh_size = o.mesh;
  opt.cn_time_step = o.dt;
  opt.mc_time_step = o.mc_dt;
  opt.mc_samples = o.samples;
  opt.mc_seed = o.seed;
  opt.n_max = o.nmax;
  const CrossoverScan scan = crossover_scan(g, o.graph, grid, methods, opt);

  os << "== scan table ==\n";
  char line[160];
  std::snprintf(line, sizeof line, "%12s %14s %14s  %-13s %s\n", "t",
                "difference", "uncertainty", "verdict", "decided-by");
  os << line;
  int positive = 0, negative = 0, inconclusive = 0;
  for (const ScanPoint& p : scan.points) {
    std::snprintf(line, sizeof line, "%12s %14s %14s  %-13s %s\n",
                  fmt6(p.t).c_str(), fmt6(p.difference).c_str(),
                  fmt6(p.uncertainty).c_str(),
                  verdict_name(p.verdict).c_str(),
                  method_name(p.decided_by).c_str());
    os << line;
    if (p.verdict == ScanVerdict::POSITIVE) ++positive;
    else if (p.verdict == ScanVerdict::NEGATIVE) ++negative;
    else ++inconclusive;
  }

  os << "== conclusion ==\n";
  if (small_ok && large_ok)
    os << "Q(path) - Q(graph) certified positive for t <= " << fmt6(small.t0)
       << " and for t >= " << fmt6(large.threshold) << "\n";
  else if (small_ok)
    os << "Q(path) - Q(graph) certified positive for t <= " << fmt6(small.t0)
       << "\n";
  else if (large_ok)
    os << "Q(path) - Q(graph) certified positive for t >= "
       << fmt6(large.threshold) << "\n";
  os << "scan verdicts: " << positive << " positive, " << negative
     << " negative, " << inconclusive << " inconclusive\n";
  deliver(os.str(), o.output, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"heat-content laboratory for compact metric graphs"};
  app.require_subcommand(1);
  Opts o;

  const auto add_common = [&](CLI::App* sub, bool with_range = true) {
    sub->add_option("--graph", o.graph, "builtin graph name or graph file")
        ->required();
    sub->add_option("-o,--output", o.output, "write the artifact here");
    if (with_range) {
      sub->add_option("--tmin", o.tmin, "smallest time (default 1e-3)");
      sub->add_option("--tmax", o.tmax, "largest time (default 100)");
      sub->add_option("--points", o.points, "geometric grid size");
    }
    return sub;
  };
  const auto add_convention = [&](CLI::App* sub) {
    sub->add_option("--convention", o.convention,
                    "half-one, half-two, full-one, or full-two");
  };

  CLI::App* spectral = add_common(
      app.add_subcommand("spectral", "eigenvalues and overlaps (CSV)"),
      false);
  spectral->add_option("--mesh", o.mesh, "element size (default |e|/50)");
  spectral->add_option("--modes", o.modes, "mode count (default built-in)");

  CLI::App* mercer = add_common(
      app.add_subcommand("mercer", "spectral heat-content curve (CSV)"));
  mercer->add_option("--mesh", o.mesh, "element size (default |e|/50)");
  mercer->add_option("--modes", o.modes, "mode count (default built-in)");
  mercer->add_option("--t", o.t, "single time: print Q(t) +- bound");

  CLI::App* cn = add_common(
      app.add_subcommand("cn", "Crank-Nicolson heat-content curve (CSV)"));
  cn->add_option("--mesh", o.mesh, "element size (default |e|/50)");
  cn->add_option("--dt", o.dt, "time step (default tmax/4096)");

  CLI::App* walk = add_common(
      app.add_subcommand("walk", "exact hitting-time law (CSV)"), false);
  walk->add_option("--start", o.start,
                   "start vertex id (default: the absorbing vertex)");
  walk->add_option("--nmax", o.nmax, "truncation step (default 64)");

  CLI::App* alpha = add_common(
      app.add_subcommand("alpha", "alpha coefficient table (CSV)"));
  alpha->add_option("--nmax", o.nmax, "largest alpha index (default 64)");
  add_convention(alpha);

  CLI::App* mc = add_common(
      app.add_subcommand("mc", "Monte Carlo survival curve (CSV)"));
  mc->add_option("--mc-dt", o.mc_dt, "time step (default min|e|^2/400)");
  mc->add_option("--horizon", o.horizon, "simulation horizon (default tmax)");
  mc->add_option("--samples", o.samples, "trajectories (default 20000)");
  mc->add_option("--seed", o.seed, "RNG seed (default 20250816)");
  add_convention(mc);  // only the generator scale matters here

  CLI::App* prob = add_common(
      app.add_subcommand("prob", "random-walk heat-content curve (CSV)"));
  prob->add_option("--nmax", o.nmax, "series truncation (default: grown)");
  add_convention(prob);

  CLI::App* compare = add_common(
      app.add_subcommand("compare",
                         "certified Q difference of two graphs (CSV)"));
  compare->add_option("--ref", o.ref, "reference graph name or file")
      ->required();
  compare->add_option("--nmax", o.nmax, "series truncation (default: grown)");
  add_convention(compare);

  CLI::App* small = add_common(
      app.add_subcommand("certify-small",
                         "small-time Faber-Krahn certificate (report)"),
      false);
  small->add_option("--nmax", o.nmax, "series truncation (default: grown)");
  add_convention(small);

  CLI::App* large = add_common(
      app.add_subcommand("certify-large",
                         "large-time Faber-Krahn certificate (report)"),
      false);
  large->add_option("--mesh", o.mesh, "element size (default |e|/50)");

  CLI::App* scan = add_common(
      app.add_subcommand("scan", "full Faber-Krahn report"));
  scan->add_option("--methods", o.methods,
                   "comma list of mercer, probabilistic, monte-carlo, cn");
  scan->add_option("--mesh", o.mesh, "element size (default |e|/50)");
  scan->add_option("--dt", o.dt, "Crank-Nicolson step (default tmax/4096)");
  scan->add_option("--mc-dt", o.mc_dt, "MC time step (default min|e|^2/400)");
  scan->add_option("--samples", o.samples, "MC trajectories (default 20000)");
  scan->add_option("--seed", o.seed, "MC seed (default 20250816)");
  scan->add_option("--nmax", o.nmax, "series truncation (default: grown)");
  add_convention(scan);

  std::vector<std::string> argv_store{"heatlab"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_store.size());
  for (const std::string& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return 1;
  }

  try {
    return dispatch(app, o, out);
  } catch (const input_error& e) {
    err << "input error: " << e.what() << "\n";
    return 1;
  } catch (const tolerance_error& e) {
    err << "unresolved tolerance: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace heatlab
