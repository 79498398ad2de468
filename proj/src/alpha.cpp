#include "heatlab/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace heatlab {

namespace {

constexpr double kPi = std::numbers::pi;

/// In-place radix-2 FFT; invert divides by the length.
void fft(std::vector<std::complex<double>>& a, bool invert) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2 * kPi / static_cast<double>(len) * (invert ? -1 : 1);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (invert)
    for (auto& x : a) x /= static_cast<double>(n);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Survival of the two-sided exit from distance l started at the midpoint:
/// alternating series, remainder within the first omitted term.
double two_sided_survival(double t, double ell, double s) {
  double sum = 0.0;
  for (int m = 0; m < 100000; ++m) {
    const double k = 2.0 * m + 1.0;
    const double term =
        4.0 / (k * kPi) * std::exp(-s * k * k * kPi * kPi * t / (4 * ell * ell));
    sum += (m % 2 == 0) ? term : -term;
    if (term < 1e-17) break;
  }
  return sum;
}

struct Mesh {
  double h = 0.0;
  std::vector<double> x0_density;   // centered differences of the X_0 CDF
  std::vector<double> inc_density;  // same for the increment CDF
  double x0_mass = 0.0;             // rectangle mass, telescopes exactly
  double inc_mass = 0.0;
};

Mesh build_mesh(double ell, Convention conv, double window, int m) {
  Mesh mesh;
  mesh.h = window / m;
  auto cdf_x0 = [&](double t) {
    if (t <= 0) return 0.0;
    return 1.0 - alpha_zero(t, ell, conv).value / ell;
  };
  auto cdf_inc = [&](double t) { return increment_cdf(t, ell, conv); };
  auto densities = [&](auto cdf) {
    std::vector<double> d(m + 1);
    double prev = cdf(-mesh.h);
    double cur = cdf(0.0);
    for (int j = 0; j <= m; ++j) {
      const double next = cdf((j + 1) * mesh.h);
      d[j] = (next - prev) / (2 * mesh.h);
      prev = cur;
      cur = next;
    }
    return d;
  };
  mesh.x0_density = densities(cdf_x0);
  mesh.inc_density = densities(cdf_inc);
  for (double v : mesh.x0_density) mesh.x0_mass += v * mesh.h;
  for (double v : mesh.inc_density) mesh.inc_mass += v * mesh.h;
  return mesh;
}

/// alpha_n/l for n = 1..n_max at the evaluation points, by an n-fold FFT
/// convolution chain. Survival is integrated from the right so the large-t
/// tail never suffers cancellation against the bulk mass:
/// S(t) = int_t^T c + (1 - int_0^T c).
std::vector<std::vector<double>> survival_columns(
    const Mesh& mesh, int m, int n_max, const std::vector<double>& t_eval) {
  const std::size_t pad = next_pow2(2 * static_cast<std::size_t>(m) + 3);
  std::vector<std::complex<double>> ghat(pad);
  for (int j = 0; j <= m; ++j) ghat[j] = mesh.inc_density[j];
  fft(ghat, false);

  std::vector<double> c = mesh.x0_density;
  std::vector<double> right(m + 1);
  std::vector<std::vector<double>> cols(n_max + 1);

  auto interp = [&](const std::vector<double>& s_mesh) {
    std::vector<double> out(t_eval.size());
    for (std::size_t i = 0; i < t_eval.size(); ++i) {
      const double x = std::clamp(t_eval[i] / mesh.h, 0.0, double(m));
      const std::size_t j =
          std::min(static_cast<std::size_t>(x), static_cast<std::size_t>(m - 1));
      const double frac = x - static_cast<double>(j);
      // Survival lives in [0, 1]; the mass-balance tail can stray below
      // zero by roundoff, and clamping only moves entries toward the truth.
      out[i] =
          std::clamp(s_mesh[j] * (1 - frac) + s_mesh[j + 1] * frac, 0.0, 1.0);
    }
    return out;
  };

  for (int n = 1; n <= n_max; ++n) {
    std::vector<std::complex<double>> chat(pad);
    for (int j = 0; j <= m; ++j) chat[j] = c[j];
    fft(chat, false);
    for (std::size_t j = 0; j < pad; ++j) chat[j] *= ghat[j] * mesh.h;
    fft(chat, true);
    for (int j = 0; j <= m; ++j) c[j] = chat[j].real();

    right[m] = 0.0;
    for (int j = m - 1; j >= 0; --j)
      right[j] = right[j + 1] + (c[j] + c[j + 1]) / 2 * mesh.h;
    const double missing = 1.0 - right[0];
    std::vector<double> s_mesh(m + 1);
    for (int j = 0; j <= m; ++j) s_mesh[j] = right[j] + missing;
    cols[n] = interp(s_mesh);
  }
  return cols;
}

}  // namespace

double scale_factor(GeneratorScale scale) {
  return scale == GeneratorScale::HALF ? 0.5 : 1.0;
}

std::string convention_name(Convention conv) {
  std::string name =
      conv.generator_scale == GeneratorScale::HALF ? "half" : "full";
  name += conv.increment_law == IncrementLaw::ONE_SIDED ? "-one" : "-two";
  return name;
}

Convention parse_convention(const std::string& name) {
  Convention conv;
  if (name.rfind("half-", 0) == 0)
    conv.generator_scale = GeneratorScale::HALF;
  else if (name.rfind("full-", 0) == 0)
    conv.generator_scale = GeneratorScale::FULL;
  else
    throw input_error("unknown convention '" + name +
                      "' (expected {half,full}-{one,two})");
  const std::string law = name.substr(5);
  if (law == "one")
    conv.increment_law = IncrementLaw::ONE_SIDED;
  else if (law == "two")
    conv.increment_law = IncrementLaw::TWO_SIDED;
  else
    throw input_error("unknown convention '" + name +
                      "' (expected {half,full}-{one,two})");
  return conv;
}

ValueWithBound alpha_zero(double t, double ell, Convention conv, int n_terms) {
  if (!(ell > 0)) throw input_error("alpha_zero: length must be positive");
  if (n_terms < 1) throw input_error("alpha_zero: n_terms must be >= 1");
  const double s = scale_factor(conv.generator_scale);
  if (t <= 0) return {ell, 0.0};
  double sum = 0.0;
  double bound = 0.0;
  for (int n = 0; n < n_terms; ++n) {
    const double k = 2.0 * n + 1.0;
    sum += 8 * ell / (k * k * kPi * kPi) *
           std::exp(-t * s * k * k * kPi * kPi / (ell * ell));
    // Tail past n terms: sum_{j>=n+1} f(j) <= int_n^inf f, f decreasing.
    const double u = 2.0 * n + 1.0;
    bound = 4 * ell / (kPi * kPi) / u *
            std::exp(-t * s * kPi * kPi * u * u / (ell * ell));
    if (bound < 1e-16 * ell) break;
  }
  return {sum, bound};
}

double increment_cdf(double t, double ell, Convention conv) {
  if (!(ell > 0)) throw input_error("increment_cdf: length must be positive");
  if (t <= 0) return 0.0;
  const double s = scale_factor(conv.generator_scale);
  if (conv.increment_law == IncrementLaw::ONE_SIDED) {
    // Level-hitting law: variance per unit time is 2s.
    return std::erfc(ell / std::sqrt(2.0 * t * 2.0 * s));
  }
  return std::clamp(1.0 - two_sided_survival(t, ell, s), 0.0, 1.0);
}

std::size_t AlphaTable::grid_index(double t) const {
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (std::abs(t_grid[i] - t) <= 1e-12 * std::max(1.0, std::abs(t)))
      return i;
  throw input_error("alpha table: t = " + format_double(t) +
                    " is not a grid point");
}

std::vector<double> default_t_grid(double ell) {
  std::vector<double> grid;
  const double lo = 1e-3 * ell * ell;
  const int decades = 5;  // up to 1e2 l^2
  const int per_decade = 200;
  for (int i = 0; i <= decades * per_decade; ++i)
    grid.push_back(lo * std::pow(10.0, double(i) / per_decade));
  return grid;
}

AlphaTable build_alpha_table(double ell, Convention conv,
                             std::vector<double> t_grid, int n_max,
                             int grid_resolution, double flag_tolerance) {
  if (!(ell > 0))
    throw input_error("build_alpha_table: length must be positive");
  if (t_grid.empty())
    throw input_error("build_alpha_table: evaluation grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0))
      throw input_error("build_alpha_table: grid times must be positive");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
      throw input_error(
          "build_alpha_table: grid must be strictly increasing");
  }
  if (n_max < 0) throw input_error("build_alpha_table: n_max must be >= 0");
  if (grid_resolution < 32 || (grid_resolution & (grid_resolution - 1)) != 0)
    throw input_error(
        "build_alpha_table: grid_resolution must be a power of two >= 32");

  const double s = scale_factor(conv.generator_scale);
  const double window = std::max(1.02 * t_grid.back(), 12.0 * ell * ell / s);

  AlphaTable table;
  table.common_length = ell;
  table.convention = conv;
  table.t_grid = std::move(t_grid);
  table.n_max = n_max;
  table.grid_resolution = grid_resolution;
  table.window = window;
  table.flag_tolerance = flag_tolerance;

  const std::size_t nt = table.t_grid.size();
  table.values.assign(nt, std::vector<double>(n_max + 1, 0.0));
  table.error.assign(nt, std::vector<double>(n_max + 1, 0.0));

  for (std::size_t i = 0; i < nt; ++i) {
    ValueWithBound a0 = alpha_zero(table.t_grid[i], ell, conv);
    table.values[i][0] = a0.value;
    table.error[i][0] = a0.bound;
  }
  if (n_max == 0) {
    Mesh fine = build_mesh(ell, conv, window, grid_resolution);
    table.density_mass_x0 = fine.x0_mass;
    table.density_mass_increment = fine.inc_mass;
    return table;
  }

  Mesh fine = build_mesh(ell, conv, window, grid_resolution);
  Mesh coarse = build_mesh(ell, conv, window, grid_resolution / 2);
  table.density_mass_x0 = fine.x0_mass;
  table.density_mass_increment = fine.inc_mass;

  auto cols_fine =
      survival_columns(fine, grid_resolution, n_max, table.t_grid);
  auto cols_coarse =
      survival_columns(coarse, grid_resolution / 2, n_max, table.t_grid);

  // Quadrature bound per entry: the fine/coarse gap summed over the entry
  // and its grid neighbours. The pointwise gap alone can cross zero where
  // the true error does not, so a lone entry's gap is not a safe bound.
  std::vector<double> gap(nt);
  for (int n = 1; n <= n_max; ++n) {
    for (std::size_t i = 0; i < nt; ++i) {
      table.values[i][n] = ell * cols_fine[n][i];
      gap[i] = ell * std::abs(cols_fine[n][i] - cols_coarse[n][i]);
    }
    for (std::size_t i = 0; i < nt; ++i) {
      const std::size_t lo = i > 0 ? i - 1 : i;
      const std::size_t hi = i + 1 < nt ? i + 1 : i;
      table.error[i][n] = gap[lo] + gap[i] + gap[hi] + 1e-13 * ell;
    }
  }
  return table;
}

double hierarchy_ratio(const AlphaTable& table, int k, double t) {
  if (k < 0 || k + 1 > table.n_max)
    throw input_error("hierarchy_ratio: need 0 <= k and k+1 <= n_max");
  const std::size_t i = table.grid_index(t);
  const double ell = table.common_length;
  const double gap = table.values[i][k + 1] - table.values[i][k];
  const double gap_err = table.error[i][k + 1] + table.error[i][k];
  if (gap <= gap_err)
    throw tolerance_error(
        "hierarchy_ratio: alpha gap at t = " + format_double(t) +
        " is not resolvable above its error bound");
  return (ell - table.values[i][k + 1]) / gap;
}

}  // namespace heatlab
