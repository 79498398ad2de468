#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "heatlab/alpha.hpp"

using namespace heatlab;

namespace {

constexpr double kPi = std::numbers::pi;

Convention full_two() { return {GeneratorScale::FULL, IncrementLaw::TWO_SIDED}; }
Convention half_two() { return {GeneratorScale::HALF, IncrementLaw::TWO_SIDED}; }
Convention full_one() { return {GeneratorScale::FULL, IncrementLaw::ONE_SIDED}; }
Convention half_one() { return {GeneratorScale::HALF, IncrementLaw::ONE_SIDED}; }

std::vector<double> geom_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return g;
}

// Image-charge form of the two-sided exit CDF: an oracle independent of the
// eigenfunction series used by increment_cdf. sd is the positional standard
// deviation at time t.
double two_sided_cdf_images(double ell, double sd) {
  auto phi = [](double x) { return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))); };
  double survival = 0.0;
  for (int k = -40; k <= 40; ++k) {
    const double term =
        phi((2 * k + 1) * ell / sd) - phi((2 * k - 1) * ell / sd);
    survival += (k % 2 == 0 ? term : -term);
  }
  return 1.0 - survival;
}

}  // namespace

TEST_SUITE("alpha_engine") {

TEST_CASE("convention names round trip") {
  CHECK(convention_name(full_two()) == "full-two");
  CHECK(convention_name(half_one()) == "half-one");
  for (const char* name : {"half-one", "half-two", "full-one", "full-two"})
    CHECK(convention_name(parse_convention(name)) == name);
  CHECK_THROWS_AS(parse_convention("fast-two"), input_error);
  CHECK_THROWS_AS(parse_convention("full-three"), input_error);
  CHECK(scale_factor(GeneratorScale::HALF) == 0.5);
  CHECK(scale_factor(GeneratorScale::FULL) == 1.0);
}

TEST_CASE("alpha_zero matches its leading term where the series collapses") {
  // l = 1, HALF, t = 1: the n = 0 term is (8/pi^2) e^{-pi^2/2} ~ 0.00583
  // and the n = 1 term is below 1e-20.
  ValueWithBound a = alpha_zero(1.0, 1.0, half_two());
  const double lead = 8.0 / (kPi * kPi) * std::exp(-kPi * kPi / 2.0);
  CHECK(a.value == doctest::Approx(lead).epsilon(1e-14));
  CHECK(a.value == doctest::Approx(0.00583).epsilon(2e-3));
  CHECK(a.bound < 1e-16);
}

TEST_CASE("alpha_zero limits and homogeneity") {
  ValueWithBound at_zero = alpha_zero(0.0, 2.5, full_two());
  CHECK(at_zero.value == 2.5);
  CHECK(at_zero.bound == 0.0);

  ValueWithBound tiny = alpha_zero(1e-9, 1.0, full_two());
  CHECK(tiny.value > 1.0 - 1e-3);
  CHECK(tiny.value < 1.0 + tiny.bound);

  // Doubling l at fixed t/l^2 doubles the value.
  for (double t : {0.1, 0.7, 2.0}) {
    double one = alpha_zero(t, 1.0, full_two()).value;
    double two = alpha_zero(4.0 * t, 2.0, full_two()).value;
    CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-13));
  }

  // HALF at t equals FULL at t/2.
  for (double t : {0.05, 0.3, 1.4, 6.0}) {
    CHECK(alpha_zero(t, 1.0, half_two()).value ==
          doctest::Approx(alpha_zero(t / 2.0, 1.0, full_two()).value)
              .epsilon(1e-14));
  }

  CHECK_THROWS_AS(alpha_zero(1.0, -1.0, full_two()), input_error);
  CHECK_THROWS_AS(alpha_zero(1.0, 1.0, full_two(), 0), input_error);
}

TEST_CASE("one-sided increment law is the complementary error function") {
  // l = 1, HALF, t = 1/2: erfc(1). The reference value is from the
  // Maclaurin series of erf, summed here as an independent oracle.
  double erf1 = 0.0;
  double fact = 1.0;
  for (int n = 0; n < 30; ++n) {
    if (n > 0) fact *= n;
    erf1 += (n % 2 == 0 ? 1.0 : -1.0) / (fact * (2 * n + 1));
  }
  erf1 *= 2.0 / std::sqrt(kPi);
  CHECK(increment_cdf(0.5, 1.0, half_one()) ==
        doctest::Approx(1.0 - erf1).epsilon(1e-13));
  CHECK(increment_cdf(0.5, 1.0, half_one()) ==
        doctest::Approx(0.15729920705028513).epsilon(1e-13));
  // FULL doubles the variance rate: same value at halved time.
  CHECK(increment_cdf(0.25, 1.0, full_one()) ==
        doctest::Approx(0.15729920705028513).epsilon(1e-13));
}

TEST_CASE("two-sided increment law matches the image-charge oracle") {
  for (double t : {0.05, 0.1, 0.25, 0.5, 1.0, 2.0}) {
    const double by_images = two_sided_cdf_images(1.0, std::sqrt(2.0 * t));
    CHECK(increment_cdf(t, 1.0, full_two()) ==
          doctest::Approx(by_images).epsilon(1e-11));
    const double by_images_half = two_sided_cdf_images(1.0, std::sqrt(t));
    CHECK(increment_cdf(t, 1.0, half_two()) ==
          doctest::Approx(by_images_half).epsilon(1e-11));
  }
}

TEST_CASE("increment laws vanish at zero and order correctly") {
  CHECK(increment_cdf(1e-8, 1.0, full_two()) <= 1e-12);
  CHECK(increment_cdf(1e-8, 1.0, full_one()) <= 1e-12);
  CHECK(increment_cdf(-1.0, 1.0, full_two()) == 0.0);
  for (double t : geom_grid(1e-3, 50.0, 25)) {
    // Two exits are at least as likely as one.
    CHECK(increment_cdf(t, 1.0, full_two()) >=
          increment_cdf(t, 1.0, full_one()) - 1e-14);
    CHECK(increment_cdf(t, 1.0, full_two()) <= 1.0);
    CHECK(increment_cdf(t, 1.0, full_two()) >= 0.0);
  }
}

TEST_CASE("alpha table basic shape and the exact n = 0 column") {
  auto grid = geom_grid(0.02, 5.0, 40);
  AlphaTable table = build_alpha_table(1.0, full_two(), grid, 8, 4096);
  CHECK(table.t_grid.size() == 40);
  CHECK(table.n_max == 8);
  CHECK(table.values.size() == 40);
  CHECK(table.values[0].size() == 9);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ValueWithBound a0 = alpha_zero(grid[i], 1.0, full_two());
    CHECK(table.values[i][0] == a0.value);
    CHECK(table.error[i][0] == a0.bound);
  }
  CHECK(std::abs(table.density_mass_x0 - 1.0) < 1e-6);
  CHECK(std::abs(table.density_mass_increment - 1.0) < 1e-6);
}

TEST_CASE("alpha table entries respect range and monotonicity") {
  auto grid = geom_grid(0.02, 5.0, 40);
  AlphaTable table = build_alpha_table(1.0, full_two(), grid, 8, 4096);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int n = 0; n <= 8; ++n) {
      CHECK(table.values[i][n] > 0.0);
      CHECK(table.values[i][n] <= 1.0 + 1e-12);
      if (n > 0) CHECK(table.values[i][n] >= table.values[i][n - 1] - 1e-12);
      if (i > 0) CHECK(table.values[i][n] <= table.values[i - 1][n] + 1e-12);
    }
  }
  // Strictness holds where the quantities are numerically resolvable.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.1) continue;
    for (int n = 0; n <= 2; ++n) {
      CHECK(table.values[i][n] < 1.0);
      if (n > 0) CHECK(table.values[i][n] > table.values[i][n - 1]);
    }
    if (i > 0 && grid[i - 1] >= 0.1)
      CHECK(table.values[i][1] < table.values[i - 1][1]);
  }
  // Limits at the grid extremes, within error: high columns saturate at l
  // for the smallest t, every column is negligible at the largest t.
  for (int n = 2; n <= 8; ++n)
    CHECK(table.values[0][n] >= 1.0 - table.error[0][n] - 1e-10);
  AlphaTable wide =
      build_alpha_table(1.0, full_two(), geom_grid(0.02, 100.0, 40), 8, 4096);
  for (int n = 0; n <= 8; ++n)
    CHECK(wide.values[39][n] <= wide.error[39][n] + 1e-10);
}

TEST_CASE("half and full tables coincide after halving time") {
  auto tf = geom_grid(0.05, 4.0, 15);
  std::vector<double> th(tf.size());
  for (std::size_t i = 0; i < tf.size(); ++i) th[i] = 2.0 * tf[i];
  AlphaTable full = build_alpha_table(1.0, full_two(), tf, 4, 2048);
  AlphaTable half = build_alpha_table(1.0, half_two(), th, 4, 2048);
  for (std::size_t i = 0; i < tf.size(); ++i)
    for (int n = 0; n <= 4; ++n)
      CHECK(std::abs(full.values[i][n] - half.values[i][n]) <=
            full.error[i][n] + half.error[i][n] + 1e-12);
}

TEST_CASE("mesh halving stays inside the reported quadrature bound") {
  auto grid = geom_grid(0.05, 4.0, 20);
  AlphaTable coarse = build_alpha_table(1.0, full_two(), grid, 6, 2048);
  AlphaTable fine = build_alpha_table(1.0, full_two(), grid, 6, 4096);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int n = 1; n <= 6; ++n)
      CHECK(std::abs(fine.values[i][n] - coarse.values[i][n]) <=
            coarse.error[i][n] + 1e-12);
}

TEST_CASE("a deliberately coarse mesh is flagged") {
  auto grid = geom_grid(0.05, 4.0, 10);
  AlphaTable rough = build_alpha_table(1.0, full_two(), grid, 4, 64);
  bool any = false;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int n = 1; n <= 4; ++n) any = any || rough.flagged(i, n);
  CHECK(any);

  AlphaTable good = build_alpha_table(1.0, full_two(), grid, 4, 8192);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int n = 1; n <= 4; ++n) CHECK(!good.flagged(i, n));
}

TEST_CASE("inverse-CDF sampling reproduces alpha_3 within three sigma") {
  const double ell = 1.0;
  auto conv = full_two();
  std::vector<double> eval{0.5, 1.0, 2.0};
  AlphaTable table = build_alpha_table(ell, conv, eval, 3, 8192);

  // Tabulate both CDFs once and sample by linear inverse interpolation.
  const int m = 8192;
  const double window = 12.0;
  std::vector<double> ts(m + 1), c0(m + 1), ci(m + 1);
  for (int j = 0; j <= m; ++j) {
    ts[j] = window * j / m;
    c0[j] = j == 0 ? 0.0 : 1.0 - alpha_zero(ts[j], ell, conv).value / ell;
    ci[j] = increment_cdf(ts[j], ell, conv);
  }
  auto sample = [&](const std::vector<double>& cdf, double u) {
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.begin()) return 0.0;
    if (it == cdf.end()) return window;
    const std::size_t j = static_cast<std::size_t>(it - cdf.begin());
    const double lo = cdf[j - 1], hi = cdf[j];
    const double frac = hi > lo ? (u - lo) / (hi - lo) : 0.0;
    return ts[j - 1] + frac * (ts[j] - ts[j - 1]);
  };

  std::mt19937_64 rng(20250816u);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int samples = 1000000;
  std::vector<int> hits(eval.size(), 0);
  for (int i = 0; i < samples; ++i) {
    double s = sample(c0, unif(rng));
    for (int k = 0; k < 3; ++k) s += sample(ci, unif(rng));
    for (std::size_t e = 0; e < eval.size(); ++e)
      if (s >= eval[e]) hits[e] += 1;
  }
  for (std::size_t e = 0; e < eval.size(); ++e) {
    const double p = double(hits[e]) / samples;
    const double se = std::sqrt(p * (1.0 - p) / samples);
    CHECK(std::abs(ell * p - table.values[e][3]) <
          3.0 * ell * se + table.error[e][3]);
  }
}

TEST_CASE("hierarchy ratio falls toward zero at small times") {
  auto grid = geom_grid(0.02, 5.0, 40);
  AlphaTable table = build_alpha_table(1.0, full_two(), grid, 4, 4096);

  // Collect the resolvable suffix of the grid for k = 1, large t first.
  std::vector<double> ratios;
  std::vector<double> at_t;
  for (std::size_t i = grid.size(); i-- > 0;) {
    try {
      ratios.push_back(hierarchy_ratio(table, 1, grid[i]));
      at_t.push_back(grid[i]);
    } catch (const tolerance_error&) {
      break;
    }
  }
  REQUIRE(ratios.size() >= 10);
  CHECK(at_t.front() == grid.back());
  CHECK(at_t.back() <= 0.15);  // resolvable well into the small-t regime
  for (std::size_t i = 1; i < ratios.size(); ++i) CHECK(ratios[i] < ratios[i - 1]);
  CHECK(ratios.back() < 0.05);
  CHECK(ratios.front() > 1.0);  // at large t the ratio exceeds 1

  // Paper bound: ratio <= P/(1-P) with P the increment CDF.
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double p = increment_cdf(at_t[i], 1.0, full_two());
    CHECK(ratios[i] <= p / (1.0 - p) * (1.0 + 1e-6) + 1e-9);
  }

  CHECK_THROWS_AS(hierarchy_ratio(table, 4, grid[10]), input_error);
  CHECK_THROWS_AS((void)table.grid_index(0.1234567), input_error);
  CHECK_THROWS_AS(hierarchy_ratio(table, 3, grid[0]), tolerance_error);
}

TEST_CASE("table construction rejects malformed requests") {
  CHECK_THROWS_AS(build_alpha_table(0.0, full_two(), {1.0}, 2), input_error);
  CHECK_THROWS_AS(build_alpha_table(1.0, full_two(), {}, 2), input_error);
  CHECK_THROWS_AS(build_alpha_table(1.0, full_two(), {1.0, 0.5}, 2),
                  input_error);
  CHECK_THROWS_AS(build_alpha_table(1.0, full_two(), {-1.0, 0.5}, 2),
                  input_error);
  CHECK_THROWS_AS(build_alpha_table(1.0, full_two(), {1.0}, -1), input_error);
  CHECK_THROWS_AS(build_alpha_table(1.0, full_two(), {1.0}, 2, 100),
                  input_error);
}

TEST_CASE("default grid covers five decades at 200 points each") {
  auto grid = default_t_grid(2.0);
  CHECK(grid.size() == 1001);
  CHECK(grid.front() == doctest::Approx(1e-3 * 4.0));
  CHECK(grid.back() == doctest::Approx(1e2 * 4.0).epsilon(1e-9));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

}  // TEST_SUITE
