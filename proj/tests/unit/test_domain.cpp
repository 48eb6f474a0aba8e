#include <doctest.h>

#include <cmath>

#include "nlheat/domain.hpp"
#include "nlheat/error.hpp"
#include "nlheat/random_field.hpp"
#include "oracles.hpp"

using namespace nlheat;
using oracle::pi;

namespace {

Grid unit_interval(int m) { return Grid(make_domain(1, {1.0}), {m}); }

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("make_domain computes volume and validates input") {
  CHECK(make_domain(1, {1.0}).volume() == 1.0);
  CHECK(make_domain(2, {2.0, 1.0}).volume() == 2.0);
  try {
    make_domain(1, {-1.0});
    FAIL("expected NonpositiveLength");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonpositiveLength);
  }
  CHECK_THROWS_AS(make_domain(3, {1.0, 1.0, 1.0}), Error);
  CHECK_THROWS_AS(make_domain(2, {1.0}), Error);
  CHECK_THROWS_AS(Grid(make_domain(1, {1.0}), {3}), Error);
}

TEST_CASE("neumann_eigenvalues: first positive eigenvalue follows the longest axis") {
  auto ev = neumann_eigenvalues(make_domain(1, {1.0}), {8});
  CHECK(ev[0].value == 0.0);
  CHECK(ev[1].value == doctest::Approx(pi * pi).epsilon(1e-15));

  ev = neumann_eigenvalues(make_domain(2, {1.0, 1.0}), {4, 4});
  CHECK(ev[0].value == 0.0);
  CHECK(ev[1].value == doctest::Approx(pi * pi));
  CHECK(ev[2].value == doctest::Approx(pi * pi));
  CHECK(ev[3].value > ev[2].value + 1.0);

  ev = neumann_eigenvalues(make_domain(2, {2.0, 1.0}), {4, 4});
  CHECK(ev[1].value == doctest::Approx(pi * pi / 4.0));
  CHECK(ev[1].index == std::array<int, 2>{1, 0});
  CHECK(make_domain(2, {2.0, 1.0}).lambda1() == doctest::Approx(pi * pi / 4.0));
  CHECK_THROWS_AS(neumann_eigenvalues(make_domain(1, {1.0}), {1}), Error);
}

TEST_CASE("grid eigenvalues are nonnegative and nondecreasing per axis") {
  Grid g(make_domain(2, {1.5, 0.7}), {8, 6});
  const auto ev = g.eigenvalues();
  CHECK(ev[0] == 0.0);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 6; ++j) {
      CHECK(ev[g.flatten({i, j})] >= 0.0);
      if (i + 1 < 8) CHECK(ev[g.flatten({i + 1, j})] > ev[g.flatten({i, j})]);
      if (j + 1 < 6) CHECK(ev[g.flatten({i, j + 1})] > ev[g.flatten({i, j})]);
    }
}

TEST_CASE("Field rejects non-finite values and shape mismatch") {
  Grid g = unit_interval(8);
  std::vector<double> v(8, 0.0);
  v[3] = std::nan("");
  CHECK_THROWS_AS(Field(g, v), Error);
  CHECK_THROWS_AS(Field(g, std::vector<double>(7, 0.0)), Error);
}

TEST_CASE("to_spectral: constants and single cosines") {
  Grid g(make_domain(2, {2.0, 1.0}), {16, 8});
  auto c = to_spectral(Field::constant(g, 3.0));
  CHECK(c[0] == doctest::Approx(3.0 * std::sqrt(2.0)));  // mean * |Omega|^{1/2}
  for (std::size_t k = 1; k < c.size(); ++k) CHECK(std::abs(c[k]) < 1e-13);

  auto f = Field::from_function(g, [](auto x) { return std::cos(pi * x[0] / 2.0); });
  c = to_spectral(f);
  const std::size_t k10 = g.flatten({1, 0});
  // ||cos(pi x / 2)||_2^2 = |Omega| / 2 = 1
  CHECK(c[k10] == doctest::Approx(1.0).epsilon(1e-13));
  for (std::size_t k = 0; k < c.size(); ++k)
    if (k != k10) CHECK(std::abs(c[k]) < 1e-13);
}

TEST_CASE("round trip is the identity for random fields (property)") {
  for (int m : {4, 5, 16, 33, 128}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(seed * 7919 + m);
      Grid g1 = unit_interval(m);
      std::vector<double> v(g1.size());
      for (double& x : v) x = rng.normal();
      Field f(g1, v);
      Field back = from_spectral(to_spectral(f));
      CHECK(max_abs_diff(back.values(), f.values()) <= 1e-12 * linf_norm(f));

      Grid g2(make_domain(2, {1.3, 0.4}), {m, m + 3});
      std::vector<double> w(g2.size());
      for (double& x : w) x = rng.normal();
      Field f2(g2, w);
      Field back2 = from_spectral(to_spectral(f2));
      CHECK(max_abs_diff(back2.values(), f2.values()) <= 1e-12 * linf_norm(f2));
    }
  }
}

TEST_CASE("Parseval: nodal quadrature inner product equals coefficient inner product") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Grid g(make_domain(2, {2.0, 0.5}), {32, 24});
    Field u = random_mean_zero_field(g, seed, 8);
    Field v = random_mean_zero_field(g, seed + 100, 8);
    v += Field::constant(g, 0.3);
    const double quad = inner_product(u, v);
    const double spec = spectral_inner(to_spectral(u), to_spectral(v));
    CHECK(std::abs(quad - spec) <= 1e-12 * std::max(1.0, std::abs(quad)));
  }
}

TEST_CASE("zero mode removed means zero mean") {
  Grid g(make_domain(1, {1.7}), {64});
  SpectralCoeffs c = random_mean_zero_coeffs(g, 3);
  c[0] = 0.0;
  CHECK(std::abs(mean(from_spectral(c))) < 1e-15);
}

TEST_CASE("integrate and mean") {
  Grid g(make_domain(2, {2.0, 1.0}), {8, 8});
  CHECK(integrate(Field::constant(g, 2.0)) == doctest::Approx(4.0));
  CHECK(mean(Field::constant(g, 2.0)) == doctest::Approx(2.0));

  Grid g1 = unit_interval(64);
  auto c1 = Field::from_function(g1, [](auto x) { return std::cos(pi * x[0]); });
  CHECK(std::abs(integrate(c1)) < 1e-14);
  // Half-angle identity; independent quadrature gives the same.
  const double oracle_val = oracle::gauss_legendre([](double x) { return std::cos(pi * x) * std::cos(pi * x); }, 0, 1);
  CHECK(oracle_val == doctest::Approx(0.5).epsilon(1e-14));
  auto c2 = Field::from_function(g1, [](auto x) { return std::cos(pi * x[0]) * std::cos(pi * x[0]); });
  CHECK(std::abs(integrate(c2) - 0.5) < 1e-14);
}

TEST_CASE("grad_norm_sq by Parseval") {
  Grid g = unit_interval(64);
  CHECK(grad_norm_sq(to_spectral(Field::constant(g, 5.0))) < 1e-20);
  const double oracle_val = oracle::gauss_legendre(
      [](double x) { return pi * pi * std::sin(pi * x) * std::sin(pi * x); }, 0, 1);
  CHECK(oracle_val == doctest::Approx(pi * pi / 2).epsilon(1e-13));
  auto u = Field::from_function(g, [](auto x) { return std::cos(pi * x[0]); });
  CHECK(grad_norm_sq(to_spectral(u)) == doctest::Approx(pi * pi / 2).epsilon(1e-13));

  auto u2 = Field::from_function(g, [](auto x) { return 0.5 * std::cos(3 * pi * x[0]); });
  const double sum = grad_norm_sq(to_spectral(u + u2));
  CHECK(sum == doctest::Approx(grad_norm_sq(to_spectral(u)) + grad_norm_sq(to_spectral(u2))).epsilon(1e-13));
}

TEST_CASE("discrete Poincare inequality (property)") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Grid g = seed % 2 ? unit_interval(64) : Grid(make_domain(2, {1.0, 2.5}), {24, 40});
    Field u = random_mean_zero_field(g, seed, 12);
    u += Field::constant(g, 0.7 * static_cast<double>(seed % 3));
    const double m = mean(u);
    Field fluct = u - Field::constant(g, m);
    const double lhs = grad_norm_sq(to_spectral(u));
    const double rhs = g.domain().lambda1() * integrate(Field(g, [&] {
                         std::vector<double> s(fluct.values().begin(), fluct.values().end());
                         for (double& v : s) v *= v;
                         return s;
                       }()));
    CHECK(lhs >= rhs * (1.0 - 1e-10));
  }
}

TEST_CASE("norms") {
  Grid g(make_domain(1, {2.0}), {16});
  CHECK(lp_norm(Field::constant(g, 1.0), 2.0) == doctest::Approx(std::sqrt(2.0)));
  Grid g1 = unit_interval(128);
  auto u = Field::from_function(g1, [](auto x) { return std::cos(pi * x[0]); });
  CHECK(std::abs(linf_norm(u) - 1.0) < 1e-3);
  CHECK(lp_norm(u, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(lp_norm(u, 2.0) * lp_norm(u, 2.0) == doctest::Approx(inner_product(u, u)));
  CHECK(min_value(u) < -0.999);
  CHECK_THROWS_AS(lp_norm(u, 0.5), Error);
}

TEST_CASE("resample pads and truncates without changing the function") {
  Grid g = unit_interval(16);
  auto u = Field::from_function(g, [](auto x) { return std::cos(pi * x[0]) + 0.2 * std::cos(5 * pi * x[0]); });
  Grid fine = g.scaled(1.5);
  CHECK(fine.points(0) == 24);
  Field uf = from_spectral(resample(to_spectral(u), fine));
  for (int j = 0; j < fine.points(0); ++j) {
    const double x = fine.node(0, j);
    CHECK(uf[j] == doctest::Approx(std::cos(pi * x) + 0.2 * std::cos(5 * pi * x)).epsilon(1e-12));
  }
}
