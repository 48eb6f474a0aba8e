#include <doctest.h>

#include <cmath>

#include "nlheat/error.hpp"
#include "nlheat/heat_kernel.hpp"
#include "nlheat/random_field.hpp"
#include "nlheat/solver.hpp"
#include "oracles.hpp"

using namespace nlheat;
using oracle::pi;

namespace {

Grid unit(int m) { return Grid(make_domain(1, {1.0}), {m}); }

double seed_phi(double x) { return std::cos(pi * x) + 0.5 * std::cos(2 * pi * x); }

// Threshold amplitude of the two-mode seed: a^2/2 int|phi'|^2 = a^{p+1}/(p+1) int phi|phi|^p.
double seed_threshold(double p) {
  const double grad = oracle::gauss_legendre([](double x) {
    const double d = -pi * std::sin(pi * x) - pi * std::sin(2 * pi * x);
    return d * d;
  }, 0, 1);
  const double odd = oracle::gauss_legendre([p](double x) {
    const double v = seed_phi(x);
    return v * std::pow(std::abs(v), p);
  }, 0, 1, 20000);
  return std::pow((p + 1.0) * 0.5 * grad / odd, 1.0 / (p - 1.0));
}

SolverConfig blowup_config(double p, double u_max) {
  SolverConfig c;
  c.p = p;
  c.cfl_c = 0.02;
  c.u_max = u_max;
  c.t_end = 1.0;
  c.dt_min = c.cfl_c / (2.0 * p * std::pow(2.0 * u_max, p - 1.0));
  c.dt_init = 1e-4;
  c.dt_max = 1e-3;
  return c;
}

SolverConfig fixed_dt(double p, double dt, double t_end) {
  SolverConfig c;
  c.p = p;
  c.dt_init = c.dt_min = c.dt_max = dt;
  c.t_end = t_end;
  return c;
}

double coeff_dist(const SpectralCoeffs& a, const SpectralCoeffs& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("seed quadrature oracle values") {
  CHECK(oracle::gauss_legendre([](double x) { return std::pow(seed_phi(x), 3); }, 0, 1) ==
        doctest::Approx(3.0 / 8.0).epsilon(1e-13));
  CHECK(seed_threshold(2.0) == doctest::Approx(4 * pi * pi).epsilon(1e-12));
}

TEST_CASE("nonlinear_term") {
  Grid g = unit(64);
  auto z = nonlinear_term(Field::zeros(g), 2.0);
  CHECK(linf_norm(z) == 0.0);
  auto c = Field::from_function(g, [](auto x) { return std::cos(pi * x[0]); });
  auto n = nonlinear_term(c, 2.0);
  for (std::size_t j = 0; j < g.size(); ++j)
    CHECK(n[j] == doctest::Approx(0.5 * std::cos(2 * pi * g.node(0, static_cast<int>(j)))).epsilon(1e-13));
  for (double p : {1.5, 2.0, 3.0}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Grid g2(make_domain(2, {1.0, 0.6}), {32, 20});
      Field u = random_field_with_linf(g2, seed, 3.0);
      CHECK(nonlinear_coeffs(to_spectral(u), p, nonlinear_grid(g2, p, true))[0] == 0.0);
      CHECK(std::abs(mean(nonlinear_term(u, p))) < 1e-14 * linf_norm(nonlinear_term(u, p)));
    }
  }
  CHECK(nonlinear_grid(g, 2.0, true).points(0) == 96);
  CHECK(nonlinear_grid(g, 1.5, true).points(0) == 128);
  CHECK(nonlinear_grid(g, 2.0, false).points(0) == 64);
}

TEST_CASE("energy") {
  Grid g = unit(64);
  CHECK(energy(Field::zeros(g), 2.0) == 0.0);
  CHECK(oracle::gauss_legendre([](double x) { return std::pow(std::cos(pi * x), 3); }, 0, 1) ==
        doctest::Approx(0.0).epsilon(1e-14).scale(1.0));
  for (double a : {0.5, 3.0, 40.0}) {
    auto u = Field::from_function(g, [a](auto x) { return a * std::cos(pi * x[0]); });
    CHECK(energy(u, 2.0) == doctest::Approx(a * a * pi * pi / 4).epsilon(1e-12));
  }
  // E(-u) - E(u) = 2/(p+1) int u|u|^p; with the seed and p = 2 that is 2/3 * 3/8.
  auto u = Field::from_function(g, [](auto x) { return seed_phi(x[0]); });
  CHECK(energy(-1.0 * u, 2.0) - energy(u, 2.0) == doctest::Approx(0.25).epsilon(1e-12));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Field r = random_field_with_linf(g, seed, 2.0);
    const double p = 1.5;
    const Grid fine = nonlinear_grid(g, p, true);
    Field rf = from_spectral(resample(to_spectral(r), fine));
    double odd = 0.0;
    for (double v : rf.values()) odd += v * std::pow(std::abs(v), p);
    odd *= fine.cell_volume();
    CHECK(energy(-1.0 * r, p) - energy(r, p) == doctest::Approx(2.0 / (p + 1.0) * odd).epsilon(1e-12));
  }
}

TEST_CASE("step: fixed point, linear limit and exact conservation") {
  Grid g = unit(64);
  SolverConfig cfg = fixed_dt(2.0, 1e-3, 1.0);
  SolverState z{0.0, SpectralCoeffs::zeros(g), 0, 0.0};
  SolverState z1 = step(z, cfg);
  CHECK(z1.t == doctest::Approx(1e-3));
  for (double v : z1.coeffs.coeffs()) CHECK(v == 0.0);

  Field tiny = random_field_with_linf(g, 3, 1e-8);
  SolverState s{0.0, to_spectral(tiny), 0, 0.0};
  s.coeffs[0] = 0.0;
  for (auto scheme : {StepScheme::IMEX1, StepScheme::ETD2}) {
    cfg.step_scheme = scheme;
    SolverState s1 = step(s, cfg);
    const SpectralCoeffs lin = linear_heat_evolve(s.coeffs, 1e-3);
    CHECK(coeff_dist(s1.coeffs, lin) <= 1e-16 * 1e-3 * 10.0);
    CHECK(s1.coeffs[0] == 0.0);
  }

  auto single = Field::from_function(g, [](auto x) { return 0.3 * std::cos(pi * x[0]); });
  SolverState m{0.0, to_spectral(single), 0, 0.0};
  for (int i = 0; i < 20; ++i) {
    m = step(m, cfg);
    CHECK(m.coeffs[0] == 0.0);
  }
}

TEST_CASE("simulate: zero data and the mean precondition") {
  Grid g = unit(32);
  SolverConfig cfg = fixed_dt(2.0, 1e-2, 0.1);
  auto r = simulate(Field::zeros(g), cfg);
  CHECK(r.outcome.kind == OutcomeKind::Completed);
  for (const auto& d : r.trajectory) {
    CHECK(d.E == 0.0);
    CHECK(d.F == 0.0);
    CHECK(d.linf == 0.0);
  }
  CHECK(r.trajectory.back().t >= 0.1);
  CHECK(monitor_energy_decay(r.trajectory).status == CheckStatus::Pass);
  CHECK(monitor_L2_bound(r.trajectory).status == CheckStatus::Pass);
  CHECK(monitor_F_identity(r.trajectory, 2.0).status == CheckStatus::Pass);
  CHECK_THROWS_AS(simulate(Field::constant(g, 0.1), cfg), Error);
  SolverConfig bad = cfg;
  bad.p = 0.5;
  CHECK_THROWS_AS(simulate(Field::zeros(g), bad), Error);
}

TEST_CASE("checkpoints are hit exactly and the trajectory ends at t_end") {
  Grid g = unit(32);
  SolverConfig cfg;
  cfg.t_end = 0.3;
  cfg.dt_max = 0.007;
  cfg.checkpoints = {0.1, 0.25};
  auto r = simulate(random_field_with_linf(g, 1, 1.0), cfg);
  REQUIRE(r.snapshots.size() == 2);
  CHECK(r.snapshots[0].t == 0.1);
  CHECK(r.snapshots[1].t == 0.25);
  CHECK(r.trajectory.back().t == 0.3);
}

TEST_CASE("blow-up seed, p = 2: BlowUp, monitors, grid stability and growth exponent") {
  const double p = 2.0, a = 2.0 * seed_threshold(p);
  double T[2];
  int i = 0;
  for (int m : {512, 1024}) {
    SolverConfig cfg = blowup_config(p, 1e3);
    if (m == 1024) cfg.dt_min *= 0.5;
    Field u0 = Field::from_function(unit(m), [a](auto x) { return a * seed_phi(x[0]); });
    CHECK(energy(u0, p) < 0.0);
    auto r = simulate(u0, cfg);
    REQUIRE(r.outcome.kind == OutcomeKind::BlowUp);
    REQUIRE(r.outcome.T_estimate);
    T[i++] = *r.outcome.T_estimate;
    CHECK(monitor_energy_decay(r.trajectory).status == CheckStatus::Pass);
    CHECK(monitor_mean_conservation(r).status == CheckStatus::Pass);
    CHECK(monitor_L2_bound(r.trajectory).status == CheckStatus::Pass);
    CHECK(monitor_F_exponential_lower(r.trajectory, p, pi * pi).status == CheckStatus::Pass);
    const auto h = min_principle_hypotheses(u0, p);
    CHECK(h.all_l2());
    CHECK(monitor_min_principle(r.trajectory, h).status == CheckStatus::Pass);
    CHECK(fit_growth_exponent(r.trajectory) >= (p + 3) / 4 - 0.15);
    CHECK(r.trajectory.back().E < -100.0);
  }
  CHECK(std::abs(T[1] - T[0]) <= 0.1 * T[0]);
}

TEST_CASE("blow-up seed, p = 1.5") {
  const double p = 1.5, a = 2.0 * seed_threshold(p);
  Field u0 = Field::from_function(unit(512), [a](auto x) { return a * seed_phi(x[0]); });
  auto r = simulate(u0, blowup_config(p, 1e5));
  REQUIRE(r.outcome.kind == OutcomeKind::BlowUp);
  const auto h = min_principle_hypotheses(u0, p);
  CHECK(monitor_min_principle(r.trajectory, h).status == CheckStatus::Pass);
  // The seed dips below -||u0||_{1.5}, so the L^p variant has nothing to check here.
  CHECK_FALSE(h.floor_lp);
  CHECK(monitor_min_principle_lp(r.trajectory, h).status == CheckStatus::NotApplicable);
  CHECK(fit_growth_exponent(r.trajectory) >= (p + 3) / 4 - 0.15);
}

TEST_CASE("L^p running-sup floor on the p = 2 seed") {
  const double a = 2.0 * seed_threshold(2.0);
  Field u0 = Field::from_function(unit(512), [a](auto x) { return a * seed_phi(x[0]); });
  const auto h = min_principle_hypotheses(u0, 2.0);
  REQUIRE(h.floor_lp);
  auto r = simulate(u0, blowup_config(2.0, 1e3));
  CHECK(monitor_min_principle_lp(r.trajectory, h).status == CheckStatus::Pass);
}

TEST_CASE("below-threshold seed completes") {
  const double a = 0.5 * seed_threshold(2.0);
  Field u0 = Field::from_function(unit(128), [a](auto x) { return a * seed_phi(x[0]); });
  CHECK(energy(u0, 2.0) > 0.0);
  SolverConfig cfg = blowup_config(2.0, 1e3);
  cfg.t_end = 0.2;
  CHECK(simulate(u0, cfg).outcome.kind == OutcomeKind::Completed);
}

TEST_CASE("data below the global threshold decays at the linear rate") {
  const KernelConstants kc = estimate_constants(make_domain(1, {1.0}));
  const double rho = rho_global(kc);
  Field u0 = random_field_with_linf(unit(64), 5, rho);
  SolverConfig cfg;
  cfg.t_end = 2.0;
  cfg.dt_max = 1e-2;
  cfg.dt_init = 1e-3;
  auto r = simulate(u0, cfg);
  CHECK(r.outcome.kind == OutcomeKind::Completed);
  // log ||u||_inf slope over t in [1, 2]
  double t1 = 0, l1 = 0, t2 = 0, l2 = 0;
  for (const auto& d : r.trajectory) {
    if (t1 == 0 && d.t >= 1.0) t1 = d.t, l1 = std::log(d.linf);
    t2 = d.t, l2 = std::log(d.linf);
  }
  CHECK(-(l2 - l1) / (t2 - t1) == doctest::Approx(pi * pi).epsilon(1e-3));
}

TEST_CASE("energy decay and conservation on random runs (property)") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const double p = seed % 2 ? 2.0 : 1.5;
    Grid g = seed % 3 == 0 ? Grid(make_domain(2, {1.0, 0.7}), {32, 24}) : unit(128);
    Field u0 = random_field_with_linf(g, seed, 5.0 + seed, 8);
    SolverConfig cfg;
    cfg.p = p;
    cfg.t_end = 0.05;
    auto r = simulate(u0, cfg);
    CHECK(monitor_energy_decay(r.trajectory).status == CheckStatus::Pass);
    CHECK(monitor_mean_conservation(r).status == CheckStatus::Pass);
    CHECK(monitor_L2_bound(r.trajectory).status == CheckStatus::Pass);
  }
}

TEST_CASE("linear regime: energy monotone to 1e-12 and F identity to 1e-6") {
  auto u0 = Field::from_function(unit(64), [](auto x) { return 1e-6 * std::cos(pi * x[0]); });
  auto r = simulate(u0, fixed_dt(2.0, 1e-4, 0.02));
  for (std::size_t i = 1; i < r.trajectory.size(); ++i) CHECK(r.trajectory[i].E <= r.trajectory[i - 1].E + 1e-12);
  const auto f = monitor_F_identity(r.trajectory, 2.0, 1e-6);
  CHECK(f.status == CheckStatus::Pass);
}

TEST_CASE("F identity on smooth runs with ETD2") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const double p = seed % 2 ? 2.0 : 1.5;
    Grid g = seed > 2 ? Grid(make_domain(2, {1.0, 0.7}), {32, 32}) : unit(128);
    SolverConfig cfg = fixed_dt(p, 1e-4, 0.03);
    cfg.step_scheme = StepScheme::ETD2;
    auto r = simulate(random_field_with_linf(g, seed, 10.0, 4), cfg);
    CHECK(monitor_F_identity(r.trajectory, p).status == CheckStatus::Pass);
  }
}

TEST_CASE("min principle is not applicable when hypotheses fail") {
  Field u0 = random_field_with_linf(unit(64), 2, 1.0);
  const auto h = min_principle_hypotheses(u0, 2.0);
  CHECK_FALSE(h.nonpositive_energy);
  auto r = simulate(u0, fixed_dt(2.0, 1e-3, 0.01));
  CHECK(monitor_min_principle(r.trajectory, h).status == CheckStatus::NotApplicable);
}

TEST_CASE("infimum is nondecreasing inside the window min u < -||u||_p") {
  Grid g = unit(256);
  auto spike = Field::from_function(g, [](auto x) { return -30.0 * std::exp(-std::pow((x[0] - 0.5) / 0.05, 2)); });
  Field u0 = spike - Field::constant(g, mean(spike));
  CHECK(min_value(u0) < -lp_norm(u0, 2.0));
  auto r = simulate(u0, fixed_dt(2.0, 1e-5, 0.02));
  CHECK(monitor_inf_monotone(r.trajectory).check.status == CheckStatus::Pass);

  // Negative-energy data that starts inside the window: the growing positive part
  // eventually pulls ||u||_p past |min u| and the window is left.
  const double a = 4.0 * seed_threshold(2.0);
  auto f = Field::from_function(unit(512), [a](auto x) {
    return a * seed_phi(x[0]) - 100.0 * std::exp(-std::pow((x[0] - 0.5) / 0.05, 2));
  });
  Field second = f - Field::constant(f.grid(), mean(f));
  CHECK(energy(second, 2.0) < 0.0);
  CHECK(min_value(second) < -lp_norm(second, 2.0));
  auto rb = simulate(second, blowup_config(2.0, 1e3));
  auto mb = monitor_inf_monotone(rb.trajectory);
  CHECK(mb.check.status == CheckStatus::Pass);
  CHECK(mb.exit_time.has_value());

  auto never = simulate(Field::from_function(g, [](auto x) { return 0.1 * seed_phi(x[0]); }),
                        fixed_dt(2.0, 1e-4, 1e-3));
  CHECK(monitor_inf_monotone(never.trajectory).check.status == CheckStatus::NotApplicable);
}

TEST_CASE("refinement: measured convergence order within 0.3 of nominal") {
  Field u0 = random_field_with_linf(unit(64), 11, 10.0, 6);
  for (auto [scheme, order] : {std::pair{StepScheme::IMEX1, 1.0}, {StepScheme::ETD2, 2.0}}) {
    std::vector<SpectralCoeffs> fin;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
      SolverConfig cfg = fixed_dt(2.0, dt, 0.05);
      cfg.step_scheme = scheme;
      fin.push_back(simulate(u0, cfg).final_state.coeffs);
    }
    const double measured = std::log2(coeff_dist(fin[0], fin[1]) / coeff_dist(fin[1], fin[2]));
    CHECK(measured == doctest::Approx(order).epsilon(0.3 / order));
  }
}

TEST_CASE("scaling covariance") {
  Field u0 = random_field_with_linf(unit(64), 4, 2.0, 6);
  SolverConfig cfg = fixed_dt(2.0, 1e-4, 0.5);
  auto same = scaling_covariance_check(u0, 1.0, cfg, {0.1, 0.5});
  CHECK(same.smooth.status == CheckStatus::Pass);
  CHECK(same.smooth.measured == 0.0);
  auto two = scaling_covariance_check(u0, 2.0, cfg, {0.1, 0.5});
  CHECK(two.smooth.status == CheckStatus::Pass);
  CHECK(two.discrepancies.size() == 2);

  const double a = 2.0 * seed_threshold(2.0);
  Field seed = Field::from_function(unit(512), [a](auto x) { return a * seed_phi(x[0]); });
  auto bu = scaling_covariance_check(seed, 2.0, blowup_config(2.0, 1e3), {});
  CHECK(bu.blowup.status == CheckStatus::Pass);
}

TEST_CASE("energy positivity below 1.5 lambda1") {
  Grid g = unit(128);
  const Grid fine = nonlinear_grid(g, 2.0, true);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Field u = random_mean_zero_field(g, seed);
    const double peak = linf_norm(from_spectral(resample(to_spectral(u), fine)));
    u *= 1.4 * pi * pi / peak;
    CHECK(energy_positivity_smalldata_check(u).status == CheckStatus::Pass);
  }
  CHECK(energy_positivity_smalldata_check(Field::zeros(g)).measured == 0.0);
  const double a = 2.0 * seed_threshold(2.0);
  Field s = Field::from_function(g, [a](auto x) { return a * seed_phi(x[0]); });
  CHECK(energy(s, 2.0) < 0.0);
  CHECK(energy_positivity_smalldata_check(s).status == CheckStatus::NotApplicable);
}
