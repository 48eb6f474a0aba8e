// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nlheat/error.hpp"
#include "nlheat/experiments.hpp"
#include "nlheat/heat_kernel.hpp"
#include "nlheat/random_field.hpp"
#include "nlheat/solver.hpp"

using namespace nlheat;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

// Every non-failing check of a report, listing the ones that failed.
Verdict all_pass(const RunReport& r) {
  Verdict v;
  std::ostringstream os;
  int n = 0;
  for (const auto& c : r.checks) {
    if (c.status == CheckStatus::Fail) {
      v.ok = false;
      os << ' ' << c.name << "=" << c.measured;
    }
    n += c.status == CheckStatus::Pass;
  }
  v.detail = std::to_string(n) + " checks passed" + (v.ok ? "" : ", failed:" + os.str());
  return v;
}

// Trajectories kept for criterion 4.
std::vector<std::vector<Diagnostics>> g_runs;

Verdict conservation_and_decay() {
  Verdict v;
  int bad = 0;
  double worst_mode0 = 0.0, worst_inc = -1e300;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const double p = seed % 2 ? 2.0 : 1.5;
    const Grid g = seed % 4 < 2 ? Grid(make_domain(1, {1.0}), {128}) : Grid(make_domain(2, {1.0, 0.7}), {32, 24});
    SolverConfig cfg;
    cfg.p = p;
    cfg.t_end = 0.05;
    const auto r = simulate(random_field_with_linf(g, seed, 3.0 + seed, 8), cfg);
    g_runs.push_back(r.trajectory);
    const auto m = monitor_mean_conservation(r);
    const auto e = monitor_energy_decay(r.trajectory);
    worst_mode0 = std::max(worst_mode0, m.measured);
    worst_inc = std::max(worst_inc, e.measured / e.tol);
    bad += m.status != CheckStatus::Pass || e.status != CheckStatus::Pass;
  }
  v.ok = bad == 0;
  std::ostringstream os;
  os << "20 runs, max |c0| = " << worst_mode0 << ", worst dE / tol = " << worst_inc;
  v.detail = os.str();
  return v;
}

Verdict F_identity_and_growth() {
  Verdict v;
  int bad = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const double p = seed % 2 ? 2.0 : 1.5;
    const Grid g = seed > 3 ? Grid(make_domain(2, {1.0, 0.7}), {32, 32}) : Grid(make_domain(1, {1.0}), {128});
    SolverConfig cfg;
    cfg.p = p;
    cfg.dt_init = cfg.dt_min = cfg.dt_max = 1e-4;
    cfg.t_end = 0.03;
    cfg.step_scheme = StepScheme::ETD2;
    const auto r = simulate(random_field_with_linf(g, seed, 10.0, 4), cfg);
    g_runs.push_back(r.trajectory);
    const auto f = monitor_F_identity(r.trajectory, p);
    worst = std::max(worst, f.measured);
    bad += f.status != CheckStatus::Pass;
  }
  double lower = 1e300;
  for (double p : {2.0, 1.5}) {
    const Grid g(make_domain(1, {1.0}), {512});
    const Field u0 = 2.0 * blowup_threshold_amplitude(g, p) * blowup_seed_profile(g);
    const auto r = simulate(u0, blowup_solver_defaults(p));
    g_runs.push_back(r.trajectory);
    const auto e = monitor_F_exponential_lower(r.trajectory, p, g.domain().lambda1());
    lower = std::min(lower, e.measured);
    bad += e.status != CheckStatus::Pass;
  }
  v.ok = bad == 0;
  std::ostringstream os;
  os << "max relative identity error " << worst << " (tol 1e-3, dt 1e-4); min F/(F0 exp) " << lower;
  v.detail = os.str();
  return v;
}

Verdict blowup_criterion() {
  Verdict v;
  std::ostringstream os;
  for (double p : {2.0, 1.5}) {
    ExperimentConfig cfg = default_config(ExperimentKind::BlowupCriterion);
    cfg.solver = blowup_solver_defaults(p);
    const auto out = run_experiment(cfg);
    const Verdict a = all_pass(out.report);
    double T = 0, rel = 0, g = 0;
    bool blew = false;
    for (const auto& c : out.report.checks) {
      if (c.name == "outcome_blowup") T = c.measured, blew = c.status == CheckStatus::Pass;
      if (c.name == "blowup_time_grid_stability") rel = c.measured;
      if (c.name == "growth_exponent") g = c.measured;
    }
    v.ok = v.ok && a.ok && blew;
    os << "p=" << p << ": T=" << T << " dT/T=" << rel << " exponent=" << g << " (>= " << (p + 3) / 4 - 0.15
       << "); ";
  }
  v.detail = os.str();
  return v;
}

Verdict L2_bound() {
  Verdict v;
  int bad = 0;
  double worst = -1e300;
  for (const auto& t : g_runs) {
    const auto c = monitor_L2_bound(t);
    worst = std::max(worst, c.measured);
    bad += c.status != CheckStatus::Pass;
  }
  v.ok = bad == 0 && !g_runs.empty();
  std::ostringstream os;
  os << g_runs.size() << " runs, max (F - bound)/bound = " << worst;
  v.detail = os.str();
  return v;
}

Verdict from_experiment(ExperimentKind kind, double max_seconds = 600.0) {
  const auto out = run_experiment(default_config(kind));
  Verdict v = all_pass(out.report);
  v.ok = v.ok && out.report.wall_seconds <= max_seconds;
  v.detail += ", " + std::to_string(out.report.wall_seconds).substr(0, 5) + " s";
  return v;
}

Verdict kernel_constants() {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v = from_experiment(ExperimentKind::KernelConstants);
  // lower bound on 2-D domains as well
  for (const Domain& d : {make_domain(2, {1.0, 1.0}), make_domain(2, {2.0, 0.5})}) {
    const double h = estimate_constants(d).H;
    v.ok = v.ok && h >= 1.0 / (4.0 * kPi);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  v.ok = v.ok && secs <= 30.0;
  return v;
}

Verdict energy_positivity() {
  Verdict v;
  const Grid g(make_domain(1, {1.0}), {128});
  const Grid fine = nonlinear_grid(g, 2.0, true);
  const double lam = g.domain().lambda1();
  Rng rng(77);
  int bad = 0, applicable = 0;
  double worst = 1e300;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Field u = random_mean_zero_field(g, seed);
    // the padded grid does not contain the base nodes; bound both
    const double peak = std::max(linf_norm(u), linf_norm(from_spectral(resample(to_spectral(u), fine))));
    const double target = seed % 10 == 0 ? 1.5 * lam : 1.5 * lam * (0.05 + 0.95 * rng.uniform());
    u *= target / peak;
    const auto c = energy_positivity_smalldata_check(u);
    applicable += c.status != CheckStatus::NotApplicable;
    bad += c.status != CheckStatus::Pass;
    worst = std::min(worst, c.measured);
  }
  v.ok = bad == 0 && applicable == 100;
  std::ostringstream os;
  os << "100 fields up to 1.5 lambda1, min E = " << worst;
  v.detail = os.str();
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"1 conservation and energy decay", conservation_and_decay},
      {"2 F derivative identity and exponential growth", F_identity_and_growth},
      {"3 blow-up criterion", blowup_criterion},
      {"4 L2 bound with energy bounded below", L2_bound},
      {"5 heat-kernel constants", kernel_constants},
      {"6 semigroup estimates", [] { return from_experiment(ExperimentKind::LpLqSuite); }},
      {"7 small-data global existence", [] { return from_experiment(ExperimentKind::SmallDataDecay); }},
      {"8 sqrt-theta asymptotics", [] { return from_experiment(ExperimentKind::ThetaSweep, 300.0); }},
      {"9 scaling covariance", [] { return from_experiment(ExperimentKind::ScalingCheck); }},
      {"10 small-data energy positivity", energy_positivity},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const Error& e) {
      v = {false, std::string(errc_name(e.code())) + ": " + e.what()};
    }
    failures += !v.ok;
    std::printf("%s criterion %s: %s\n", v.ok ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
