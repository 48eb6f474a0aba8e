#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nlheat/error.hpp"
#include "nlheat/experiments.hpp"
#include "oracles.hpp"

using namespace nlheat;
using oracle::pi;

namespace {

const CheckResult* check_named(const RunReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return &c;
  return nullptr;
}

int fails(const RunReport& r) { return r.fail_count(); }

}  // namespace

TEST_CASE("threshold amplitude against closed form and quadrature oracle") {
  const Grid g(make_domain(1, {1.0}), {64});
  CHECK(blowup_threshold_amplitude(g, 2.0) == doctest::Approx(4 * pi * pi).epsilon(1e-13));
  // int phi|phi|^{1.5} by composite Gauss-Legendre split at the sign change
  const double root = std::acos(0.5 * (std::sqrt(3.0) - 1.0)) / pi;
  auto odd = [](double x) {
    const double v = std::cos(pi * x) + 0.5 * std::cos(2 * pi * x);
    return v * std::pow(std::abs(v), 1.5);
  };
  const double o = oracle::gauss_legendre(odd, 0, root, 4000) + oracle::gauss_legendre(odd, root, 1, 4000);
  const double want = std::pow(1.25 * pi * pi / o, 2.0);
  CHECK(blowup_threshold_amplitude(g, 1.5) == doctest::Approx(want).epsilon(1e-10));
  // length scaling: a*(L) = a*(1) / L^{2/(p-1)}
  const Grid g2(make_domain(1, {2.0}), {64});
  CHECK(blowup_threshold_amplitude(g2, 2.0) == doctest::Approx(pi * pi).epsilon(1e-13));
  CHECK_THROWS_AS(blowup_threshold_amplitude(g, 1.0), Error);
}

TEST_CASE("the seed changes energy sign at the threshold") {
  const Grid g(make_domain(1, {1.0}), {256});
  const double a = blowup_threshold_amplitude(g, 2.0);
  const Field phi = blowup_seed_profile(g);
  CHECK(energy(1.01 * a * phi, 2.0) < 0.0);
  CHECK(energy(0.99 * a * phi, 2.0) > 0.0);
}

TEST_CASE("blow-up below the threshold: hypotheses unmet, run completes") {
  ExperimentConfig c = default_config(ExperimentKind::BlowupCriterion);
  c.points = {128};
  c.amplitude_factor = 0.5;
  c.solver.t_end = 0.2;
  const auto out = run_experiment(c);
  const auto* h = check_named(out.report, "criterion_hypotheses");
  REQUIRE(h);
  CHECK(h->status == CheckStatus::NotApplicable);
  CHECK(h->detail.find("criterion hypotheses unmet") != std::string::npos);
  const auto* o = check_named(out.report, "outcome");
  REQUIRE(o);
  CHECK(o->status == CheckStatus::Pass);
  CHECK(fails(out.report) == 0);
}

TEST_CASE("blow-up run on a small grid: every monitor passes") {
  ExperimentConfig c = default_config(ExperimentKind::BlowupCriterion);
  c.points = {128};
  const auto out = run_experiment(c);
  CHECK(fails(out.report) == 0);
  const auto* b = check_named(out.report, "outcome_blowup");
  REQUIRE(b);
  CHECK(b->status == CheckStatus::Pass);
  CHECK(b->measured == doctest::Approx(0.01346).epsilon(0.02));
  CHECK(check_named(out.report, "F_identity")->status == CheckStatus::Pass);
  CHECK(check_named(out.report, "blowup_time_grid_stability")->status == CheckStatus::Pass);
  REQUIRE(out.files.size() == 2);
  CHECK(out.files[0].name == "trajectory.csv");
  CHECK(out.files[0].content.rfind("t,E,F,linf,umin,lp,grad2,dF_dt_rhs,dt\n", 0) == 0);
  CHECK(out.files[0].content.find("#outcome=BlowUp") != std::string::npos);
}

TEST_CASE("simulate: determinism and the F identity switch") {
  ExperimentConfig c = default_config(ExperimentKind::Simulate);
  c.points = {64};
  c.seeds = {3, 4};
  c.amplitude = 4.0;
  c.solver.t_end = 0.02;
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  REQUIRE(a.files.size() == 2);
  for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].content == b.files[i].content);
  CHECK(check_named(a.report, "F_identity_seed3")->status == CheckStatus::NotApplicable);
  c.solver.dt_init = c.solver.dt_min = c.solver.dt_max = 1e-4;
  const auto f = run_experiment(c);
  CHECK(check_named(f.report, "F_identity_seed3")->status == CheckStatus::Pass);
  CHECK(fails(f.report) == 0);
}

TEST_CASE("decay: zero data completes trivially") {
  ExperimentConfig c = default_config(ExperimentKind::SmallDataDecay);
  c.points = {32};
  c.amplitude = 0.0;
  const auto out = run_experiment(c);
  CHECK(fails(out.report) == 0);
  CHECK(check_named(out.report, "outcome_completed_seed1")->status == CheckStatus::Pass);
  CHECK(check_named(out.report, "zero_data_stays_zero_seed1")->status == CheckStatus::Pass);
}

TEST_CASE("decay at rho_r: rate near the linear rate, bound holds") {
  ExperimentConfig c = default_config(ExperimentKind::SmallDataDecay);
  c.points = {64};
  const auto out = run_experiment(c);
  CHECK(fails(out.report) == 0);
  const auto* r = check_named(out.report, "decay_rate_seed1");
  REQUIRE(r);
  CHECK(r->measured >= pi * pi / 2 - 0.05);
  CHECK(r->measured == doctest::Approx(pi * pi).epsilon(1e-3));
  for (const char* t : {"1", "2", "5"})
    CHECK(check_named(out.report, std::string("decay_bound_t") + t + "_seed1")->status == CheckStatus::Pass);
}

TEST_CASE("kernel report is key-value text") {
  ExperimentConfig c = default_config(ExperimentKind::KernelConstants);
  c.random_rectangles = 2;
  c.per_decade = 8;
  c.lattice = 4;
  const auto out = run_experiment(c);
  CHECK(fails(out.report) == 0);
  REQUIRE(out.files.size() == 2);
  const std::string& kv = out.files[0].content;
  for (const char* key : {"lambda1=", "H=", "lambda1_star=", "rho_r[2]=", "rho_r[3]=", "grid_times=", "grid_points="})
    CHECK(kv.find(std::string("\n") + key) != std::string::npos);
  std::istringstream in(kv);
  std::string line;
  while (std::getline(in, line)) CHECK(line.find('=') != std::string::npos);
}

TEST_CASE("lplq suite has no violations") {
  ExperimentConfig c = default_config(ExperimentKind::LpLqSuite);
  c.points = {64};
  c.lplq_fields = 5;
  c.holder_fields = 5;
  const auto out = run_experiment(c);
  CHECK(out.report.checks.size() == 6);
  CHECK(fails(out.report) == 0);
}

TEST_CASE("small theta sweep writes sweep.csv and one field per theta") {
  ExperimentConfig c = default_config(ExperimentKind::ThetaSweep);
  c.points = {512};
  c.thetas = {1e-3, 4e-4};
  c.identity_fields = 5;
  const auto out = run_experiment(c);
  CHECK(fails(out.report) == 0);
  REQUIRE(out.files.size() == 3);
  CHECK(out.files[0].name == "sweep.csv");
  CHECK(out.files[0].content.rfind("theta,eps,I_theta,ratio,iters,feas_mean,feas_norm,feas_floor,tv_G\n", 0) == 0);
  CHECK(out.files[1].name == "minimizer_0.csv");
  CHECK(check_named(out.report, "mobility_constant")->status == CheckStatus::Pass);
}

TEST_CASE("scaling check in 2-D") {
  ExperimentConfig c = default_config(ExperimentKind::ScalingCheck);
  c.dim = 2;
  c.lengths = {1.0, 0.6};
  c.points = {24, 16};
  const auto out = run_experiment(c);
  CHECK(fails(out.report) == 0);
}

TEST_CASE("verify manifest covers every library module with unique ids") {
  const auto m = verify_manifest();
  std::set<std::string> ids, modules;
  for (const auto& e : m) {
    CHECK(ids.insert(e.id).second);
    modules.insert(e.module);
  }
  CHECK(modules == std::set<std::string>{"domain_spectral", "heat_kernel", "nonlocal_solver", "gamma_minimizer"});
}

TEST_CASE("verify passes; fault injection fails exactly the mean checks") {
  ExperimentConfig c = default_config(ExperimentKind::Verify);
  const auto ok = run_experiment(c);
  CHECK(fails(ok.report) == 0);
  // every manifest entry produced a check
  for (const auto& e : verify_manifest()) {
    bool seen = false;
    for (const auto& ch : ok.report.checks) seen = seen || ch.name.rfind(e.id, 0) == 0;
    CHECK_MESSAGE(seen, e.id);
  }
  c.fault = "skip_mode0_zeroing";
  const auto bad = run_experiment(c);
  CHECK(fails(bad.report) > 0);
  for (const auto& ch : bad.report.checks) {
    if (ch.status == CheckStatus::Fail) CHECK(ch.anchor == "mean-conserved");
  }
}

TEST_CASE("write_outputs creates the directory and report.txt") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path("test_experiments_out") / "nested";
  fs::remove_all("test_experiments_out");
  ExperimentOutput out;
  out.report.name = "x";
  out.report.add(make_check("a", true, 1.0, 1.0, 0.0, "anchor-token"));
  out.files.push_back({"f.csv", "a,b\n1,2\n"});
  write_outputs(out, dir.string());
  std::ifstream r(dir / "report.txt");
  std::string line;
  std::getline(r, line);
  CHECK(line == "# report x");
  std::getline(r, line);
  CHECK(line == "a pass 1 1 0 anchor-token");
  CHECK(fs::exists(dir / "f.csv"));
  fs::remove_all("test_experiments_out");
}

TEST_CASE("field_csv lists node coordinates") {
  const Grid g(make_domain(2, {1.0, 2.0}), {4, 4});
  std::vector<double> v(16);
  for (int i = 0; i < 16; ++i) v[i] = i;
  const std::string csv = field_csv(Field(g, v));
  CHECK(csv.rfind("x,y,v\n0.125,0.25,0\n0.125,0.75,1\n", 0) == 0);
  CHECK(csv.size() - csv.rfind("0.875,1.75,15\n") == 14);
  CHECK(format_number(0.1) == "0.10000000000000001");
}
