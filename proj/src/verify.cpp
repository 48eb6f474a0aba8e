#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <iterator>
#include <tuple>

#include "nlheat/error.hpp"
#include "nlheat/experiments.hpp"
#include "nlheat/heat_kernel.hpp"
#include "nlheat/random_field.hpp"

namespace nlheat {

namespace {

// One entry per invariant the library modules promise. Adding an entry without
// a case in run_invariant is a compile error (-Werror=switch).
enum class Invariant {
  TransformRoundTrip,
  Parseval,
  ZeroModeMean,
  Poincare,
  KernelSymmetry,
  KernelNormalization,
  KernelSemigroup,
  KernelDecayMonotone,
  KernelImages,
  HRefinement,
  HLowerBound,
  HDilation,
  Isoperimetric,
  ThresholdDilation,
  LpLq,
  Holder,
  MeanConservation,
  EnergyDecay,
  FIdentity,
  FExponentialLower,
  MinPrinciple,
  InfMonotone,
  L2Bound,
  RefinementOrder,
  BlowupGridStability,
  ScalingCovariance,
  EnergyPositivity,
  MobilityConstant,
  ProjectionFeasibility,
  RewriteIdentity,
  Modica,
  MinimizerDescent,
  ProfileSharpening,
  Count,
};

constexpr CoverageEntry kManifest[] = {
    {"transform_round_trip", "domain_spectral"},
    {"parseval", "domain_spectral"},
    {"zero_mode_mean", "domain_spectral"},
    {"poincare", "domain_spectral"},
    {"kernel_symmetry", "heat_kernel"},
    {"kernel_normalization", "heat_kernel"},
    {"kernel_semigroup", "heat_kernel"},
    {"kernel_decay_monotone", "heat_kernel"},
    {"kernel_images", "heat_kernel"},
    {"H_refinement", "heat_kernel"},
    {"H_lower_bound", "heat_kernel"},
    {"H_dilation", "heat_kernel"},
    {"isoperimetric", "heat_kernel"},
    {"threshold_dilation", "heat_kernel"},
    {"lplq", "heat_kernel"},
    {"holder", "heat_kernel"},
    {"mean_conservation", "nonlocal_solver"},
    {"energy_decay", "nonlocal_solver"},
    {"F_identity", "nonlocal_solver"},
    {"F_exponential_lower", "nonlocal_solver"},
    {"min_principle", "nonlocal_solver"},
    {"inf_monotone", "nonlocal_solver"},
    {"L2_bound", "nonlocal_solver"},
    {"refinement_order", "nonlocal_solver"},
    {"blowup_grid_stability", "nonlocal_solver"},
    {"scaling_covariance", "nonlocal_solver"},
    {"energy_positivity", "nonlocal_solver"},
    {"mobility_constant", "gamma_minimizer"},
    {"projection_feasibility", "gamma_minimizer"},
    {"rewrite_identity", "gamma_minimizer"},
    {"modica", "gamma_minimizer"},
    {"minimizer_descent", "gamma_minimizer"},
    {"profile_sharpening", "gamma_minimizer"},
};
static_assert(std::size(kManifest) == static_cast<std::size_t>(Invariant::Count),
              "every invariant needs a manifest entry");

// Canned runs shared by the solver invariants.
struct Canned {
  std::vector<SimulationResult> smooth;     // IMEX1, adaptive, random data
  std::vector<double> smooth_p;
  std::vector<SimulationResult> etd2;       // fixed dt 1e-4
  std::vector<double> etd2_p;
  std::vector<SimulationResult> blowup128;  // seed, p = 2 then 1.5
  std::vector<SimulationResult> blowup256;
  std::vector<Field> seeds;
};

struct Ctx {
  const ExperimentConfig& cfg;
  Domain dom;
  Grid grid;         // spectral checks
  Grid run_grid;     // canned solver runs
  Grid unit_grid;    // unit-volume grid for the gamma checks
  std::uint64_t seed;
  bool fault;
  mutable std::optional<Canned> runs;
};

CheckResult named(CheckResult c, const std::string& name) {
  c.name = name;
  return c;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

std::vector<double> random_point(const Domain& d, Rng& rng) {
  std::vector<double> x;
  for (int a = 0; a < d.dim(); ++a) x.push_back(rng.uniform() * d.length(a));
  return x;
}

double kval(const Domain& d, double t, const std::vector<double>& x, const std::vector<double>& y) {
  return kernel_eval(d, t, x, y).value;
}

// Midpoint nodes, exact for the cosine modes a kernel with t >= 0.01 keeps.
Grid quadrature_grid(const Domain& d) { return Grid(d, std::vector<int>(static_cast<std::size_t>(d.dim()), 64)); }

std::vector<double> node_of(const Grid& g, std::size_t i) {
  const auto idx = g.unflatten(i);
  std::vector<double> x;
  for (int a = 0; a < g.dim(); ++a) x.push_back(g.node(a, idx[static_cast<std::size_t>(a)]));
  return x;
}

// 1-D Neumann kernel by the images sum.
double images_1d(double L, double t, double x, double y) {
  double s = 0.0;
  for (int n = -40; n <= 40; ++n) {
    for (double z : {x - y + 2.0 * n * L, x + y + 2.0 * n * L}) s += std::exp(-z * z / (4.0 * t));
  }
  return s / std::sqrt(4.0 * kPi * t);
}

SolverConfig fixed(double p, double dt, double t_end, bool fault) {
  SolverConfig c;
  c.p = p;
  c.dt_init = c.dt_min = c.dt_max = dt;
  c.t_end = t_end;
  c.fault_skip_mode0_zeroing = fault;
  return c;
}

const Canned& canned(const Ctx& c) {
  if (c.runs) return *c.runs;
  Canned k;
  int i = 0;
  for (double p : {2.0, 1.5}) {
    for (int rep = 0; rep < 2; ++rep, ++i) {
      SolverConfig sc;
      sc.p = p;
      sc.t_end = 0.05;
      sc.fault_skip_mode0_zeroing = c.fault;
      const Field u0 = random_field_with_linf(c.run_grid, c.seed + static_cast<std::uint64_t>(i), 5.0 + 3.0 * i, 8);
      k.smooth.push_back(simulate(u0, sc));
      k.smooth_p.push_back(p);
      SolverConfig e = fixed(p, 1e-4, 0.03, c.fault);
      e.step_scheme = StepScheme::ETD2;
      k.etd2.push_back(simulate(random_field_with_linf(c.run_grid, c.seed + 50u + i, 10.0, 4), e));
      k.etd2_p.push_back(p);
    }
  }
  const double L = c.dom.length(0);
  for (double p : {2.0, 1.5}) {
    for (int m : {128, 256}) {
      const Grid g(make_domain(1, {L}), {m});
      const Field u0 = 2.0 * blowup_threshold_amplitude(g, p) * blowup_seed_profile(g);
      SolverConfig sc = blowup_solver_defaults(p);
      sc.fault_skip_mode0_zeroing = c.fault;
      if (m == 256) sc.dt_min *= 0.5;
      (m == 128 ? k.blowup128 : k.blowup256).push_back(simulate(u0, sc));
      if (m == 128) k.seeds.push_back(u0);
    }
  }
  c.runs = std::move(k);
  return *c.runs;
}

std::vector<Field> projected_fields(const Ctx& c, int n) {
  std::vector<Field> out;
  for (int i = 0; i < n; ++i) {
    const Field v = random_field_with_linf(c.unit_grid, c.seed + 200u + static_cast<std::uint64_t>(i),
                                           1.0 + 0.1 * (i % 30), 8);
    out.push_back(project_A(v));
  }
  return out;
}

void run_invariant(Invariant inv, const Ctx& c, RunReport& rep) {
  const std::string id = kManifest[static_cast<std::size_t>(inv)].id;
  const Domain& dom = c.dom;
  const int N = dom.dim();
  switch (inv) {
    case Invariant::TransformRoundTrip: {
      double worst = 0.0;
      for (int i = 0; i < 5; ++i) {
        const Field u = random_field_with_linf(c.grid, c.seed + i, 1.0, 1 << 20);
        const Field back = from_spectral(to_spectral(u));
        for (std::size_t j = 0; j < u.size(); ++j) worst = std::max(worst, std::abs(back[j] - u[j]));
      }
      rep.add(make_check(id, worst <= 1e-12, worst, 0.0, 1e-12, "cosine-transform-inverse", "5 fields, unit sup"));
      break;
    }
    case Invariant::Parseval: {
      double worst = 0.0;
      for (int i = 0; i < 5; ++i) {
        const Field a = random_field_with_linf(c.grid, c.seed + 10u + i, 1.0, 1 << 20);
        const Field b = random_field_with_linf(c.grid, c.seed + 20u + i, 1.0, 1 << 20);
        worst = std::max(worst, rel_diff(inner_product(a, b), spectral_inner(to_spectral(a), to_spectral(b))));
      }
      rep.add(make_check(id, worst <= 1e-12, worst, 0.0, 1e-12, "parseval"));
      break;
    }
    case Invariant::ZeroModeMean: {
      double worst = 0.0;
      for (int i = 0; i < 5; ++i) {
        SpectralCoeffs s = to_spectral(random_field_with_linf(c.grid, c.seed + 30u + i, 1.0, 1 << 20));
        s[0] = 0.0;
        worst = std::max(worst, std::abs(mean(from_spectral(s))));
      }
      rep.add(make_check(id, worst <= 1e-14, worst, 0.0, 1e-14, "mean-conserved"));
      break;
    }
    case Invariant::Poincare: {
      double worst = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 10; ++i) {
        const Field u = random_mean_zero_field(c.grid, c.seed + 40u + i);
        worst = std::min(worst, grad_norm_sq(to_spectral(u)) / (dom.lambda1() * inner_product(u, u)));
      }
      rep.add(make_check(id, worst >= 1.0 - 1e-12, worst, 1.0, 1e-12, "poincare",
                         "min of int|grad u|^2 / (lambda1 int u^2)"));
      break;
    }
    case Invariant::KernelSymmetry: {
      Rng rng(c.seed);
      double worst = 0.0;
      for (int i = 0; i < 10; ++i) {
        const auto x = random_point(dom, rng), y = random_point(dom, rng);
        const double t = std::pow(10.0, -3.0 + 3.0 * rng.uniform());
        const double scale = std::abs(kval(dom, t, x, y)) + std::pow(4.0 * kPi * t, -0.5 * N);
        worst = std::max(worst, std::abs(kval(dom, t, x, y) - kval(dom, t, y, x)) / scale);
      }
      rep.add(make_check(id, worst <= 1e-13, worst, 0.0, 1e-13, "kernel-symmetric",
                         "error over K + (4 pi t)^{-N/2}"));
      break;
    }
    case Invariant::KernelNormalization: {
      const Grid q = quadrature_grid(dom);
      Rng rng(c.seed + 1u);
      double worst = 0.0;
      for (double t : {0.01, 0.1}) {
        const auto x = random_point(dom, rng);
        double mass = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) mass += kval(dom, t, x, node_of(q, j));
        worst = std::max(worst, std::abs(mass * q.cell_volume() - 1.0));
      }
      rep.add(make_check(id, worst <= 1e-12, worst, 0.0, 1e-12, "kernel-unit-mass"));
      break;
    }
    case Invariant::KernelSemigroup: {
      const Grid q = quadrature_grid(dom);
      Rng rng(c.seed + 2u);
      const auto x = random_point(dom, rng), y = random_point(dom, rng);
      const double t = 0.02, s = 0.03;
      double conv = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) {
        const auto z = node_of(q, j);
        conv += kval(dom, t, x, z) * kval(dom, s, z, y);
      }
      const double err = rel_diff(conv * q.cell_volume(), kval(dom, t + s, x, y));
      rep.add(make_check(id, err <= 1e-11, err, 0.0, 1e-11, "kernel-semigroup"));
      break;
    }
    case Invariant::KernelDecayMonotone: {
      Rng rng(c.seed + 3u);
      bool ok = true;
      double worst = -std::numeric_limits<double>::infinity();
      for (int trial = 0; trial < 3; ++trial) {
        const auto x = random_point(dom, rng);
        double prev = std::numeric_limits<double>::infinity();
        for (double t = 1e-3; t < 3.0; t *= 1.3) {
          const double k = kval(dom, t, x, x);
          const double v = std::exp(dom.lambda1() * t) * (k - 1.0 / dom.volume());
          const double slack = std::exp(dom.lambda1() * t) * 8.0 * std::numeric_limits<double>::epsilon() * k;
          const double excess = v - (prev * (1.0 + 1e-12) + slack);
          if (std::isfinite(prev)) worst = std::max(worst, excess);
          if (excess > 0.0) ok = false;
          prev = v;
        }
      }
      rep.add(make_check(id, ok, worst, 0.0, 0.0, "kernel-diagonal-decay",
                         "largest step increase of exp(lambda1 t)(K(t,x,x) - 1/|Omega|) past roundoff"));
      break;
    }
    case Invariant::KernelImages: {
      Rng rng(c.seed + 4u);
      double worst = 0.0;
      for (int i = 0; i < 10; ++i) {
        const auto x = random_point(dom, rng), y = random_point(dom, rng);
        const double t = std::pow(10.0, -3.0 + 2.5 * rng.uniform());
        double ref = 1.0;
        for (int a = 0; a < N; ++a) ref *= images_1d(dom.length(a), t, x[a], y[a]);
        // off-diagonal values underflow at small t; scale by the on-diagonal size
        const double scale = ref + std::pow(4.0 * kPi * t, -0.5 * N);
        worst = std::max(worst, std::abs(kval(dom, t, x, y) - ref) / scale);
      }
      rep.add(make_check(id, worst <= 1e-10, worst, 0.0, 1e-10, "kernel-images",
                         "product of 1-D image sums, error over K + (4 pi t)^{-N/2}"));
      if (N == 1) {
        const double h = estimate_H(dom, default_h_grid(dom)).value;
        const double ref = 1.0 / std::sqrt(kPi);
        rep.add(make_check(id + "_H_interval", std::abs(h - ref) <= 1e-3, h, ref, 1e-3, "H-interval-value"));
      }
      break;
    }
    case Invariant::HRefinement: {
      HGrid g = default_h_grid(dom, 4, 2);
      double prev = estimate_H(dom, g).value;
      bool ok = true;
      for (int i = 0; i < 2; ++i) {
        g = refine_h_grid(dom, g);
        const double h = estimate_H(dom, g).value;
        ok = ok && h >= prev;
        prev = h;
      }
      rep.add(make_check(id, ok, prev, 0.0, 0.0, "H-grid-refinement", "estimate never decreases"));
      break;
    }
    case Invariant::HLowerBound: {
      const double h = estimate_H(dom, default_h_grid(dom, 8, 4)).value;
      const double low = std::pow(4.0 * kPi, -0.5 * N);
      rep.add(make_check(id, h >= low, h, low, 0.0, "H-lower-bound"));
      break;
    }
    case Invariant::HDilation: {
      const double h = estimate_H(dom, default_h_grid(dom, 8, 4)).value;
      double worst = 0.0;
      for (double s : {0.5, 3.0}) {
        const Domain ds = dom.dilated(s);
        worst = std::max(worst, rel_diff(estimate_H(ds, default_h_grid(ds, 8, 4)).value, h));
      }
      rep.add(make_check(id, worst <= 1e-3, worst, 0.0, 1e-3, "H-dilation-invariant"));
      break;
    }
    case Invariant::Isoperimetric: {
      Rng rng(c.seed + 5u);
      int bad = dom.lambda1() * std::pow(dom.volume(), 2.0 / N) > lambda1_star(N);
      for (int i = 0; i < 10; ++i) {
        const Domain d = make_domain(2, {0.2 + 2.0 * rng.uniform(), 0.2 + 2.0 * rng.uniform()});
        bad += d.lambda1() * d.volume() > lambda1_star(2);
      }
      rep.add(make_check(id, bad == 0, bad, 0.0, 0.0, "isoperimetric-eigenvalue", "config domain + 10 rectangles"));
      const double l2 = lambda1_star(2);
      rep.add(make_check(id + "_disk", std::abs(l2 - 10.6499) <= 1e-3, l2, 10.6499, 1e-3, "ball-eigenvalue"));
      break;
    }
    case Invariant::ThresholdDilation: {
      const HGrid g = default_h_grid(dom, 8, 4);
      const Domain ds = dom.dilated(2.0);
      const KernelConstants a = estimate_constants(dom, {2.0}, &g);
      const HGrid gs = default_h_grid(ds, 8, 4);
      const KernelConstants b = estimate_constants(ds, {2.0}, &gs);
      const double err = rel_diff(b.rho_r.at(2.0), a.rho_r.at(2.0) / 4.0);
      rep.add(make_check(id, err <= 1e-3, err, 0.0, 1e-3, "threshold-scaling", "rho_r(2 Omega) = rho_r(Omega) / 4"));
      break;
    }
    case Invariant::LpLq: {
      const double H = estimate_H(dom, default_h_grid(dom, 8, 4)).value;
      const double inf = std::numeric_limits<double>::infinity();
      int bad = 0, n = 0;
      for (int i = 0; i < 10; ++i) {
        const Field u = random_mean_zero_field(c.grid, c.seed + 60u + i);
        for (auto [p, q] : {std::pair{2.0, inf}, {2.0, 4.0}, {3.0, 3.0}})
          for (double t : {0.01, 0.1, 1.0}) bad += verify_lp_lq(u, t, p, q, H).violated, ++n;
      }
      rep.add(make_check(id, bad == 0, bad, 0.0, 0.0, "Lp-Lq-smoothing", std::to_string(n) + " samples"));
      break;
    }
    case Invariant::Holder: {
      int bad = 0;
      for (int i = 0; i < 20; ++i) {
        Field f = random_mean_zero_field(c.grid, c.seed + 80u + i);
        f += Field::constant(c.grid, 0.3 * i / 20.0);
        for (auto [a, b] : {std::pair{1.0, 1.0}, {2.0, 3.0}, {1.5, 2.5}}) bad += holder_product_check(f, a, b).violated;
      }
      rep.add(make_check(id, bad == 0, bad, 0.0, 0.0, "moment-product", "20 fields x 3 exponent pairs"));
      break;
    }
    case Invariant::MeanConservation: {
      const Canned& k = canned(c);
      std::size_t i = 0;
      for (const auto& r : k.smooth) rep.add(named(monitor_mean_conservation(r), id + "_run" + std::to_string(i++)));
      for (const auto& r : k.blowup128) rep.add(named(monitor_mean_conservation(r), id + "_run" + std::to_string(i++)));
      break;
    }
    case Invariant::EnergyDecay: {
      const Canned& k = canned(c);
      std::size_t i = 0;
      for (const auto& r : k.smooth) rep.add(named(monitor_energy_decay(r.trajectory), id + "_run" + std::to_string(i++)));
      for (const auto& r : k.blowup128)
        rep.add(named(monitor_energy_decay(r.trajectory), id + "_run" + std::to_string(i++)));
      break;
    }
    case Invariant::FIdentity: {
      const Canned& k = canned(c);
      for (std::size_t i = 0; i < k.etd2.size(); ++i)
        rep.add(named(monitor_F_identity(k.etd2[i].trajectory, k.etd2_p[i]), id + "_run" + std::to_string(i)));
      break;
    }
    case Invariant::FExponentialLower: {
      const Canned& k = canned(c);
      for (std::size_t i = 0; i < k.blowup128.size(); ++i) {
        const double lam = k.seeds[i].grid().domain().lambda1();
        rep.add(named(monitor_F_exponential_lower(k.blowup128[i].trajectory, i == 0 ? 2.0 : 1.5, lam),
                      id + "_seed" + std::to_string(i)));
      }
      break;
    }
    case Invariant::MinPrinciple: {
      const Canned& k = canned(c);
      for (std::size_t i = 0; i < k.blowup128.size(); ++i) {
        const double p = i == 0 ? 2.0 : 1.5;
        const auto h = min_principle_hypotheses(k.seeds[i], p);
        rep.add(named(monitor_min_principle(k.blowup128[i].trajectory, h), id + "_L2_seed" + std::to_string(i)));
        rep.add(named(monitor_min_principle_lp(k.blowup128[i].trajectory, h), id + "_Lp_seed" + std::to_string(i)));
      }
      break;
    }
    case Invariant::InfMonotone: {
      const Grid g(make_domain(1, {dom.length(0)}), {128});
      const double L = dom.length(0);
      const Field spike = Field::from_function(
          g, [L](auto x) { return -30.0 * std::exp(-std::pow((x[0] - 0.5 * L) / (0.05 * L), 2)); });
      const Field u0 = spike - Field::constant(g, mean(spike));
      const auto r = simulate(u0, fixed(2.0, 1e-5, 0.01 * L * L, c.fault));
      rep.add(named(monitor_inf_monotone(r.trajectory).check, id));
      break;
    }
    case Invariant::L2Bound: {
      const Canned& k = canned(c);
      std::size_t i = 0;
      for (const auto& r : k.smooth) rep.add(named(monitor_L2_bound(r.trajectory), id + "_run" + std::to_string(i++)));
      for (const auto& r : k.blowup128) rep.add(named(monitor_L2_bound(r.trajectory), id + "_run" + std::to_string(i++)));
      break;
    }
    case Invariant::RefinementOrder: {
      const Grid g(make_domain(1, {1.0}), {64});
      const Field u0 = random_field_with_linf(g, c.seed + 11u, 10.0, 6);
      for (auto [scheme, order, tag] : {std::tuple{StepScheme::IMEX1, 1.0, "_IMEX1"}, {StepScheme::ETD2, 2.0, "_ETD2"}}) {
        std::vector<SpectralCoeffs> fin;
        for (double dt : {1e-3, 5e-4, 2.5e-4}) {
          SolverConfig sc = fixed(2.0, dt, 0.05, false);
          sc.step_scheme = scheme;
          fin.push_back(simulate(u0, sc).final_state.coeffs);
        }
        auto dist = [](const SpectralCoeffs& a, const SpectralCoeffs& b) {
          double s = 0.0;
          for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
          return std::sqrt(s);
        };
        const double measured = std::log2(dist(fin[0], fin[1]) / dist(fin[1], fin[2]));
        rep.add(make_check(id + tag, std::abs(measured - order) <= 0.3, measured, order, 0.3, "time-step-order"));
      }
      break;
    }
    case Invariant::BlowupGridStability: {
      const Canned& k = canned(c);
      for (std::size_t i = 0; i < k.blowup128.size(); ++i) {
        const double p = i == 0 ? 2.0 : 1.5;
        const auto& a = k.blowup128[i];
        const auto& b = k.blowup256[i];
        const std::string tag = i == 0 ? "_p2" : "_p1.5";
        if (a.outcome.kind != OutcomeKind::BlowUp || b.outcome.kind != OutcomeKind::BlowUp || !a.outcome.T_estimate ||
            !b.outcome.T_estimate) {
          rep.add(make_check(id + tag, false, 0.0, 0.0, 0.1, "negative-energy-blowup", "seed run did not blow up"));
          continue;
        }
        const double rel = std::abs(*b.outcome.T_estimate - *a.outcome.T_estimate) / *a.outcome.T_estimate;
        rep.add(make_check(id + tag, rel <= 0.1, rel, 0.0, 0.1, "negative-energy-blowup", "M = 128 vs 256"));
        const double g = fit_growth_exponent(a.trajectory);
        rep.add(make_check(id + "_growth" + tag, g >= (p + 3) / 4 - 0.15, g, (p + 3) / 4, 0.15, "growth-exponent"));
      }
      break;
    }
    case Invariant::ScalingCovariance: {
      const Field u0 = random_field_with_linf(c.run_grid, c.seed + 12u, 2.0, 6);
      const auto s = scaling_covariance_check(u0, 2.0, fixed(2.0, 1e-4, 0.1, false), {0.05, 0.1});
      rep.add(named(s.smooth, id + "_smooth"));
      const Canned& k = canned(c);
      const auto b = scaling_covariance_check(k.seeds[0], 2.0, blowup_solver_defaults(2.0), {});
      rep.add(named(b.blowup, id + "_blowup"));
      break;
    }
    case Invariant::EnergyPositivity: {
      const Grid fine = nonlinear_grid(c.run_grid, 2.0, true);
      int bad = 0;
      for (int i = 0; i < 100; ++i) {
        Field u = random_mean_zero_field(c.run_grid, c.seed + 300u + i);
        const double peak = linf_norm(from_spectral(resample(to_spectral(u), fine)));
        u *= 1.4 * dom.lambda1() / peak;
        bad += energy_positivity_smalldata_check(u).status != CheckStatus::Pass;
      }
      rep.add(make_check(id, bad == 0, bad, 0.0, 0.0, "small-data-energy-positive", "100 fields at 1.4 lambda1"));
      break;
    }
    case Invariant::MobilityConstant: {
      const double cm = mobility_constant(DoubleWell(2.0));
      const double ref = 16.0 * std::sqrt(2.0) / 15.0;
      rep.add(make_check(id, std::abs(cm - ref) <= 1e-8, cm, ref, 1e-8, "mobility-constant"));
      break;
    }
    case Invariant::ProjectionFeasibility: {
      int bad = 0;
      double worst = 0.0;
      for (const Field& v : projected_fields(c, 20)) {
        bad += !is_feasible(v);
        const Field again = project_A(v);
        for (std::size_t j = 0; j < v.size(); ++j) worst = std::max(worst, std::abs(again[j] - v[j]));
      }
      rep.add(make_check(id, bad == 0, bad, 0.0, 1e-12, "constraint-set", "20 projected fields"));
      rep.add(make_check(id + "_idempotent", worst <= 1e-10, worst, 0.0, 1e-10, "constraint-set"));
      break;
    }
    case Invariant::RewriteIdentity: {
      int bad = 0;
      double worst = 0.0;
      for (double p : {2.0, 1.5}) {
        for (const Field& v : projected_fields(c, 25)) {
          const CheckResult r = rewrite_identity_check(v, p);
          bad += !r.passed();
          worst = std::max(worst, std::abs(r.measured - r.expected));
        }
      }
      rep.add(make_check(id, bad == 0, worst, 0.0, 1e-10, "double-well-rewrite", "50 feasible fields"));
      break;
    }
    case Invariant::Modica: {
      const DoubleWell w(2.0);
      const PhaseTable G(w);
      int bad = 0;
      for (const Field& v : projected_fields(c, 25)) {
        for (double eps : {0.1, 0.3}) bad += !modica_check(v, eps, w, G).holds;
      }
      rep.add(make_check(id, bad == 0, bad, 0.0, 1e-8, "modica-inequality", "25 feasible fields x 2 eps"));
      break;
    }
    case Invariant::MinimizerDescent: {
      const DoubleWell w(2.0);
      const PhaseTable G(w);
      const double eps = N == 1 ? 0.05 : 0.2;
      const MinimizerResult r = minimize_J(eps, tanh_profile(c.unit_grid, eps), w);
      bool mono = true;
      for (std::size_t i = 1; i < r.J_history.size(); ++i) mono = mono && r.J_history[i] <= r.J_history[i - 1];
      rep.add(make_check(id + "_monotone", mono, r.J_value, 0.0, 0.0, "minimizer-descent"));
      rep.add(make_check(id + "_feasible", is_feasible(r.v) && r.converged, r.iterations, 0.0, 0.0,
                         "minimizer-converged", r.stop_reason));
      rep.add(make_check(id + "_modica", modica_check(r.v, eps, w, G).holds, r.J_value,
                         2.0 * total_variation_G(r.v, G), 1e-8, "modica-inequality"));
      break;
    }
    case Invariant::ProfileSharpening: {
      // one axis is enough: the profile is a function of x0
      const DoubleWell w(2.0);
      const double cm = mobility_constant(w);
      const Grid g(make_domain(1, {1.0}), {256});
      double prev_plateau = -1.0;
      bool ok = true;
      std::optional<Field> warm;
      for (double eps : {0.08, 0.04}) {
        const MinimizerResult r = minimize_J(eps, warm ? *warm : tanh_profile(g, eps), w);
        warm = r.v;
        const ProfileStats st = profile_stats(r.v);
        const double ratio = r.J_value / (2.0 * cm);
        ok = ok && r.converged && ratio >= 0.5 && ratio <= 2.0 && st.plateau_fraction > prev_plateau;
        prev_plateau = st.plateau_fraction;
      }
      rep.add(make_check(id, ok, prev_plateau, 0.0, 0.0, "profile-sharpening",
                         "plateau fraction grows as eps halves; J within [0.5, 2] x 2c"));
      break;
    }
    case Invariant::Count:
      break;
  }
}

}  // namespace

std::vector<CoverageEntry> verify_manifest() { return {std::begin(kManifest), std::end(kManifest)}; }

ExperimentOutput run_verify(const ExperimentConfig& cfg) {
  const Domain dom = cfg.domain();
  std::vector<int> pts(cfg.points.begin(), cfg.points.end());
  for (int& m : pts) m = std::min(m, 256);
  std::vector<int> run_pts(pts.size(), dom.dim() == 1 ? 128 : 32);
  // gamma checks need |Omega| = 1
  const Domain unit = std::abs(dom.volume() - 1.0) <= 1e-12
                          ? dom
                          : (dom.dim() == 1 ? make_domain(1, {1.0}) : make_domain(2, {1.25, 0.8}));
  std::vector<int> unit_pts(pts.size(), dom.dim() == 1 ? 256 : 48);
  const Ctx ctx{cfg,
                dom,
                Grid(dom, pts),
                Grid(dom, run_pts),
                Grid(unit, unit_pts),
                cfg.seeds.front(),
                cfg.fault == "skip_mode0_zeroing",
                std::nullopt};

  ExperimentOutput out;
  for (std::size_t i = 0; i < std::size(kManifest); ++i) {
    const auto before = out.report.checks.size();
    try {
      run_invariant(static_cast<Invariant>(i), ctx, out.report);
    } catch (const Error& e) {
      out.report.add(make_check(kManifest[i].id, false, 0.0, 0.0, 0.0, "verify-error",
                                std::string(errc_name(e.code())) + ": " + e.what()));
    }
    if (out.report.checks.size() == before) {
      out.report.add(make_check(std::string("coverage_") + kManifest[i].id, false, 0.0, 1.0, 0.0, "verify-coverage",
                                "invariant produced no check"));
    }
  }

  std::string csv = "id,module,checks,failures\n";
  for (const auto& e : kManifest) {
    int n = 0, f = 0;
    const std::string id = e.id;
    for (const auto& ch : out.report.checks) {
      if (ch.name == id || ch.name.rfind(id + "_", 0) == 0) ++n, f += ch.status == CheckStatus::Fail;
    }
    csv += id + "," + e.module + "," + std::to_string(n) + "," + std::to_string(f) + "\n";
  }
  out.files.push_back({"coverage.csv", csv});
  return out;
}

}  // namespace nlheat
