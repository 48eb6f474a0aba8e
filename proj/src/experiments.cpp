#include "nlheat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlheat/error.hpp"
#include "nlheat/heat_kernel.hpp"
#include "nlheat/random_field.hpp"

namespace nlheat {

namespace {

std::string suffix(const std::string& base, std::uint64_t seed) { return base + "_seed" + std::to_string(seed); }

CheckResult renamed(CheckResult c, const std::string& name) {
  c.name = name;
  return c;
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

const Snapshot* snapshot_at(const SimulationResult& r, double t) {
  for (const auto& s : r.snapshots)
    if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, t)) return &s;
  return nullptr;
}

// compact form for check names
std::string tag_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seed_phi(double x, double L) { return std::cos(kPi * x / L) + 0.5 * std::cos(2.0 * kPi * x / L); }

std::string pair_label(double p, double q) {
  std::ostringstream os;
  os << "p" << tag_number(p) << "_q" << (std::isinf(q) ? std::string("inf") : tag_number(q));
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------- building blocks

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Field blowup_seed_profile(const Grid& grid) {
  const double L = grid.domain().length(0);
  return Field::from_function(grid, [L](std::span<const double> x) { return seed_phi(x[0], L); });
}

double blowup_threshold_amplitude(const Grid& grid, double p) {
  if (!(p > 1.0)) fail(Errc::InvalidArgument, "threshold amplitude needs p > 1");
  using boost::math::quadrature::gauss_kronrod;
  const double L = grid.domain().length(0);
  // phi changes sign once on (0, L), at cos(pi x / L) = (sqrt 3 - 1) / 2.
  const double root = L * std::acos(0.5 * (std::sqrt(3.0) - 1.0)) / kPi;
  auto grad2 = [L](double x) {
    const double d = -(kPi / L) * (std::sin(kPi * x / L) + std::sin(2.0 * kPi * x / L));
    return d * d;
  };
  auto odd = [L, p](double x) {
    const double v = seed_phi(x, L);
    return v * std::pow(std::abs(v), p);
  };
  const double g = gauss_kronrod<double, 31>::integrate(grad2, 0.0, L, 10, 1e-15);
  const double o = gauss_kronrod<double, 31>::integrate(odd, 0.0, root, 12, 1e-15) +
                   gauss_kronrod<double, 31>::integrate(odd, root, L, 12, 1e-15);
  if (!(o > 0.0)) fail(Errc::SeedConstruction, "seed has no positive cubic mass");
  return std::pow(0.5 * (p + 1.0) * g / o, 1.0 / (p - 1.0));
}

SolverConfig blowup_solver_defaults(double p) {
  SolverConfig c;
  c.p = p;
  c.cfl_c = 0.02;
  c.u_max = p >= 2.0 ? 1e3 : 1e5;
  c.t_end = 1.0;
  c.dt_init = 1e-4;
  c.dt_max = 1e-3;
  // resolves the last doubling of ||u||_inf before u_max
  if (p > 1.0) c.dt_min = c.cfl_c / (2.0 * p * std::pow(2.0 * c.u_max, p - 1.0));
  return c;
}

std::string trajectory_csv(const SimulationResult& r) {
  std::ostringstream os;
  os << "t,E,F,linf,umin,lp,grad2,dF_dt_rhs,dt\n";
  for (const auto& d : r.trajectory) {
    os << format_number(d.t) << ',' << format_number(d.E) << ',' << format_number(d.F) << ','
       << format_number(d.linf) << ',' << format_number(d.umin) << ',' << format_number(d.lp) << ','
       << format_number(d.grad2) << ',' << format_number(d.dF_dt_rhs) << ',' << format_number(d.dt) << '\n';
  }
  os << "#outcome=" << outcome_name(r.outcome.kind) << '\n';
  os << "#T_estimate=" << (r.outcome.T_estimate ? format_number(*r.outcome.T_estimate) : std::string("none")) << '\n';
  os << "#reason=" << r.outcome.reason << '\n';
  os << "#accepted_steps=" << r.accepted_steps << '\n';
  os << "#rejected_steps=" << r.rejected_steps << '\n';
  os << "#max_abs_mode0=" << format_number(r.max_abs_mode0) << '\n';
  return os.str();
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os << "theta,eps,I_theta,ratio,iters,feas_mean,feas_norm,feas_floor,tv_G\n";
  for (const auto& r : s.rows) {
    os << format_number(r.theta) << ',' << format_number(r.eps) << ',' << format_number(r.I_theta) << ','
       << format_number(r.ratio) << ',' << r.iters << ',' << format_number(r.feas.mean) << ','
       << format_number(r.feas.norm) << ',' << format_number(r.feas.floor) << ',' << format_number(r.tv_G) << '\n';
  }
  os << "#c=" << format_number(s.c) << '\n';
  return os.str();
}

std::string field_csv(const Field& f) {
  const Grid& g = f.grid();
  std::ostringstream os;
  os << (g.dim() == 1 ? "x,v\n" : "x,y,v\n");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.unflatten(i);
    os << format_number(g.node(0, idx[0])) << ',';
    if (g.dim() == 2) os << format_number(g.node(1, idx[1])) << ',';
    os << format_number(f[i]) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------- simulate

ExperimentOutput run_simulate(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  const Grid grid = cfg.grid();
  const double p = cfg.solver.p;
  const double lam = grid.domain().lambda1();
  for (std::uint64_t seed : cfg.seeds) {
    const Field u0 = random_field_with_linf(grid, seed, cfg.amplitude, cfg.max_mode);
    const SimulationResult r = simulate(u0, cfg.solver);
    auto& rep = out.report;
    rep.add(make_check(suffix("outcome", seed), r.outcome.kind != OutcomeKind::StepFloor,
                       r.final_state.t, cfg.solver.t_end, 0.0, "solution-continues",
                       std::string(outcome_name(r.outcome.kind)) + (r.outcome.reason.empty() ? "" : ": " + r.outcome.reason)));
    rep.add(renamed(monitor_energy_decay(r.trajectory), suffix("energy_decay", seed)));
    rep.add(renamed(monitor_mean_conservation(r), suffix("mean_conservation", seed)));
    rep.add(renamed(monitor_L2_bound(r.trajectory), suffix("L2_bound", seed)));
    if (cfg.solver.dt_max <= 1e-4) {
      rep.add(renamed(monitor_F_identity(r.trajectory, p), suffix("F_identity", seed)));
    } else {
      rep.add(not_applicable(suffix("F_identity", seed), "F-derivative-identity", "needs dt_max <= 1e-4"));
    }
    rep.add(renamed(monitor_F_exponential_lower(r.trajectory, p, lam), suffix("F_exponential_lower", seed)));
    out.files.push_back({"trajectory_" + std::to_string(seed) + ".csv", trajectory_csv(r)});
  }
  return out;
}

// ---------------------------------------------------------------- blow-up

ExperimentOutput run_blowup_criterion(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  auto& rep = out.report;
  const Grid grid = cfg.grid();
  const double p = cfg.solver.p;
  const double a_star = blowup_threshold_amplitude(grid, p);
  const double a = cfg.amplitude_factor * a_star;
  const Field u0 = a * blowup_seed_profile(grid);
  const double e0 = energy(u0, p);
  const std::string amp_detail = "a = " + format_number(cfg.amplitude_factor) + " a*, a* = " + format_number(a_star);

  if (cfg.amplitude_factor <= 1.0) {
    rep.add(not_applicable("criterion_hypotheses", "negative-energy-blowup",
                           "criterion hypotheses unmet: E(u0) = " + format_number(e0) + ", " + amp_detail));
    const SimulationResult r = simulate(u0, cfg.solver);
    rep.add(make_check("outcome", r.outcome.kind != OutcomeKind::StepFloor, r.final_state.t, cfg.solver.t_end, 0.0,
                       "solution-continues", outcome_name(r.outcome.kind)));
    rep.add(monitor_energy_decay(r.trajectory));
    rep.add(monitor_mean_conservation(r));
    out.files.push_back({"trajectory.csv", trajectory_csv(r)});
    return out;
  }
  if (!(e0 < 0.0)) {
    fail(Errc::SeedConstruction, "seed energy is not negative at the requested amplitude (E = " + format_number(e0) +
                                     ", " + amp_detail + ")");
  }
  rep.add(make_check("seed_energy_negative", true, e0, 0.0, 0.0, "negative-energy-blowup", amp_detail));

  const SimulationResult r = simulate(u0, cfg.solver);
  const bool blew = r.outcome.kind == OutcomeKind::BlowUp && r.outcome.T_estimate.has_value();
  rep.add(make_check("outcome_blowup", blew, r.outcome.T_estimate.value_or(r.final_state.t), 0.0, 0.0,
                     "negative-energy-blowup",
                     std::string(outcome_name(r.outcome.kind)) + (r.outcome.reason.empty() ? "" : ": " + r.outcome.reason)));
  rep.add(monitor_energy_decay(r.trajectory));
  rep.add(monitor_mean_conservation(r));
  rep.add(monitor_L2_bound(r.trajectory));
  rep.add(monitor_F_exponential_lower(r.trajectory, p, grid.domain().lambda1()));
  const auto hyp = min_principle_hypotheses(u0, p);
  rep.add(monitor_min_principle(r.trajectory, hyp));
  rep.add(monitor_min_principle_lp(r.trajectory, hyp));
  rep.add(monitor_inf_monotone(r.trajectory).check);
  out.files.push_back({"trajectory.csv", trajectory_csv(r)});

  if (!blew) return out;
  const double T = *r.outcome.T_estimate;

  // The adaptive run's steps are too uneven for central differences; a
  // fixed-step second-order companion run covers the first half of [0, T).
  {
    SolverConfig e = cfg.solver;
    e.step_scheme = StepScheme::ETD2;
    e.dt_init = e.dt_min = e.dt_max = 1e-5;
    e.t_end = 0.5 * T;
    e.u_max = 1e12;
    e.checkpoints.clear();
    const SimulationResult re = simulate(u0, e);
    CheckResult f = monitor_F_identity(re.trajectory, p);
    f.detail += "; fixed-step ETD2 companion, dt = 1e-5, t <= T/2";
    rep.add(f);
  }

  const double g = fit_growth_exponent(r.trajectory);
  const double g_min = (p + 3.0) / 4.0 - 0.15;
  rep.add(make_check("growth_exponent", g >= g_min, g, (p + 3.0) / 4.0, 0.15, "growth-exponent",
                     "slope of log F' against log F over the last decade"));

  if (cfg.grid_check) {
    std::vector<int> pts(cfg.points.begin(), cfg.points.end());
    for (int& m : pts) m *= 2;
    const Grid fine(grid.domain(), pts);
    SolverConfig c2 = cfg.solver;
    c2.dt_min *= 0.5;
    const SimulationResult r2 = simulate(a * blowup_seed_profile(fine), c2);
    if (r2.outcome.kind == OutcomeKind::BlowUp && r2.outcome.T_estimate) {
      const double rel = std::abs(*r2.outcome.T_estimate - T) / T;
      rep.add(make_check("blowup_time_grid_stability", rel <= 0.1, rel, 0.0, 0.1, "negative-energy-blowup",
                         "T = " + format_number(T) + " vs " + format_number(*r2.outcome.T_estimate) +
                             " on the doubled grid with dt_min halved"));
    } else {
      rep.add(make_check("blowup_time_grid_stability", false, 0.0, 0.0, 0.1, "negative-energy-blowup",
                         std::string("doubled grid ended ") + outcome_name(r2.outcome.kind)));
    }
    out.files.push_back({"trajectory_refined.csv", trajectory_csv(r2)});
  }
  return out;
}

// ---------------------------------------------------------------- small-data decay

ExperimentOutput run_small_data_decay(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  auto& rep = out.report;
  const Grid grid = cfg.grid();
  const double r = cfg.r;
  const KernelConstants kc = estimate_constants(grid.domain(), {r});
  const double rho = kc.rho_r.at(r);
  const double lam = kc.lambda1;
  const double rate_min = lam / r - 0.05;
  const std::vector<double> bound_times{1.0, 2.0, 5.0};
  const double t_end = std::max({1.0, 10.0 * r / lam, bound_times.back()});

  for (std::uint64_t seed : cfg.seeds) {
    // amplitude is the fraction of rho_r; 0 gives the zero field
    const Field u0 = cfg.amplitude == 0.0 ? Field::zeros(grid)
                                          : random_field_with_linf(grid, seed, cfg.amplitude * rho, cfg.max_mode);
    const double u0_inf = linf_norm(u0);
    SolverConfig sc = cfg.solver;
    sc.t_end = t_end;
    sc.checkpoints = bound_times;
    const SimulationResult res = simulate(u0, sc);
    rep.add(make_check(suffix("outcome_completed", seed), res.outcome.kind == OutcomeKind::Completed, res.final_state.t,
                       t_end, 0.0, "small-data-global-existence",
                       "||u0||_inf = " + format_number(u0_inf) + ", rho_r = " + format_number(rho)));
    rep.add(renamed(monitor_mean_conservation(res), suffix("mean_conservation", seed)));

    if (u0_inf == 0.0) {
      double worst = 0.0;
      for (const auto& d : res.trajectory) worst = std::max(worst, d.linf);
      rep.add(make_check(suffix("zero_data_stays_zero", seed), worst == 0.0, worst, 0.0, 0.0,
                         "small-data-global-existence"));
      rep.add(not_applicable(suffix("decay_rate", seed), "small-data-decay-rate", "zero data"));
    } else {
      std::vector<double> ts, ls;
      for (const auto& d : res.trajectory) {
        if (d.t >= 1.0 && d.linf > 0.0) ts.push_back(d.t), ls.push_back(std::log(d.linf));
      }
      const double rate = -fit_slope(ts, ls);
      rep.add(make_check(suffix("decay_rate", seed), rate >= rate_min, rate, lam / r, 0.05, "small-data-decay-rate",
                         "least-squares slope of log ||u||_inf on t >= 1"));
    }
    const double C = decay_prefactor(kc, r, u0_inf);
    for (double t : bound_times) {
      const Snapshot* s = snapshot_at(res, t);
      const std::string name = suffix("decay_bound_t" + tag_number(t), seed);
      if (!s) {
        rep.add(make_check(name, false, 0.0, 0.0, 0.0, "small-data-decay-bound", "checkpoint not reached"));
        continue;
      }
      const double v = linf_norm(from_spectral(s->coeffs));
      const double bound = C * u0_inf * std::exp(-lam * t / r);
      rep.add(make_check(name, v <= bound, v, bound, 0.0, "small-data-decay-bound",
                         "C(r) = " + format_number(C)));
    }
    out.files.push_back({"trajectory_" + std::to_string(seed) + ".csv", trajectory_csv(res)});
  }
  return out;
}

// ---------------------------------------------------------------- kernel constants

ExperimentOutput run_kernel_constants(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  auto& rep = out.report;
  const Domain dom = cfg.domain();
  const int N = dom.dim();
  const HGrid hg = default_h_grid(dom, cfg.per_decade, cfg.lattice);
  const KernelConstants kc = estimate_constants(dom, cfg.r_values, &hg);

  const double h_low = std::pow(4.0 * kPi, -0.5 * N);
  rep.add(make_check("H_lower_bound", kc.H >= h_low, kc.H, h_low, 0.0, "H-lower-bound"));
  if (N == 1) {
    const double ref = 1.0 / std::sqrt(kPi);
    rep.add(make_check("H_interval", std::abs(kc.H - ref) <= 1e-3, kc.H, ref, 1e-3, "H-interval-value",
                       "images-sum limit at the boundary"));
  } else {
    rep.add(not_applicable("H_interval", "H-interval-value", "1-D domains only"));
  }
  const double l2star = lambda1_star(2);
  rep.add(make_check("lambda1_star_disk", std::abs(l2star - 10.6499) <= 1e-3, l2star, 10.6499, 1e-3,
                     "ball-eigenvalue"));
  const double iso = kc.lambda1 * std::pow(dom.volume(), 2.0 / N);
  rep.add(make_check("isoperimetric_eigenvalue", iso <= kc.lambda1_star, iso, kc.lambda1_star, 0.0,
                     "isoperimetric-eigenvalue"));

  // dilation: same relative grid on the dilated domain
  const double s = 2.0;
  const Domain ds = dom.dilated(s);
  const KernelConstants ks = estimate_constants(ds, cfg.r_values, nullptr);
  const KernelConstants kd = estimate_constants(dom, cfg.r_values, nullptr);
  const double h_rel = std::abs(ks.H - kd.H) / kd.H;
  rep.add(make_check("H_dilation", h_rel <= 1e-3, h_rel, 0.0, 1e-3, "H-dilation-invariant", "factor 2"));
  for (double rv : cfg.r_values) {
    const double want = kd.rho_r.at(rv) / (s * s);
    const double rel = std::abs(ks.rho_r.at(rv) - want) / want;
    rep.add(make_check("rho_dilation_r" + tag_number(rv), rel <= 1e-3, rel, 0.0, 1e-3, "threshold-scaling"));
    rep.add(make_check("rho_positive_r" + tag_number(rv), kc.rho_r.at(rv) > 0.0 && kc.rho_r.at(rv) < kc.lambda1,
                       kc.rho_r.at(rv), 0.0, 0.0, "small-data-threshold"));
  }
  const double rho_g = rho_global(kc);
  rep.add(make_check("rho_global_positive", rho_g > 0.0, rho_g, 0.0, 0.0, "small-data-threshold"));

  std::ostringstream kv;
  kv << "domain_dim=" << N << '\n';
  kv << "domain_lengths=";
  for (int i = 0; i < N; ++i) kv << (i ? "," : "") << format_number(dom.length(i));
  kv << '\n';
  kv << "lambda1=" << format_number(kc.lambda1) << '\n';
  kv << "H=" << format_number(kc.H) << '\n';
  kv << "H_t_at_max=" << format_number(kc.h_meta.t_at_max) << '\n';
  kv << "H_x_at_max=";
  for (std::size_t i = 0; i < kc.h_meta.x_at_max.size(); ++i) kv << (i ? "," : "") << format_number(kc.h_meta.x_at_max[i]);
  kv << '\n';
  kv << "lambda1_star=" << format_number(kc.lambda1_star) << '\n';
  for (const auto& [rv, rho] : kc.rho_r) kv << "rho_r[" << format_number(rv) << "]=" << format_number(rho) << '\n';
  kv << "rho_global=" << format_number(rho_g) << '\n';
  kv << "grid_times=" << hg.times.size() << '\n';
  kv << "grid_t_min=" << format_number(hg.times.front()) << '\n';
  kv << "grid_t_max=" << format_number(hg.times.back()) << '\n';
  kv << "grid_points=" << hg.points.size() << '\n';
  kv << "grid_per_decade=" << cfg.per_decade << '\n';
  kv << "grid_lattice=" << cfg.lattice << '\n';
  out.files.push_back({"kernel.txt", kv.str()});

  std::ostringstream csv;
  csv << "a,b,lambda1_area,lambda1_star,H,H_lower,rho2,rho2_dilated,dilation\n";
  Rng rng(cfg.seeds.front());
  int iso_bad = 0, h_bad = 0, rho_bad = 0;
  double worst_rho = 0.0;
  for (int i = 0; i < cfg.random_rectangles; ++i) {
    const double a = 0.2 + 2.0 * rng.uniform(), b = 0.2 + 2.0 * rng.uniform();
    const double f = 1.0 + 2.0 * rng.uniform();
    const Domain d = make_domain(2, {a, b});
    const KernelConstants c = estimate_constants(d, {2.0});
    const KernelConstants cf = estimate_constants(d.dilated(f), {2.0});
    const double la = d.lambda1() * d.volume();
    const double hl = 1.0 / (4.0 * kPi);
    const double rel = std::abs(cf.rho_r.at(2.0) - c.rho_r.at(2.0) / (f * f)) / (c.rho_r.at(2.0) / (f * f));
    iso_bad += la > c.lambda1_star;
    h_bad += c.H < hl;
    rho_bad += rel > 1e-3;
    worst_rho = std::max(worst_rho, rel);
    csv << format_number(a) << ',' << format_number(b) << ',' << format_number(la) << ','
        << format_number(c.lambda1_star) << ',' << format_number(c.H) << ',' << format_number(hl) << ','
        << format_number(c.rho_r.at(2.0)) << ',' << format_number(cf.rho_r.at(2.0)) << ',' << format_number(f)
        << '\n';
  }
  if (cfg.random_rectangles > 0) {
    const std::string n = std::to_string(cfg.random_rectangles) + " random rectangles";
    rep.add(make_check("rectangles_isoperimetric", iso_bad == 0, iso_bad, 0.0, 0.0, "isoperimetric-eigenvalue", n));
    rep.add(make_check("rectangles_H_lower_bound", h_bad == 0, h_bad, 0.0, 0.0, "H-lower-bound", n));
    rep.add(make_check("rectangles_rho_dilation", rho_bad == 0, worst_rho, 0.0, 1e-3, "threshold-scaling", n));
  }
  out.files.push_back({"rectangles.csv", csv.str()});
  return out;
}

// ---------------------------------------------------------------- Lp-Lq suite

ExperimentOutput run_lp_lq_suite(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  auto& rep = out.report;
  const Grid grid = cfg.grid();
  const KernelConstants kc = estimate_constants(grid.domain());
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<std::pair<double, double>> pairs{{2.0, inf}, {2.0, 4.0}, {3.0, 3.0}};
  const std::vector<double> times{0.01, 0.1, 1.0};
  const std::uint64_t base = cfg.seeds.front();

  std::ostringstream csv;
  csv << "kind,field,a,b,t,lhs,rhs,slack\n";
  std::vector<int> bad(pairs.size(), 0);
  std::vector<double> min_slack(pairs.size(), inf);
  for (int i = 0; i < cfg.lplq_fields; ++i) {
    const Field u = random_mean_zero_field(grid, base + static_cast<std::uint64_t>(i), cfg.max_mode);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      for (double t : times) {
        const MarginReport m = verify_lp_lq(u, t, pairs[k].first, pairs[k].second, kc.H);
        bad[k] += m.violated;
        min_slack[k] = std::min(min_slack[k], m.slack / std::max(m.rhs, 1e-300));
        csv << "lplq," << i << ',' << format_number(pairs[k].first) << ',' << format_number(pairs[k].second) << ','
            << format_number(t) << ',' << format_number(m.lhs) << ',' << format_number(m.rhs) << ','
            << format_number(m.slack) << '\n';
      }
    }
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    rep.add(make_check("lplq_" + pair_label(pairs[k].first, pairs[k].second), bad[k] == 0, min_slack[k], 0.0, 0.0,
                       "Lp-Lq-smoothing",
                       std::to_string(bad[k]) + " violations over " + std::to_string(cfg.lplq_fields * 3) +
                           " samples; measured = min relative slack"));
  }

  const std::vector<std::pair<double, double>> holder{{1.0, 1.0}, {2.0, 3.0}, {1.5, 2.5}};
  for (const auto& [al, be] : holder) {
    int violations = 0;
    double slack = inf;
    for (int i = 0; i < cfg.holder_fields; ++i) {
      // shift so the fields are not all mean-zero
      Field f = random_mean_zero_field(grid, base + 100000u + static_cast<std::uint64_t>(i), cfg.max_mode);
      f += Field::constant(grid, 0.5 * std::sin(1.0 + i));
      const MarginReport m = holder_product_check(f, al, be);
      violations += m.violated;
      slack = std::min(slack, m.slack / std::max(m.rhs, 1e-300));
      csv << "holder," << i << ',' << format_number(al) << ',' << format_number(be) << ",0," << format_number(m.lhs)
          << ',' << format_number(m.rhs) << ',' << format_number(m.slack) << '\n';
    }
    rep.add(make_check("holder_a" + tag_number(al) + "_b" + tag_number(be), violations == 0, slack, 0.0, 0.0,
                       "moment-product", std::to_string(violations) + " violations over " +
                                             std::to_string(cfg.holder_fields) + " fields"));
  }
  out.files.push_back({"lplq.csv", csv.str()});
  return out;
}

// ---------------------------------------------------------------- theta sweep

ExperimentOutput run_theta_sweep(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  auto& rep = out.report;
  const Grid grid = cfg.grid();
  const double p = cfg.solver.p;
  const DoubleWell well(p);
  const double c = mobility_constant(well);
  if (p == 2.0) {
    const double ref = 16.0 * std::sqrt(2.0) / 15.0;
    rep.add(make_check("mobility_constant", std::abs(c - ref) <= 1e-8, c, ref, 1e-8, "mobility-constant"));
  } else {
    rep.add(not_applicable("mobility_constant", "mobility-constant", "closed form only for p = 2"));
  }

  const SweepResult sw = theta_sweep(well, cfg.thetas, grid, cfg.minimize);
  double C = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sw.rows.size(); ++i) {
    const SweepRow& r = sw.rows[i];
    const std::string tag = "_theta" + tag_number(r.theta);
    rep.add(make_check("I_positive" + tag, r.I_theta > 0.0, r.I_theta, 0.0, 0.0, "sqrt-theta-lower-bound"));
    if (r.theta <= 1e-4) {
      const double rel = std::abs(r.ratio - 2.0 * c) / (2.0 * c);
      rep.add(make_check("ratio" + tag, rel <= 0.1, r.ratio, 2.0 * c, 0.1, "sqrt-theta-asymptotics",
                         "I(theta) / sqrt(theta) against 2c"));
    } else {
      rep.add(not_applicable("ratio" + tag, "sqrt-theta-asymptotics",
                             "theta above 1e-4; ratio = " + format_number(r.ratio)));
    }
    rep.add(make_check("converged" + tag, r.converged, r.iters, 0.0, cfg.minimize.tol, "minimizer-converged"));
    rep.add(make_check("modica" + tag, r.modica_holds, r.I_theta / std::sqrt(r.theta), 2.0 * r.tv_G, 1e-8,
                       "modica-inequality", "J against 2 TV(G(v))"));
    rep.add(make_check("identity" + tag, r.identity_holds, 0.0, 0.0, 1e-10, "double-well-rewrite"));
    C = std::min(C, r.ratio);
    out.files.push_back({"minimizer_" + std::to_string(i) + ".csv", field_csv(sw.minimizers[i])});
  }
  double theta0 = 0.0;
  for (double t : cfg.thetas) theta0 = std::max(theta0, t);
  rep.add(make_check("empirical_C", C > 0.0, C, 2.0 * c, 0.0, "sqrt-theta-lower-bound",
                     "min ratio over the sweep, valid for theta <= " + format_number(theta0)));

  // identity and Modica on feasible fields away from any minimizer
  const PhaseTable G(well);
  const double eps = std::sqrt(*std::max_element(cfg.thetas.begin(), cfg.thetas.end()));
  int id_bad = 0, mod_bad = 0, stalls = 0;
  for (int i = 0; i < cfg.identity_fields; ++i) {
    const std::uint64_t seed = cfg.seeds.front() + static_cast<std::uint64_t>(i);
    Field v = random_field_with_linf(grid, seed, 1.0 + 0.1 * (i % 30), 8);
    try {
      v = project_A(v, cfg.minimize.set);
    } catch (const Error& e) {
      if (e.code() != Errc::ProjectionStall) throw;
      ++stalls;
      continue;
    }
    id_bad += !rewrite_identity_check(v, p).passed();
    mod_bad += !modica_check(v, eps, well, G).holds;
  }
  const std::string n = std::to_string(cfg.identity_fields - stalls) + " projected random fields";
  rep.add(make_check("identity_random_fields", id_bad == 0 && stalls == 0, id_bad, 0.0, 1e-10, "double-well-rewrite",
                     n + (stalls ? ", " + std::to_string(stalls) + " projection stalls" : "")));
  rep.add(make_check("modica_random_fields", mod_bad == 0 && stalls == 0, mod_bad, 0.0, 1e-8, "modica-inequality", n));
  out.files.insert(out.files.begin(), {"sweep.csv", sweep_csv(sw)});
  return out;
}

// ---------------------------------------------------------------- scaling

ExperimentOutput run_scaling_check(const ExperimentConfig& cfg) {
  ExperimentOutput out;
  auto& rep = out.report;
  const Grid grid = cfg.grid();
  const double p = cfg.solver.p;
  SolverConfig sc = cfg.solver;
  sc.t_end = std::max(sc.t_end, *std::max_element(cfg.scaling_times.begin(), cfg.scaling_times.end()));
  for (std::uint64_t seed : cfg.seeds) {
    const Field u0 = random_field_with_linf(grid, seed, cfg.amplitude, cfg.max_mode);
    const ScalingResult s = scaling_covariance_check(u0, cfg.lambda, sc, cfg.scaling_times);
    rep.add(renamed(s.smooth, suffix("scaling_smooth", seed)));
  }
  if (p > 1.0 && p <= 2.0) {
    const Grid g1(make_domain(1, {grid.domain().length(0)}), {512});
    const Field seed = cfg.amplitude_factor * blowup_threshold_amplitude(g1, p) * blowup_seed_profile(g1);
    const ScalingResult s = scaling_covariance_check(seed, cfg.lambda, blowup_solver_defaults(p), {});
    CheckResult b = s.blowup;
    if (s.outcome_base.T_estimate) b.detail += "; T = " + format_number(*s.outcome_base.T_estimate);
    rep.add(b);
  } else {
    rep.add(not_applicable("scaling_blowup_time", "dilation-covariance", "blow-up seed needs 1 < p <= 2"));
  }
  return out;
}

// ---------------------------------------------------------------- dispatch and output

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentOutput out;
  switch (cfg.kind) {
    case ExperimentKind::Simulate: out = run_simulate(cfg); break;
    case ExperimentKind::BlowupCriterion: out = run_blowup_criterion(cfg); break;
    case ExperimentKind::SmallDataDecay: out = run_small_data_decay(cfg); break;
    case ExperimentKind::KernelConstants: out = run_kernel_constants(cfg); break;
    case ExperimentKind::LpLqSuite: out = run_lp_lq_suite(cfg); break;
    case ExperimentKind::ThetaSweep: out = run_theta_sweep(cfg); break;
    case ExperimentKind::ScalingCheck: out = run_scaling_check(cfg); break;
    case ExperimentKind::Verify: out = run_verify(cfg); break;
  }
  out.report.name = cfg.name;
  out.report.config_echo = cfg.echo();
  out.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void write_outputs(const ExperimentOutput& out, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::Io, "cannot create output directory '" + dir + "': " + ec.message());
  auto put = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(Errc::Io, "cannot write '" + path.string() + "'");
    f << content;
    if (!f) fail(Errc::Io, "write failed for '" + path.string() + "'");
  };
  put("report.txt", out.report.to_text());
  for (const auto& f : out.files) put(f.name, f.content);
}

}  // namespace nlheat
