#include "nlheat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlheat/error.hpp"

namespace nlheat {

const char* outcome_name(OutcomeKind k) noexcept {
  switch (k) {
    case OutcomeKind::Completed: return "Completed";
    case OutcomeKind::BlowUp: return "BlowUp";
    case OutcomeKind::StepFloor: return "StepFloor";
  }
  return "Unknown";
}

void SolverConfig::validate() const {
  if (!(p > 1.0) || !std::isfinite(p)) fail(Errc::Validation, "p must exceed 1");
  if (!(dt_min > 0.0)) fail(Errc::Validation, "dt_min must be positive");
  if (!(dt_init >= dt_min)) fail(Errc::Validation, "dt_init must be at least dt_min");
  if (!(dt_max >= dt_init)) fail(Errc::Validation, "dt_max must be at least dt_init");
  if (!(u_max > 0.0)) fail(Errc::Validation, "u_max must be positive");
  if (!(t_end > 0.0)) fail(Errc::Validation, "t_end must be positive");
  if (!(cfl_c > 0.0)) fail(Errc::Validation, "cfl_c must be positive");
  if (sample_every < 1) fail(Errc::Validation, "sample_every must be at least 1");
  if (max_steps < 1) fail(Errc::Validation, "max_steps must be at least 1");
}

// ---------------------------------------------------------------- nonlinearity & energy

namespace {

bool is_even_integer(double p) { return p == std::round(p) && static_cast<long>(std::round(p)) % 2 == 0; }

inline double abs_pow(double v, double p) {
  if (p == 2.0) return v * v;
  return std::pow(std::abs(v), p);
}

std::vector<double> fine_values(const SpectralCoeffs& c, const Grid& fine) {
  if (c.grid() == fine) {
    Field u = from_spectral(c);
    return {u.values().begin(), u.values().end()};
  }
  Field u = from_spectral(resample(c, fine));
  return {u.values().begin(), u.values().end()};
}

}  // namespace

Grid nonlinear_grid(const Grid& base, double p, bool dealias) {
  if (!dealias) return base;
  if (is_even_integer(p)) return base.scaled(0.5 * (p + 1.0));
  return base.scaled(2.0);
}

SpectralCoeffs nonlinear_coeffs(const SpectralCoeffs& c, double p, const Grid& fine, bool zero_mode0) {
  std::vector<double> u = fine_values(c, fine);
  for (double& v : u) v = abs_pow(v, p);
  SpectralCoeffs w = to_spectral(Field(fine, std::move(u)));
  SpectralCoeffs out = c.grid() == fine ? std::move(w) : resample(w, c.grid());
  if (zero_mode0) out[0] = 0.0;
  return out;
}

Field nonlinear_term(const Field& u, double p, bool dealias) {
  if (!(p > 1.0)) fail(Errc::InvalidArgument, "p must exceed 1");
  return from_spectral(nonlinear_coeffs(to_spectral(u), p, nonlinear_grid(u.grid(), p, dealias)));
}

double energy(const SpectralCoeffs& c, double p, const Grid& fine) {
  const std::vector<double> u = fine_values(c, fine);
  double s = 0.0;
  for (double v : u) s += v * abs_pow(v, p);
  return 0.5 * grad_norm_sq(c) - s * fine.cell_volume() / (p + 1.0);
}

double energy(const Field& u, double p, bool dealias) {
  if (!(p > 1.0)) fail(Errc::InvalidArgument, "p must exceed 1");
  return energy(to_spectral(u), p, nonlinear_grid(u.grid(), p, dealias));
}

Diagnostics diagnose(const SpectralCoeffs& c, double p, const Grid& fine, double t, double dt) {
  const std::vector<double> u = fine_values(c, fine);
  Diagnostics d;
  d.t = t;
  d.dt = dt;
  d.umin = std::numeric_limits<double>::infinity();
  double cubic = 0.0, lp = 0.0;
  for (double v : u) {
    const double a = abs_pow(v, p);
    cubic += v * a;
    lp += a;
    d.linf = std::max(d.linf, std::abs(v));
    d.umin = std::min(d.umin, v);
  }
  const double w = fine.cell_volume();
  d.grad2 = grad_norm_sq(c);
  double F = 0.0;
  for (double x : c.coeffs()) F += x * x;
  d.F = F;
  d.E = 0.5 * d.grad2 - cubic * w / (p + 1.0);
  d.lp = std::pow(lp * w, 1.0 / p);
  d.dF_dt_rhs = -(p + 1.0) * d.E + 0.5 * (p - 1.0) * d.grad2;
  d.mode0 = std::abs(c[0]);
  return d;
}

// ---------------------------------------------------------------- stepping

double adaptive_dt(double linf, const SolverConfig& cfg) {
  const double raw = cfg.cfl_c / std::max(1.0, cfg.p * std::pow(linf, cfg.p - 1.0));
  return std::clamp(raw, cfg.dt_min, cfg.dt_max);
}

namespace {

double raw_dt(double linf, const SolverConfig& cfg) {
  return cfg.cfl_c / std::max(1.0, cfg.p * std::pow(linf, cfg.p - 1.0));
}

// dt * phi_2(-lambda dt) with phi_2(z) = (e^z - 1 - z) / z^2.
double phi2_dt(double lam, double dt) {
  const double z = -lam * dt;
  if (std::abs(z) < 1e-2) return dt * (0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0 + z * z * z * z / 720.0);
  return dt * (std::expm1(z) - z) / (z * z);
}

void check_coeffs_finite(const SpectralCoeffs& c) {
  for (double v : c.coeffs())
    if (!std::isfinite(v)) fail(Errc::NonFinite, "solver coefficients left the finite range");
}

}  // namespace

SolverState step_with(const SolverState& state, const SolverConfig& cfg, double dt, const Grid& fine) {
  if (!(dt > 0.0)) fail(Errc::InvalidArgument, "time step must be positive");
  const bool zero0 = !cfg.fault_skip_mode0_zeroing;
  const SpectralCoeffs& c = state.coeffs;
  const auto ev = c.eigenvalues();
  const SpectralCoeffs n0 = nonlinear_coeffs(c, cfg.p, fine, zero0);
  check_coeffs_finite(n0);

  SpectralCoeffs a = c;
  std::vector<double> decay(c.size()), phi1(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double lam = ev[k];
    decay[k] = std::exp(-lam * dt);
    phi1[k] = lam > 0.0 ? -std::expm1(-lam * dt) / lam : dt;
    a[k] = decay[k] * c[k] + phi1[k] * n0[k];
  }
  if (cfg.step_scheme == StepScheme::ETD2) {
    check_coeffs_finite(a);
    const SpectralCoeffs na = nonlinear_coeffs(a, cfg.p, fine, zero0);
    for (std::size_t k = 0; k < c.size(); ++k) a[k] += phi2_dt(ev[k], dt) * (na[k] - n0[k]);
  }
  if (zero0) a[0] = 0.0;
  check_coeffs_finite(a);
  return SolverState{state.t + dt, std::move(a), state.step_index + 1, dt};
}

SolverState step(const SolverState& state, const SolverConfig& cfg) {
  cfg.validate();
  const Grid fine = nonlinear_grid(state.coeffs.grid(), cfg.p, cfg.dealias);
  const Diagnostics d = diagnose(state.coeffs, cfg.p, fine, state.t, 0.0);
  double dt = adaptive_dt(d.linf, cfg);
  if (state.step_index == 0) dt = std::min(dt, cfg.dt_init);
  return step_with(state, cfg, dt, fine);
}

// ---------------------------------------------------------------- simulate

SimulationResult simulate(const Field& u0, const SolverConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  const double m = mean(u0);
  if (std::abs(m) > 1e-12 * std::max(1.0, lp_norm(u0, 2.0)))
    fail(Errc::InvalidArgument, "initial data must have zero mean");

  SpectralCoeffs c0 = to_spectral(u0);
  if (cfg.grid && !(*cfg.grid == u0.grid())) c0 = resample(c0, *cfg.grid);
  c0[0] = 0.0;
  const Grid base = c0.grid();
  const Grid fine = nonlinear_grid(base, cfg.p, cfg.dealias);

  std::vector<double> checkpoints;
  for (double t : cfg.checkpoints)
    if (t >= 0.0 && t <= cfg.t_end) checkpoints.push_back(t);
  std::sort(checkpoints.begin(), checkpoints.end());
  std::size_t next_cp = 0;

  SimulationResult res{{}, {}, SolverState{0.0, std::move(c0), 0, 0.0}, {}, 0, 0, 0.0};
  SolverState& st = res.final_state;
  Diagnostics d = diagnose(st.coeffs, cfg.p, fine, 0.0, 0.0);
  res.trajectory.push_back(d);
  res.max_abs_mode0 = d.mode0;
  while (next_cp < checkpoints.size() && checkpoints[next_cp] <= 0.0) res.snapshots.push_back({0.0, st.coeffs}), ++next_cp;
  if (observer) observer(st, d);

  const double t_eps = 1e-13 * cfg.t_end;
  bool last_recorded = true;
  auto finish = [&](OutcomeKind kind, std::string reason) {
    if (!last_recorded) res.trajectory.push_back(d);
    res.outcome.kind = kind;
    res.outcome.reason = std::move(reason);
    if (kind == OutcomeKind::BlowUp) res.outcome.T_estimate = fit_blowup_time(res.trajectory);
  };

  while (st.t < cfg.t_end - t_eps) {
    if (res.accepted_steps >= cfg.max_steps) {
      finish(OutcomeKind::StepFloor, "step budget exhausted");
      return res;
    }
    const double raw = raw_dt(d.linf, cfg);
    if (raw < 2.0 * cfg.dt_min) {
      if (d.linf > cfg.u_max)
        finish(OutcomeKind::BlowUp, "amplitude above u_max with collapsed time step");
      else
        finish(OutcomeKind::StepFloor, "time step collapsed below 2 dt_min without amplitude growth");
      return res;
    }
    double dt = std::clamp(raw, cfg.dt_min, cfg.dt_max);
    if (res.accepted_steps == 0) dt = std::min(dt, cfg.dt_init);

    bool accepted = false;
    while (!accepted) {
      double target = cfg.t_end;
      if (next_cp < checkpoints.size()) target = std::min(target, checkpoints[next_cp]);
      double h = dt;
      bool lands = false;
      if (st.t + h >= target - t_eps) {
        h = target - st.t;
        lands = true;
      }
      try {
        SolverState trial = step_with(st, cfg, h, fine);
        Diagnostics dn = diagnose(trial.coeffs, cfg.p, fine, trial.t, h);
        // Exponential Euler decreases the discrete energy when h p max(|u|)^{p-1} <= 2.
        const double lip = cfg.p * std::pow(std::max(d.linf, dn.linf), cfg.p - 1.0);
        if (h * lip > 2.0) fail(Errc::NonFinite, "step too large for the current amplitude");
        if (lands) {
          trial.t = target;
          dn.t = target;
        }
        st = std::move(trial);
        d = dn;
        accepted = true;
        ++res.accepted_steps;
        res.max_abs_mode0 = std::max(res.max_abs_mode0, d.mode0);
        const bool at_cp = lands && next_cp < checkpoints.size() && target == checkpoints[next_cp];
        if (at_cp) {
          while (next_cp < checkpoints.size() && checkpoints[next_cp] <= st.t + t_eps) ++next_cp;
          res.snapshots.push_back({st.t, st.coeffs});
        }
        if (res.accepted_steps % cfg.sample_every == 0 || at_cp || st.t >= cfg.t_end - t_eps) {
          res.trajectory.push_back(d);
          last_recorded = true;
        } else {
          last_recorded = false;
        }
        if (observer) observer(st, d);
      } catch (const Error& e) {
        if (e.code() != Errc::NonFinite) throw;
        ++res.rejected_steps;
        dt *= 0.5;
        if (dt < cfg.dt_min) {
          if (d.linf > cfg.u_max)
            finish(OutcomeKind::BlowUp, "step rejected below dt_min at large amplitude");
          else
            finish(OutcomeKind::StepFloor, "step rejected below dt_min without amplitude growth");
          return res;
        }
      }
    }
  }
  st.t = std::max(st.t, cfg.t_end);
  finish(OutcomeKind::Completed, "reached t_end");
  return res;
}

// ---------------------------------------------------------------- blow-up fits

namespace {

// Indices of the final decade of growth of F (F >= F_last / 10), contiguous from the end.
std::vector<std::size_t> last_decade(const std::vector<Diagnostics>& traj) {
  std::vector<std::size_t> idx;
  if (traj.empty()) return idx;
  const double f_last = traj.back().F;
  for (std::size_t i = traj.size(); i-- > 0;) {
    if (!(traj[i].F >= 0.1 * f_last) || !(traj[i].F > 0.0)) break;
    idx.push_back(i);
  }
  std::reverse(idx.begin(), idx.end());
  return idx;
}

struct LineFit {
  double intercept = 0.0, slope = 0.0;
  bool ok = false;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.ok = std::isfinite(f.slope) && std::isfinite(f.intercept);
  return f;
}

}  // namespace

double fit_blowup_time(const std::vector<Diagnostics>& traj) {
  if (traj.empty()) return 0.0;
  const double t_last = traj.back().t;
  const auto idx = last_decade(traj);
  std::vector<double> ts, qs;
  for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
    const auto& a = traj[idx[j - 1]];
    const auto& b = traj[idx[j + 1]];
    if (!(b.t > a.t)) continue;
    const double rate = (std::log(b.F) - std::log(a.F)) / (b.t - a.t);
    if (!(rate > 0.0)) continue;
    ts.push_back(traj[idx[j]].t);
    qs.push_back(1.0 / rate);
  }
  const LineFit f = least_squares(ts, qs);
  if (!f.ok || ts.size() < 3 || !(f.slope < 0.0)) return t_last;
  return std::max(t_last, -f.intercept / f.slope);
}

double fit_growth_exponent(const std::vector<Diagnostics>& traj) {
  const auto idx = last_decade(traj);
  std::vector<double> x, y;
  for (std::size_t i : idx) {
    const double fp = 2.0 * traj[i].dF_dt_rhs;
    if (!(fp > 0.0)) continue;
    x.push_back(std::log(traj[i].F));
    y.push_back(std::log(fp));
  }
  const LineFit f = least_squares(x, y);
  return f.ok ? f.slope : std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------- monitors

CheckResult monitor_energy_decay(const std::vector<Diagnostics>& traj) {
  if (traj.size() < 2) return not_applicable("energy_decay", "energy-nonincreasing", "fewer than 2 samples");
  const double tol = 1e-8 * (1.0 + std::abs(traj.front().E));
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t where = 0;
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double inc = traj[i].E - traj[i - 1].E;
    if (inc > worst) worst = inc, where = i;
  }
  std::ostringstream os;
  os << "largest increase at t=" << traj[where].t;
  return make_check("energy_decay", worst <= tol, worst, 0.0, tol, "energy-nonincreasing", os.str());
}

CheckResult monitor_F_identity(const std::vector<Diagnostics>& traj, double p, double rel_tol, double F_cap) {
  (void)p;
  double worst = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 1; i + 1 < traj.size(); ++i) {
    const auto &a = traj[i - 1], &b = traj[i], &c = traj[i + 1];
    const double h1 = b.t - a.t, h2 = c.t - b.t;
    if (!(h1 > 0.0) || std::abs(h2 - h1) > 1e-9 * h1) continue;
    if (F_cap > 0.0 && c.F > F_cap) continue;
    const double lhs = 0.5 * (c.F - a.F) / (h1 + h2);
    const double scale = std::max(std::abs(b.dF_dt_rhs), std::abs(lhs));
    const double err = scale > 0.0 ? std::abs(lhs - b.dF_dt_rhs) / scale : 0.0;
    worst = std::max(worst, err);
    ++used;
  }
  if (used == 0) return not_applicable("F_identity", "F-derivative-identity", "no uniformly spaced sample triples");
  return make_check("F_identity", worst <= rel_tol, worst, 0.0, rel_tol, "F-derivative-identity",
                    std::to_string(used) + " central differences");
}

CheckResult monitor_F_exponential_lower(const std::vector<Diagnostics>& traj, double p, double lambda1,
                                        double F_cap) {
  if (traj.empty() || traj.front().E > 0.0 || traj.front().F == 0.0)
    return not_applicable("F_exponential_lower", "F-exponential-growth", "needs E(0) <= 0 and u0 != 0");
  const double f0 = traj.front().F;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& d : traj) {
    if (F_cap > 0.0 && d.F > F_cap) break;
    worst = std::min(worst, d.F / (f0 * std::exp((p - 1.0) * lambda1 * d.t)));
  }
  return make_check("F_exponential_lower", worst >= 0.99, worst, 1.0, 0.01, "F-exponential-growth",
                    "min of F(t) / (F(0) exp((p-1) lambda1 t))");
}

MinPrincipleHypotheses min_principle_hypotheses(const Field& u0, double p) {
  MinPrincipleHypotheses h;
  const double l2 = lp_norm(u0, 2.0), lp = lp_norm(u0, p), mn = min_value(u0);
  const bool nonzero = linf_norm(u0) > 0.0;
  h.nonpositive_energy = nonzero && energy(u0, p) <= 0.0;
  h.floor_l2 = mn >= -l2;
  h.floor_lp = mn >= -lp;
  h.p_in_range = p > 1.0 && p <= 2.0;
  return h;
}

CheckResult monitor_min_principle(const std::vector<Diagnostics>& traj, const MinPrincipleHypotheses& h) {
  if (!h.all_l2())
    return not_applicable("min_principle_L2", "min-principle-L2", "hypotheses on u0 not met");
  double worst = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (const auto& d : traj) {
    const double l2 = std::sqrt(d.F);
    const double margin = d.umin + l2;
    worst = std::min(worst, margin / (1.0 + l2));
    if (margin < -1e-8 * (1.0 + l2)) ok = false;
  }
  return make_check("min_principle_L2", ok, worst, 0.0, 1e-8, "min-principle-L2",
                    "min over samples of (min u + ||u||_2) / (1 + ||u||_2)");
}

CheckResult monitor_min_principle_lp(const std::vector<Diagnostics>& traj, const MinPrincipleHypotheses& h) {
  if (!(h.nonpositive_energy && h.floor_lp))
    return not_applicable("min_principle_Lp", "min-principle-Lp", "hypotheses on u0 not met");
  double sup_lp = 0.0, worst = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (const auto& d : traj) {
    sup_lp = std::max(sup_lp, d.lp);
    const double margin = d.umin + sup_lp;
    worst = std::min(worst, margin / (1.0 + sup_lp));
    if (margin < -1e-8 * (1.0 + sup_lp)) ok = false;
  }
  return make_check("min_principle_Lp", ok, worst, 0.0, 1e-8, "min-principle-Lp",
                    "min over samples of (min u + sup_s ||u(s)||_p) / (1 + sup)");
}

InfMonotoneResult monitor_inf_monotone(const std::vector<Diagnostics>& traj) {
  InfMonotoneResult r;
  bool entered = false, ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const bool in = traj[i].umin < -traj[i].lp;
    if (in) entered = true;
    if (!in && entered && !r.exit_time) r.exit_time = traj[i].t;
    if (i > 0 && in && traj[i - 1].umin < -traj[i - 1].lp) {
      const double drop = traj[i - 1].umin - traj[i].umin;
      const double tol = 1e-6 * (1.0 + std::abs(traj[i - 1].umin));
      worst = std::max(worst, drop / (1.0 + std::abs(traj[i - 1].umin)));
      if (drop > tol) ok = false;
    }
  }
  if (!entered) {
    r.check = not_applicable("inf_monotone", "infimum-monotone", "window min u < -||u||_p never entered");
    return r;
  }
  std::string detail = "worst relative decrease inside the window";
  if (r.exit_time) detail += "; window exit at t=" + std::to_string(*r.exit_time);
  r.check = make_check("inf_monotone", ok, worst, 0.0, 1e-6, "infimum-monotone", detail);
  return r;
}

CheckResult monitor_L2_bound(const std::vector<Diagnostics>& traj, double rel_tol) {
  if (traj.empty()) return not_applicable("L2_bound", "L2-bound-energy-below", "empty trajectory");
  double e_min = std::numeric_limits<double>::infinity();
  for (const auto& d : traj) e_min = std::min(e_min, d.E);
  // E >= -C0 on the sampled window.
  const double c0 = -e_min;
  const double base = traj.front().F + traj.front().E + c0;
  double worst = -std::numeric_limits<double>::infinity();
  bool ok = true;
  for (const auto& d : traj) {
    const double bound = base * std::exp(d.t);
    const double excess = (d.F - bound) / std::max(bound, std::numeric_limits<double>::min());
    worst = std::max(worst, excess);
    if (d.F > bound + rel_tol * std::abs(bound)) ok = false;
  }
  return make_check("L2_bound", ok, worst, 0.0, rel_tol, "L2-bound-energy-below",
                    "max of (F - (F0 + E0 + C0) e^t) / bound, C0 = -min E = " + std::to_string(c0));
}

CheckResult monitor_mean_conservation(const SimulationResult& r) {
  double worst = r.max_abs_mode0;
  for (const auto& d : r.trajectory) worst = std::max(worst, d.mode0);
  return make_check("mean_conservation", worst == 0.0, worst, 0.0, 0.0, "mean-conserved",
                    "max |c_0| over accepted steps");
}

// ---------------------------------------------------------------- scaling

Field scaled_initial_data(const Field& u0, double lambda, double p) {
  if (!(lambda > 0.0)) fail(Errc::InvalidArgument, "scaling factor must be positive");
  const Grid g = u0.grid().with_domain(u0.grid().domain().dilated(1.0 / lambda));
  const double amp = std::pow(lambda, 2.0 / (p - 1.0));
  std::vector<double> v(u0.values().begin(), u0.values().end());
  for (double& x : v) x *= amp;
  return Field(g, std::move(v));
}

SolverConfig scaled_config(const SolverConfig& cfg, double lambda, const Grid& grid) {
  SolverConfig s = cfg;
  const double tf = 1.0 / (lambda * lambda);
  s.dt_init *= tf;
  s.dt_min *= tf;
  s.dt_max *= tf;
  s.t_end *= tf;
  for (double& t : s.checkpoints) t *= tf;
  s.u_max *= std::pow(lambda, 2.0 / (cfg.p - 1.0));
  s.grid = grid;
  return s;
}

ScalingResult scaling_covariance_check(const Field& u0, double lambda, const SolverConfig& cfg,
                                       const std::vector<double>& times, double tol) {
  const Field v0 = scaled_initial_data(u0, lambda, cfg.p);
  SolverConfig cu = cfg;
  cu.grid.reset();
  cu.checkpoints = times;
  const SolverConfig cv = scaled_config(cu, lambda, v0.grid());
  const SimulationResult ru = simulate(u0, cu);
  const SimulationResult rv = simulate(v0, cv);

  ScalingResult out;
  out.outcome_base = ru.outcome;
  out.outcome_scaled = rv.outcome;
  const double amp = std::pow(lambda, 2.0 / (cfg.p - 1.0));
  double worst = 0.0;
  for (double t : times) {
    auto find = [](const SimulationResult& r, double t) -> const Snapshot* {
      for (const auto& s : r.snapshots)
        if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, t)) return &s;
      return nullptr;
    };
    const Snapshot* su = find(ru, t);
    const Snapshot* sv = find(rv, t / (lambda * lambda));
    if (!su || !sv) continue;
    const Field fu = from_spectral(su->coeffs);
    const Field fv = from_spectral(sv->coeffs);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < fu.size(); ++i) {
      const double a = amp * fu[i];
      num += (a - fv[i]) * (a - fv[i]);
      den += a * a;
    }
    const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    out.discrepancies.push_back(rel);
    worst = std::max(worst, rel);
  }
  if (out.discrepancies.empty())
    out.smooth = not_applicable("scaling_smooth", "dilation-covariance", "no matched snapshot times");
  else
    out.smooth = make_check("scaling_smooth", worst <= tol, worst, 0.0, tol, "dilation-covariance",
                            "max relative L2 discrepancy over matched times");

  if (ru.outcome.kind == OutcomeKind::BlowUp && rv.outcome.kind == OutcomeKind::BlowUp && ru.outcome.T_estimate &&
      rv.outcome.T_estimate) {
    const double ratio = *ru.outcome.T_estimate / (lambda * lambda * *rv.outcome.T_estimate);
    out.blowup = make_check("scaling_blowup_time", std::abs(ratio - 1.0) <= 0.05, ratio, 1.0, 0.05,
                            "dilation-covariance", "T / (lambda^2 T_scaled)");
  } else {
    out.blowup = not_applicable("scaling_blowup_time", "dilation-covariance", "runs did not both blow up");
  }
  return out;
}

CheckResult energy_positivity_smalldata_check(const Field& u0, double p) {
  if (p != 2.0) return not_applicable("energy_positivity", "small-data-energy-positive", "needs p = 2");
  const double lam = u0.grid().domain().lambda1();
  const double linf = linf_norm(u0);
  if (linf > 1.5 * lam)
    return not_applicable("energy_positivity", "small-data-energy-positive", "||u0||_inf exceeds 1.5 lambda1");
  if (std::abs(mean(u0)) > 1e-12 * std::max(1.0, lp_norm(u0, 2.0)))
    fail(Errc::InvalidArgument, "energy positivity check needs mean-zero data");
  const SpectralCoeffs c = to_spectral(u0);
  const double e = energy(u0, p);
  const double floor = -1e-10 * (1.0 + grad_norm_sq(c));
  return make_check("energy_positivity", e >= floor, e, 0.0, -floor, "small-data-energy-positive",
                    "E(u0) with ||u0||_inf / lambda1 = " + std::to_string(linf / lam));
}

}  // namespace nlheat
