#include "nlheat/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "nlheat/error.hpp"

namespace nlheat {

DoubleWell::DoubleWell(double p_) : p(p_) {
  if (!(p_ > 1.0) || !std::isfinite(p_)) fail(Errc::InvalidArgument, "double well needs p > 1");
}

double f_eval(const DoubleWell& w, double v) {
  if (!(v >= -2.0)) fail(Errc::OutOfDomain, "f evaluated below -2");
  if (v < -1.0) return -(v + 1.0);
  const double a = std::abs(v);
  const double vp = w.p == 2.0 ? a * a : std::pow(a, w.p);
  return v * vp - v + 0.5 * w.p * (1.0 - v * v);
}

double f_prime(const DoubleWell& w, double v) {
  if (!(v >= -2.0)) fail(Errc::NonFinite, "f' evaluated below -2");
  if (v < -1.0) return -1.0;
  const double a = std::abs(v);
  const double vp = w.p == 2.0 ? a * a : std::pow(a, w.p);
  return (w.p + 1.0) * vp - w.p * v - 1.0;
}

// ---------------------------------------------------------------- constraint set

Feasibility feasibility(const Field& v) {
  const double h = v.grid().cell_volume();
  double s = 0.0, s2 = 0.0, lo = std::numeric_limits<double>::infinity();
  for (double x : v.values()) {
    s += x;
    s2 += x * x;
    lo = std::min(lo, x);
  }
  return {std::abs(s * h), std::abs(s2 * h - 1.0), std::max(0.0, -1.0 - lo)};
}

bool is_feasible(const Field& v, const ConstraintSetA& set) {
  const Feasibility r = feasibility(v);
  return r.mean <= set.tol_mean && r.norm <= set.tol_norm && r.floor <= set.tol_norm;
}

namespace {

// Every cyclic iterate after a clamp has the form max(-1, a x + b) in the input
// x, and so does the limit. Newton on (a, b) finishes what the cycles start.
bool solve_affine_clamp(const std::vector<double>& x, double h, double floor, double& a, double& b,
                        std::vector<double>& out) {
  const std::size_t n = x.size();
  out.resize(n);
  bool last = false;  // one extra step after the residual reaches roundoff level
  for (int it = 0; it < 60; ++it) {
    double f1 = 0, f2 = 0, j11 = 0, j12 = 0, j21 = 0, j22 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = a * x[i] + b;
      if (u > floor) {
        f1 += u;
        f2 += u * u;
        j11 += x[i];
        j12 += 1.0;
        j21 += 2.0 * u * x[i];
        j22 += 2.0 * u;
      } else {
        f1 += floor;
        f2 += floor * floor;
      }
    }
    f1 *= h;
    f2 = f2 * h - 1.0;
    if (last) break;
    last = std::abs(f1) <= 1e-13 && std::abs(f2) <= 1e-13;
    const double det = (j11 * j22 - j12 * j21) * h * h;
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return false;
    const double da = (f1 * j22 - f2 * j12) * h / det;
    const double db = (f2 * j11 - f1 * j21) * h / det;
    a -= da;
    b -= db;
    if (!(a > 0.0) || !std::isfinite(b)) return false;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(floor, a * x[i] + b);
  return true;
}

}  // namespace

Field project_A(const Field& v, const ConstraintSetA& set) {
  v.check_finite();
  const std::vector<double> x0(v.values().begin(), v.values().end());
  std::vector<double> x = x0;
  const double h = v.grid().cell_volume();
  const double n = static_cast<double>(x.size());
  double scale = 0.0;
  for (double a : x) scale = std::max(scale, std::abs(a));

  auto accept = [&](const std::vector<double>& y) {
    Field out(v.grid(), y);
    const Feasibility r = feasibility(out);
    return std::pair{r.mean <= set.tol_mean && r.norm <= set.tol_norm && r.floor <= set.tol_norm, out};
  };

  // Running affine map x = a x0 + b of the unclamped part.
  double a = 1.0, b = 0.0, best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int cycle = 0; cycle < set.max_cycles; ++cycle) {
    double m = 0.0;
    for (double y : x) m += y;
    m /= n;
    b -= m;
    for (double& y : x) y = std::max(y - m, set.floor);
    m = 0.0;
    for (double y : x) m += y;
    m /= n;
    double s2 = 0.0;
    for (double& y : x) {
      y -= m;
      s2 += y * y;
    }
    const double norm = std::sqrt(s2 * h);
    if (!(norm > 1e-13 * std::max(1.0, scale))) {
      fail(Errc::ProjectionStall, "projection onto A stalled: zero-mean part vanishes");
    }
    for (double& y : x) y /= norm;
    a /= norm;
    b = (b - m) / norm;

    const Feasibility r = feasibility(Field(v.grid(), x));
    const bool ok = r.mean <= set.tol_mean && r.norm <= set.tol_norm && r.floor <= set.tol_norm;
    if (r.floor < 0.5 * best) {
      best = r.floor;
      since_best = 0;
    } else {
      ++since_best;
    }
    // Once feasible, or once the rate turns linear, land on the limit point exactly.
    if (ok || since_best >= 3) {
      std::vector<double> y;
      double aa = a, bb = b;
      if (solve_affine_clamp(x0, h, set.floor, aa, bb, y)) {
        auto [ok2, out2] = accept(y);
        if (ok2) return out2;
      }
      if (ok) return Field(v.grid(), x);
      since_best = -1000000;  // Newton failed; keep cycling to the cap
    }
  }
  std::ostringstream os;
  os << "projection onto A stalled, floor residual " << best;
  fail(Errc::ProjectionStall, os.str());
}

// ---------------------------------------------------------------- functional

// Long double sums: near a minimizer the line search compares J values that
// differ in the last few bits of a double sum.
double integral_f(const Field& v, const DoubleWell& w) {
  long double s = 0.0L;
  for (double x : v.values()) s += f_eval(w, x);
  return static_cast<double>(s * v.grid().cell_volume());
}

double J_eps(const Field& v, double eps, const DoubleWell& w) {
  if (!(eps > 0.0)) fail(Errc::InvalidArgument, "eps must be positive");
  const SpectralCoeffs c = to_spectral(v);
  const auto lam = c.eigenvalues();
  long double g2 = 0.0L, f = 0.0L;
  for (std::size_t k = 0; k < c.size(); ++k) g2 += static_cast<long double>(lam[k]) * c[k] * c[k];
  for (double x : v.values()) f += f_eval(w, x);
  return static_cast<double>(eps * g2 + f * v.grid().cell_volume() / eps);
}

CheckResult rewrite_identity_check(const Field& v, double p) {
  const DoubleWell w(p);
  if (std::abs(v.grid().domain().volume() - 1.0) > 1e-12) {
    fail(Errc::InvalidArgument, "rewrite identity needs a unit-volume domain");
  }
  const Feasibility r = feasibility(v);
  if (r.mean > 1e-12 || r.norm > 1e-12 || r.floor > 1e-12) {
    fail(Errc::InvalidArgument, "rewrite identity needs a feasible field");
  }
  double lhs = 0.0;
  for (double x : v.values()) lhs += x * std::pow(std::abs(x), p);
  lhs *= v.grid().cell_volume();
  const double rhs = integral_f(v, w);
  const double diff = std::abs(lhs - rhs);
  const double tol = 1e-10 * (1.0 + rhs);
  std::ostringstream os;
  os << "int v|v|^p=" << lhs << " int f(v)=" << rhs;
  return make_check("rewrite_identity", diff <= tol && lhs >= -1e-10 && rhs >= -1e-10, diff, 0.0, tol,
                    "double-well-rewrite", os.str());
}

// ---------------------------------------------------------------- minimizer

namespace {

Field gradient_J(const Field& v, double eps, const DoubleWell& w) {
  SpectralCoeffs c = to_spectral(v);
  const auto lam = c.eigenvalues();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= 2.0 * eps * lam[k];
  Field g = from_spectral(c);
  auto gv = g.values();
  const auto vv = v.values();
  for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += f_prime(w, vv[i]) / eps;
  return g;
}

double l2_sq(const Field& a) {
  double s = 0.0;
  for (double x : a.values()) s += x * x;
  return s * a.grid().cell_volume();
}

Field axpy(const Field& x, double a, const Field& y) {
  Field out = x;
  auto o = out.values();
  const auto yv = y.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += a * yv[i];
  return out;
}

}  // namespace

MinimizerResult minimize_J(double eps, const Field& init, const DoubleWell& w, const MinimizeOptions& opts) {
  if (!(eps > 0.0 && eps <= 1.0)) fail(Errc::InvalidArgument, "eps must lie in (0, 1]");
  MinimizerResult res{project_A(init, opts.set), 0.0, eps, 0, {}, false, {}, 0.0, {}};
  Field& v = res.v;
  double J = J_eps(v, eps, w);
  res.J_history.push_back(J);

  // Stop test: projected-gradient step at the explicit stability scale of the gradient term.
  const double tau_ref = 1.0 / (2.0 * eps * v.grid().max_eigenvalue() + 1.0 / eps);
  double tau = tau_ref;
  Field g = gradient_J(v, eps, w);
  std::optional<Field> v_prev, g_prev;

  for (int it = 0; it < opts.max_iter; ++it) {
    const Field probe = project_A(axpy(v, -tau_ref, g), opts.set);
    res.final_step_norm = std::sqrt(l2_sq(probe - v)) / tau_ref;
    // The unprojected gradient carries the constraint forces, so it sets the scale.
    if (res.final_step_norm < opts.tol * std::max(1.0, std::sqrt(l2_sq(g)))) {
      res.converged = true;
      res.stop_reason = "step_norm";
      break;
    }

    // Barzilai-Borwein trial step, then monotone backtracking.
    if (v_prev) {
      const Field s = v - *v_prev;
      const Field y = g - *g_prev;
      const double sy = inner_product(s, y);
      tau = sy > 0.0 ? l2_sq(s) / sy : 2.0 * tau;
      tau = std::clamp(tau, tau_ref, 1e6 * tau_ref);
    }
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Field trial = tau == tau_ref ? probe : project_A(axpy(v, -tau, g), opts.set);
      const double Jt = J_eps(trial, eps, w);
      const double d2 = l2_sq(trial - v);
      if (Jt <= J - opts.armijo * d2 / tau && Jt <= J) {
        v_prev = v;
        g_prev = g;
        v = std::move(trial);
        J = Jt;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      // No representable descent. That is stationarity when the first-order
      // decrease at the largest stable step is below the resolution of J.
      const double predicted = tau_ref * res.final_step_norm * res.final_step_norm;
      if (predicted <= 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(J))) {
        res.converged = true;
        res.stop_reason = "roundoff_stationary";
      } else {
        res.stop_reason = "line_search_stall";
      }
      break;
    }
    g = gradient_J(v, eps, w);
    res.J_history.push_back(J);
    res.iterations = it + 1;
  }
  if (res.stop_reason.empty()) res.stop_reason = "max_iter";
  res.J_value = J;
  res.residuals = feasibility(v);
  if (res.converged && !is_feasible(v, opts.set)) {
    res.converged = false;
    res.stop_reason = "infeasible";
  }
  return res;
}

// ---------------------------------------------------------------- limit quantities

namespace {

// d/ds G(-1 + s^2) = 2 s sqrt(f(-1 + s^2))
double dG_ds(const DoubleWell& w, double s) {
  const double v = -1.0 + s * s;
  return 2.0 * s * std::sqrt(std::max(0.0, f_eval(w, v)));
}

double integrate_s(const DoubleWell& w, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double s) { return dG_ds(w, s); }, a, b, 12, 1e-13);
}

// Table cells are tiny and the integrand is smooth inside each one.
double integrate_cell(const DoubleWell& w, double a, double b) {
  return boost::math::quadrature::gauss<double, 10>::integrate([&](double s) { return dG_ds(w, s); }, a, b);
}

}  // namespace

double mobility_constant(const DoubleWell& w) { return integrate_s(w, 0.0, std::sqrt(2.0)); }

double limit_energy_1d(const DoubleWell& w, int interfaces) {
  if (interfaces < 1) fail(Errc::InvalidArgument, "need at least one interface");
  return 2.0 * interfaces * mobility_constant(w);
}

PhaseTable::PhaseTable(const DoubleWell& w, double v_max, int nodes_to_one) : well_(w), v_max_(v_max) {
  if (!(v_max > 1.0) || nodes_to_one < 8) fail(Errc::InvalidArgument, "phase table needs v_max > 1");
  // Uniform in s = sqrt(1 + v) on [0, sqrt 2] and beyond, so v = 1 is a node (kink of sqrt f).
  const double s1 = std::sqrt(2.0);
  const double ds = s1 / nodes_to_one;
  const double s_max = std::sqrt(1.0 + v_max);
  const int n = static_cast<int>(std::ceil(s_max / ds));
  s_.resize(n + 1);
  g_.resize(n + 1);
  dg_.resize(n + 1);
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    s_[i] = i * ds;
    if (i > 0) acc += integrate_cell(w, s_[i - 1], s_[i]);
    g_[i] = acc;
    dg_[i] = dG_ds(w, s_[i]);
    if (i == nodes_to_one) g_one_ = acc;
  }
  v_max_ = -1.0 + s_.back() * s_.back();
}

double PhaseTable::operator()(double v) const {
  if (v < -1.0) {
    if (v < -2.0) fail(Errc::OutOfDomain, "G evaluated below -2");
    return -(2.0 / 3.0) * std::pow(-1.0 - v, 1.5);
  }
  if (v > v_max_) fail(Errc::OutOfDomain, "G evaluated beyond the table");
  const double s = std::sqrt(1.0 + v);
  const double ds = s_[1] - s_[0];
  std::size_t i = std::min(static_cast<std::size_t>(s / ds), s_.size() - 2);
  const double h = s_[i + 1] - s_[i];
  const double t = (s - s_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * g_[i] + (t3 - 2 * t2 + t) * h * dg_[i] + (-2 * t3 + 3 * t2) * g_[i + 1] +
         (t3 - t2) * h * dg_[i + 1];
}

double total_variation_G(const Field& v, const PhaseTable& G) {
  const Grid& grid = v.grid();
  std::vector<double> gv(v.size());
  for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = G(v[i]);
  if (grid.dim() == 1) {
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < gv.size(); ++i) tv += std::abs(gv[i + 1] - gv[i]);
    return tv;
  }
  const int n0 = grid.points(0), n1 = grid.points(1);
  const double h0 = grid.spacing(0), h1 = grid.spacing(1);
  double tv = 0.0;
  for (int i = 0; i < n0; ++i) {
    for (int j = 0; j < n1; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n1 + j;
      const double d0 = i + 1 < n0 ? (gv[k + n1] - gv[k]) / h0 : 0.0;
      const double d1 = j + 1 < n1 ? (gv[k + 1] - gv[k]) / h1 : 0.0;
      tv += std::hypot(d0, d1);
    }
  }
  return tv * h0 * h1;
}

int interface_count(double tv_G, double c) { return static_cast<int>(std::lround(tv_G / c)); }

ModicaCheck modica_check(const Field& v, double eps, const DoubleWell& w, const PhaseTable& G, double rel_tol) {
  ModicaCheck m;
  m.J = J_eps(v, eps, w);
  m.twice_tv = 2.0 * total_variation_G(v, G);
  m.holds = m.J >= m.twice_tv - rel_tol * std::max(1.0, std::abs(m.twice_tv));
  return m;
}

ProfileStats profile_stats(const Field& v) {
  const double h = v.grid().cell_volume();
  ProfileStats st;
  for (double x : v.values()) {
    const double a = std::abs(x);
    if (std::abs(a - 1.0) <= 0.1) st.plateau_fraction += h;
    if (a < 0.9) st.layer_volume += h;
  }
  st.plateau_fraction /= v.grid().domain().volume();
  return st;
}

double points_per_eps(const Grid& grid, double eps) {
  double worst = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.dim(); ++a) worst = std::min(worst, eps / grid.spacing(a));
  return worst;
}

Field tanh_profile(const Grid& grid, double eps) {
  const double mid = 0.5 * grid.domain().length(0);
  return Field::from_function(grid, [&](std::span<const double> x) { return std::tanh((x[0] - mid) / eps); });
}

SweepResult theta_sweep(const DoubleWell& w, std::vector<double> thetas, const Grid& grid,
                        const MinimizeOptions& opts, const std::optional<Field>& init) {
  if (thetas.empty()) fail(Errc::InvalidArgument, "empty theta list");
  for (double t : thetas) {
    if (!(t > 0.0 && t <= 1.0)) fail(Errc::InvalidArgument, "theta must lie in (0, 1]");
    if (points_per_eps(grid, std::sqrt(t)) < 8.0) {
      std::ostringstream os;
      os << "grid does not resolve eps = " << std::sqrt(t) << " (needs 8 points per eps)";
      fail(Errc::UnresolvedInterface, os.str());
    }
  }
  std::sort(thetas.begin(), thetas.end(), std::greater<>());
  if (init && !(init->grid() == grid)) fail(Errc::ShapeMismatch, "sweep init lives on another grid");

  SweepResult out;
  out.c = mobility_constant(w);
  const PhaseTable G(w);
  const bool unit_volume = std::abs(grid.domain().volume() - 1.0) <= 1e-12;
  Field start = init ? *init : tanh_profile(grid, std::sqrt(thetas.front()));
  for (double theta : thetas) {
    const double eps = std::sqrt(theta);
    MinimizerResult r = minimize_J(eps, start, w, opts);
    SweepRow row;
    row.theta = theta;
    row.eps = eps;
    row.I_theta = eps * r.J_value;
    row.ratio = r.J_value;
    row.iters = r.iterations;
    row.feas = r.residuals;
    row.tv_G = total_variation_G(r.v, G);
    row.converged = r.converged;
    row.modica_holds = modica_check(r.v, eps, w, G).holds;
    row.identity_holds = unit_volume && rewrite_identity_check(r.v, w.p).passed();
    out.rows.push_back(row);
    start = r.v;
    out.minimizers.push_back(std::move(r.v));
  }
  return out;
}

}  // namespace nlheat
