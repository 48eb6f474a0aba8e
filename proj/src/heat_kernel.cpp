#include "nlheat/heat_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlheat/error.hpp"

namespace nlheat {
namespace {

constexpr double kModeCut = 40.0;  // keep modes with lambda_k t <= 40

struct AxisSum {
  double excess = 0.0;  // K_axis - 1/L
  double tail = 0.0;
};

// Off-constant part of the 1-D Neumann kernel on [0, L] with `modes` modes (k < modes).
AxisSum axis_excess(double length, double t, double x, double y, int modes) {
  const double w = kPi / length;
  double s = 0.0;
  for (int k = 1; k < modes; ++k) {
    const double lam = (k * w) * (k * w);
    s += std::exp(-lam * t) * std::cos(k * w * x) * std::cos(k * w * y);
  }
  AxisSum out;
  out.excess = 2.0 / length * s;
  const double a = w * w * t;
  const double first = std::exp(-a * static_cast<double>(modes) * modes);
  const double ratio = std::exp(-a * (2.0 * modes + 1.0));
  out.tail = 2.0 / length * first / (1.0 - ratio);
  return out;
}

}  // namespace

int kernel_truncation(double length, double t) {
  return static_cast<int>(std::floor(std::sqrt(kModeCut / t) * length / kPi)) + 1;
}

KernelEval kernel_eval(const Domain& domain, double t, std::span<const double> x, std::span<const double> y,
                       int truncation) {
  if (!(t > 0.0)) fail(Errc::InvalidArgument, "kernel time must be positive");
  if (!domain.contains(x) || !domain.contains(y)) fail(Errc::OutOfDomain, "kernel point outside the domain");
  KernelEval out;
  out.t = t;
  out.x.assign(x.begin(), x.end());
  out.y.assign(y.begin(), y.end());
  double value = 1.0;
  double magnitude = 1.0;  // product of |K_a| + tail_a
  for (int a = 0; a < domain.dim(); ++a) {
    const double l = domain.length(a);
    const int modes = std::max(truncation, kernel_truncation(l, t));
    out.truncation = std::max(out.truncation, modes);
    const AxisSum s = axis_excess(l, t, x[a], y[a], modes);
    const double ka = 1.0 / l + s.excess;
    value *= ka;
    magnitude *= std::abs(ka) + s.tail;
  }
  out.value = value;
  out.tail_bound = magnitude - std::abs(value);
  return out;
}

// ---------------------------------------------------------------- H(Omega)

namespace {

HGrid build_h_grid(const Domain& domain, int n_times, int lattice) {
  const double t_lo = std::min(1e-8 * domain.min_length() * domain.min_length(), 1e-6);
  const double t_hi = 10.0 / domain.lambda1();
  HGrid g;
  g.times.resize(static_cast<std::size_t>(n_times));
  for (int i = 0; i < n_times; ++i)
    g.times[i] = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (n_times - 1));
  g.times.front() = t_lo;
  g.times.back() = t_hi;
  const int n1 = domain.dim() == 2 ? lattice + 1 : 1;
  for (int i = 0; i <= lattice; ++i) {
    for (int j = 0; j < n1; ++j) {
      std::vector<double> p{domain.length(0) * i / lattice};
      if (domain.dim() == 2) p.push_back(domain.length(1) * j / lattice);
      g.points.push_back(std::move(p));
    }
  }
  return g;
}

int lattice_of(const Domain& domain, const HGrid& g) {
  const std::size_t per_axis = domain.dim() == 2 ? static_cast<std::size_t>(std::llround(std::sqrt(g.points.size())))
                                                 : g.points.size();
  return static_cast<int>(per_axis) - 1;
}

}  // namespace

HGrid default_h_grid(const Domain& domain, int per_decade, int lattice) {
  if (per_decade < 1 || lattice < 2 || lattice % 2 != 0)
    fail(Errc::InvalidArgument, "H grid needs per_decade >= 1 and an even lattice >= 2");
  const double t_lo = std::min(1e-8 * domain.min_length() * domain.min_length(), 1e-6);
  const double t_hi = 10.0 / domain.lambda1();
  const int n_times = static_cast<int>(std::ceil(std::log10(t_hi / t_lo) * per_decade)) + 1;
  return build_h_grid(domain, n_times, lattice);
}

HGrid refine_h_grid(const Domain& domain, const HGrid& grid) {
  return build_h_grid(domain, 2 * static_cast<int>(grid.times.size()) - 1, 2 * lattice_of(domain, grid));
}

HEstimate estimate_H(const Domain& domain, const HGrid& grid, int truncation) {
  if (grid.times.empty() || grid.points.empty()) fail(Errc::InvalidArgument, "H estimation grids are empty");
  const int dim = domain.dim();
  // Distinct coordinates per axis; the diagonal kernel factorizes over axes.
  std::vector<std::vector<double>> coords(static_cast<std::size_t>(dim));
  for (const auto& p : grid.points) {
    if (!domain.contains(p)) fail(Errc::OutOfDomain, "H sample point outside the domain");
    for (int a = 0; a < dim; ++a) coords[a].push_back(p[a]);
  }
  for (auto& c : coords) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  auto slot = [&](int a, double v) {
    return static_cast<std::size_t>(std::lower_bound(coords[a].begin(), coords[a].end(), v) - coords[a].begin());
  };

  HEstimate best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> excess(static_cast<std::size_t>(dim));
  for (std::size_t ti = 0; ti < grid.times.size(); ++ti) {
    const double t = grid.times[ti];
    if (!(t > 0.0)) fail(Errc::InvalidArgument, "H time grid must be positive");
    for (int a = 0; a < dim; ++a) {
      const double l = domain.length(a);
      const int modes = std::max(truncation, kernel_truncation(l, t));
      best.max_truncation = std::max(best.max_truncation, modes);
      excess[a].resize(coords[a].size());
      for (std::size_t c = 0; c < coords[a].size(); ++c)
        excess[a][c] = axis_excess(l, t, coords[a][c], coords[a][c], modes).excess;
    }
    const double weight = std::pow(t, 0.5 * dim);
    for (const auto& p : grid.points) {
      double k0;
      if (dim == 1) {
        k0 = excess[0][slot(0, p[0])];
      } else {
        const double e0 = excess[0][slot(0, p[0])], e1 = excess[1][slot(1, p[1])];
        k0 = e0 / domain.length(1) + e1 / domain.length(0) + e0 * e1;
      }
      const double v = weight * k0;
      if (v > best.value) {
        best.value = v;
        best.t_at_max = t;
        best.x_at_max = p;
        best.max_at_small_t_end = ti == 0;
        best.max_at_large_t_end = ti + 1 == grid.times.size();
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------- Bessel / lambda1*

double bessel_j(int order, double x) {
  if (order < 0) fail(Errc::InvalidArgument, "bessel_j needs a nonnegative order");
  const double half = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= order; ++i) term *= half / i;
  double sum = term;
  const double q = -half * half;
  for (int m = 1; m < 200; ++m) {
    term *= q / (static_cast<double>(m) * (m + order));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_j1_prime_first_zero() {
  auto d = [](double x) { return 0.5 * (bessel_j(0, x) - bessel_j(2, x)); };
  double lo = 1.5, hi = 2.5;
  double flo = d(lo);
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    const double fm = d(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double lambda1_star(int N) {
  if (N == 1) return kPi * kPi;
  if (N == 2) {
    // Disk of area 1 has radius pi^{-1/2}: lambda = (j'_{1,1} / R)^2 = pi j'^2.
    const double j = bessel_j1_prime_first_zero();
    return kPi * j * j;
  }
  fail(Errc::InvalidArgument, "lambda1_star supports N = 1 or 2");
}

// ---------------------------------------------------------------- thresholds

double gamma_N_r(int N, double r) {
  const double a = 1.0 + std::exp(-1.0) / (2.0 * (1.0 - N / (2.0 * r)));
  return std::pow(a, r) * std::pow(2.0, r - 1.0) * std::pow(r, -0.5 * N);
}

double gamma_N(int N) { return 128.0 / N; }

double rho_r(const KernelConstants& c, double r) {
  const int N = c.domain.dim();
  if (!(r > 0.5 * N) || !(r >= 2.0)) fail(Errc::InvalidArgument, "rho_r requires r > N/2 and r >= 2");
  const double inner = gamma_N_r(N, r) * std::pow(c.lambda1, 0.5 * N) * c.domain.volume() * c.H;
  return c.lambda1 / (4.0 * r) * std::exp(-std::pow(inner, 2.0 / N));
}

double rho_global(const KernelConstants& c) {
  const int N = c.domain.dim();
  return c.lambda1 / (2.0 * N) * std::exp(-gamma_N(N) * c.lambda1_star * std::pow(c.H, 2.0 / N));
}

double decay_prefactor(const KernelConstants& c, double r, double u0_linf) {
  const int N = c.domain.dim();
  return std::pow(2.0, (r - 1.0) / r) * std::pow(c.domain.volume(), 1.0 / r) * std::pow(c.H, 1.0 / r) *
         (1.0 + 2.0 * u0_linf / (1.0 - N / (2.0 * r)));
}

KernelConstants constants_with_H(const Domain& domain, double H, const std::vector<double>& r_values) {
  KernelConstants c{domain, domain.lambda1(), H, lambda1_star(domain.dim()), {}, {}, {}};
  for (double r : r_values) c.rho_r[r] = rho_r(c, r);
  return c;
}

KernelConstants estimate_constants(const Domain& domain, const std::vector<double>& r_values, const HGrid* grid) {
  HGrid g = grid ? *grid : default_h_grid(domain);
  HEstimate h = estimate_H(domain, g);
  KernelConstants c = constants_with_H(domain, h.value, r_values);
  c.grid = std::move(g);
  c.h_meta = std::move(h);
  return c;
}

// ---------------------------------------------------------------- semigroup

SpectralCoeffs linear_heat_evolve(const SpectralCoeffs& c0, double t) {
  if (!(t >= 0.0)) fail(Errc::InvalidArgument, "heat evolution time must be nonnegative");
  SpectralCoeffs c = c0;
  const auto ev = c.eigenvalues();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::exp(-ev[k] * t);
  return c;
}

Field linear_heat_evolve(const Field& u0, double t) { return from_spectral(linear_heat_evolve(to_spectral(u0), t)); }

MarginReport verify_lp_lq(const Field& u0, double t, double p, double q, double H, double tol) {
  if (!(t > 0.0)) fail(Errc::InvalidArgument, "Lp-Lq check needs t > 0");
  if (!(p > 1.0) || !(q >= p)) fail(Errc::InvalidArgument, "Lp-Lq check needs 1 < p <= q");
  if (std::abs(mean(u0)) > 1e-12 * std::max(lp_norm(u0, 2.0), std::numeric_limits<double>::min()))
    fail(Errc::InvalidArgument, "Lp-Lq check needs a mean-zero initial field");
  const int N = u0.grid().dim();
  const Field v = linear_heat_evolve(u0, t);
  MarginReport m;
  m.lhs = std::isinf(q) ? linf_norm(v) : lp_norm(v, q);
  const double exponent = 1.0 / p - (std::isinf(q) ? 0.0 : 1.0 / q);
  m.rhs = std::pow(std::pow(2.0, p - 1.0) * H * std::pow(t, -0.5 * N), exponent) * lp_norm(u0, p);
  m.slack = m.rhs - m.lhs;
  m.violated = m.slack < -tol * m.rhs;
  return m;
}

MarginReport holder_product_check(const Field& f, double alpha, double beta, double tol) {
  if (!(alpha >= 1.0) || !(beta >= 1.0)) fail(Errc::InvalidArgument, "exponents must be >= 1");
  const double w = f.grid().cell_volume();
  double sa = 0.0, sb = 0.0, sab = 0.0;
  for (double v : f.values()) {
    const double a = std::abs(v);
    sa += std::pow(a, alpha);
    sb += std::pow(a, beta);
    sab += std::pow(a, alpha + beta);
  }
  MarginReport m;
  m.lhs = (sa * w) * (sb * w);
  m.rhs = f.grid().domain().volume() * sab * w;
  m.slack = m.rhs - m.lhs;
  m.violated = m.slack < -tol * m.rhs;
  return m;
}

}  // namespace nlheat
