#pragma once

#include <map>
#include <vector>

#include "nlheat/domain.hpp"

namespace nlheat {

struct KernelEval {
  double t = 0.0;
  std::vector<double> x, y;
  double value = 0.0;
  int truncation = 0;  // modes kept on the longest axis
  double tail_bound = 0.0;
};

// Neumann heat kernel by eigen-expansion. Every axis keeps at least the modes
// with lambda_k t <= 40; a smaller requested truncation is raised to that.
KernelEval kernel_eval(const Domain& domain, double t, std::span<const double> x,
                       std::span<const double> y, int truncation = 0);

// Modes per axis needed so that lambda_k t <= 40 covers every kept mode.
int kernel_truncation(double length, double t);

struct HGrid {
  std::vector<double> times;                // log-spaced
  std::vector<std::vector<double>> points;  // sample points, corners and edge midpoints included
};

// Nested log-time grid over [min(1e-8 Lmin^2, 1e-6), 10 / lambda1] with
// `per_decade` points per decade, and the lattice {j L / lattice} on every axis.
// refine_h_grid doubles both resolutions while keeping every previous node.
HGrid default_h_grid(const Domain& domain, int per_decade = 16, int lattice = 8);
HGrid refine_h_grid(const Domain& domain, const HGrid& grid);

struct HEstimate {
  double value = 0.0;
  double t_at_max = 0.0;
  std::vector<double> x_at_max;
  bool max_at_small_t_end = false;
  bool max_at_large_t_end = false;
  int max_truncation = 0;
};

// Grid maximum of t^{N/2} (K(t,x,x) - 1/|Omega|).
HEstimate estimate_H(const Domain& domain, const HGrid& grid, int truncation = 0);

// Bessel function of the first kind by power series (accurate for |x| <~ 20).
double bessel_j(int order, double x);
// First positive zero of J_1' by bisection on [1.5, 2.5].
double bessel_j1_prime_first_zero();
// First positive Neumann eigenvalue of the unit-volume ball in dimension N (N = 1, 2).
double lambda1_star(int N);

struct KernelConstants {
  Domain domain;
  double lambda1 = 0.0;
  double H = 0.0;
  double lambda1_star = 0.0;
  std::map<double, double> rho_r;
  HGrid grid;
  HEstimate h_meta;
};

KernelConstants estimate_constants(const Domain& domain, const std::vector<double>& r_values = {},
                                   const HGrid* grid = nullptr);
// Constants with a caller-supplied H (no estimation).
KernelConstants constants_with_H(const Domain& domain, double H, const std::vector<double>& r_values = {});

double gamma_N_r(int N, double r);
double gamma_N(int N);

// Smallness threshold for global existence with decay rate lambda1 / r (p = 2).
double rho_r(const KernelConstants& constants, double r);
double rho_global(const KernelConstants& constants);
// Prefactor of the exponential decay bound ||u(t)||_inf <= C ||u0||_inf exp(-lambda1 t / r), t >= 1.
double decay_prefactor(const KernelConstants& constants, double r, double u0_linf);

// Exact heat semigroup in eigenspace: c_k(t) = c_k(0) exp(-lambda_k t).
SpectralCoeffs linear_heat_evolve(const SpectralCoeffs& c0, double t);
Field linear_heat_evolve(const Field& u0, double t);

struct MarginReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  bool violated = false;
};

// ||v(t)||_q <= [2^{p-1} H t^{-N/2}]^{1/p - 1/q} ||v0||_p for mean-zero v0.
// q = +infinity is evaluated as the grid maximum.
MarginReport verify_lp_lq(const Field& u0, double t, double p, double q, double H, double tol = 1e-12);

// (int |f|^a)(int |f|^b) <= |Omega| int |f|^{a+b}.
MarginReport holder_product_check(const Field& f, double alpha, double beta, double tol = 1e-12);

}  // namespace nlheat
