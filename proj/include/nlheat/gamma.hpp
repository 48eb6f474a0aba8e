#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlheat/domain.hpp"
#include "nlheat/report.hpp"

namespace nlheat {

// f(v) = v|v|^p - v + p/2 (1 - v^2) for v >= -1, extended by |v + 1| on [-2, -1).
struct DoubleWell {
  double p = 2.0;
  explicit DoubleWell(double p_);
};

double f_eval(const DoubleWell& w, double v);
double f_prime(const DoubleWell& w, double v);

struct ConstraintSetA {
  double tol_mean = 1e-12;
  double tol_norm = 1e-12;
  double floor = -1.0;
  int max_cycles = 500;
};

struct Feasibility {
  double mean = 0.0;   // |int v|
  double norm = 0.0;   // |int v^2 - 1|
  double floor = 0.0;  // max(0, -1 - min v)
};

Feasibility feasibility(const Field& v);
bool is_feasible(const Field& v, const ConstraintSetA& set = {});

// Cyclic projections onto {int v = 0}, {v >= -1}, {zero-mean fluctuation of unit L2 norm}.
// Throws ProjectionStall when no feasible point is reached.
Field project_A(const Field& v, const ConstraintSetA& set = {});

// eps int |grad v|^2 + (1/eps) int f(v), gradient term by Parseval.
double J_eps(const Field& v, double eps, const DoubleWell& w);
// Nodal quadrature of f(v).
double integral_f(const Field& v, const DoubleWell& w);

// int v|v|^p = int f(v) for feasible v on a unit-volume domain.
CheckResult rewrite_identity_check(const Field& v, double p);

struct MinimizeOptions {
  double tol = 1e-6;   // stop when ||P(v - tau g) - v|| / tau < tol max(1, ||g||)
  int max_iter = 200000;
  double armijo = 1e-4;
  ConstraintSetA set;
};

struct MinimizerResult {
  Field v;
  double J_value = 0.0;
  double eps = 0.0;
  int iterations = 0;
  Feasibility residuals;
  bool converged = false;
  std::vector<double> J_history;  // J after each accepted iteration, starting with the projected init
  double final_step_norm = 0.0;
  std::string stop_reason;  // step_norm, roundoff_stationary, line_search_stall, max_iter, infeasible
};

MinimizerResult minimize_J(double eps, const Field& init, const DoubleWell& w, const MinimizeOptions& opts = {});

// c = int_{-1}^{1} sqrt(f).
double mobility_constant(const DoubleWell& w);
// 2 m c: m interfaces, each of total variation 2 in the +-1 limit.
double limit_energy_1d(const DoubleWell& w, int interfaces);

// G(s) = int_{-1}^{s} sqrt(f), tabulated as a Hermite cubic in sqrt(1 + s).
class PhaseTable {
 public:
  explicit PhaseTable(const DoubleWell& w, double v_max = 16.0, int nodes_to_one = 2048);
  double operator()(double v) const;
  double at_one() const { return g_one_; }
  double v_max() const { return v_max_; }

 private:
  DoubleWell well_;
  double v_max_;
  std::vector<double> s_, g_, dg_;
  double g_one_ = 0.0;
};

// Discrete total variation of G(v): node differences (isotropic forward differences in 2-D).
double total_variation_G(const Field& v, const PhaseTable& G);

// Number of +-1 interfaces implied by TV(G(v)) ~ m c.
int interface_count(double tv_G, double c);

struct ModicaCheck {
  double J = 0.0;
  double twice_tv = 0.0;
  bool holds = false;
};
ModicaCheck modica_check(const Field& v, double eps, const DoubleWell& w, const PhaseTable& G, double rel_tol = 1e-8);

struct ProfileStats {
  double plateau_fraction = 0.0;  // volume fraction with | |v| - 1 | <= 0.1
  double layer_volume = 0.0;      // volume where |v| < 0.9
};
ProfileStats profile_stats(const Field& v);

// Points per eps on the coarsest axis; sweeps require >= 8.
double points_per_eps(const Grid& grid, double eps);

struct SweepRow {
  double theta = 0.0, eps = 0.0, I_theta = 0.0, ratio = 0.0;
  int iters = 0;
  Feasibility feas;
  double tv_G = 0.0;
  bool converged = false;
  bool modica_holds = false;
  bool identity_holds = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<Field> minimizers;
  double c = 0.0;
};

// Warm-started sweep in decreasing theta. The first minimization starts from a
// tanh profile across the middle of axis 0 unless `init` is given.
SweepResult theta_sweep(const DoubleWell& w, std::vector<double> thetas, const Grid& grid,
                        const MinimizeOptions& opts = {}, const std::optional<Field>& init = std::nullopt);

Field tanh_profile(const Grid& grid, double eps);

}  // namespace nlheat
