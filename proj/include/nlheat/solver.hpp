#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nlheat/domain.hpp"
#include "nlheat/report.hpp"

namespace nlheat {

// IMEX1: exponential Euler (linear part exact, nonlinear term frozen over the step).
// ETD2: second-order exponential Runge-Kutta (Cox-Matthews).
enum class StepScheme { IMEX1, ETD2 };

struct SolverConfig {
  double p = 2.0;
  double dt_init = 1e-4;
  double dt_min = 1e-10;
  double dt_max = 1e-3;
  double cfl_c = 0.1;
  double u_max = 1e6;
  double t_end = 1.0;
  std::optional<Grid> grid;  // defaults to the grid of u0
  bool dealias = true;
  StepScheme step_scheme = StepScheme::IMEX1;

  long max_steps = 20'000'000;
  int sample_every = 1;              // record diagnostics every n accepted steps
  std::vector<double> checkpoints;   // times hit exactly; coefficients stored
  bool fault_skip_mode0_zeroing = false;  // mutation canary for the verify suite

  void validate() const;
};

struct SolverState {
  double t = 0.0;
  SpectralCoeffs coeffs;
  long step_index = 0;
  double last_dt = 0.0;
};

struct Diagnostics {
  double t = 0.0;
  double E = 0.0;
  double F = 0.0;
  double linf = 0.0;
  double umin = 0.0;
  double lp = 0.0;
  double grad2 = 0.0;
  double dF_dt_rhs = 0.0;  // -(p+1) E + (p-1)/2 grad2, i.e. F'/2
  double dt = 0.0;
  double mode0 = 0.0;      // |c_0| after the step
};

enum class OutcomeKind { Completed, BlowUp, StepFloor };
const char* outcome_name(OutcomeKind k) noexcept;

struct Outcome {
  OutcomeKind kind = OutcomeKind::Completed;
  std::optional<double> T_estimate;
  std::string reason;
};

struct Snapshot {
  double t = 0.0;
  SpectralCoeffs coeffs;
};

struct SimulationResult {
  std::vector<Diagnostics> trajectory;
  Outcome outcome;
  SolverState final_state;
  std::vector<Snapshot> snapshots;
  long accepted_steps = 0;
  long rejected_steps = 0;
  double max_abs_mode0 = 0.0;
};

// Grid on which |u|^p is evaluated: the base grid, 3/2-type padding for even
// integer p, 2x otherwise.
Grid nonlinear_grid(const Grid& base, double p, bool dealias);

// |u|^p minus its mean, projected back on the base modes; mode 0 is set to 0.
Field nonlinear_term(const Field& u, double p, bool dealias = true);
SpectralCoeffs nonlinear_coeffs(const SpectralCoeffs& c, double p, const Grid& fine, bool zero_mode0 = true);

// 1/2 int |grad u|^2 - 1/(p+1) int u |u|^p.
double energy(const Field& u, double p, bool dealias = true);
double energy(const SpectralCoeffs& c, double p, const Grid& fine);

Diagnostics diagnose(const SpectralCoeffs& c, double p, const Grid& fine, double t, double dt);

// Adaptive step: clamp(cfl_c / max(1, p ||u||_inf^{p-1}), dt_min, dt_max).
double adaptive_dt(double linf, const SolverConfig& config);

// One step of size state.last_dt (or dt_init when the state is fresh); throws NonFinite.
SolverState step(const SolverState& state, const SolverConfig& config);
SolverState step_with(const SolverState& state, const SolverConfig& config, double dt, const Grid& fine);

using StepObserver = std::function<void(const SolverState&, const Diagnostics&)>;

SimulationResult simulate(const Field& u0, const SolverConfig& config, const StepObserver& observer = {});

// T from a linear fit of 1/(d log F / dt) over the last decade of growth of F.
double fit_blowup_time(const std::vector<Diagnostics>& traj);
// Slope of log F' against log F over the last decade of growth, F' = 2 dF_dt_rhs.
double fit_growth_exponent(const std::vector<Diagnostics>& traj);

// ---------------------------------------------------------------- monitors

CheckResult monitor_energy_decay(const std::vector<Diagnostics>& traj);
// Central-difference F'/2 against the stored right-hand side on uniformly spaced
// sample triples; samples with F above `F_cap` are skipped (0 = no cap).
CheckResult monitor_F_identity(const std::vector<Diagnostics>& traj, double p, double rel_tol = 1e-3,
                               double F_cap = 0.0);
// F(t) >= F(0) exp((p-1) lambda1 t) within 1% while F <= F_cap (0 = no cap). Needs E(0) <= 0.
CheckResult monitor_F_exponential_lower(const std::vector<Diagnostics>& traj, double p, double lambda1,
                                        double F_cap = 0.0);

struct MinPrincipleHypotheses {
  bool nonpositive_energy = false;  // E(u0) <= 0
  bool floor_l2 = false;            // u0 >= -||u0||_2
  bool p_in_range = false;          // 1 < p <= 2
  bool floor_lp = false;            // u0 >= -||u0||_p
  bool all_l2() const { return nonpositive_energy && floor_l2 && p_in_range; }
};
MinPrincipleHypotheses min_principle_hypotheses(const Field& u0, double p);
CheckResult monitor_min_principle(const std::vector<Diagnostics>& traj, const MinPrincipleHypotheses& h);
CheckResult monitor_min_principle_lp(const std::vector<Diagnostics>& traj, const MinPrincipleHypotheses& h);

struct InfMonotoneResult {
  CheckResult check;
  std::optional<double> exit_time;  // first time the window umin < -lp is left
};
InfMonotoneResult monitor_inf_monotone(const std::vector<Diagnostics>& traj);

CheckResult monitor_L2_bound(const std::vector<Diagnostics>& traj, double rel_tol = 1e-8);

CheckResult monitor_mean_conservation(const SimulationResult& result);

struct ScalingResult {
  CheckResult smooth;   // relative L2 discrepancy at the requested times
  CheckResult blowup;   // T on the domain vs lambda^2 T on the shrunk domain, within 5%
  std::vector<double> discrepancies;
  Outcome outcome_base, outcome_scaled;
};
// Runs u0 on the grid's domain and v0 = lambda^{2/(p-1)} u0(lambda x) on the
// domain shrunk by lambda, with every time parameter scaled by lambda^-2.
ScalingResult scaling_covariance_check(const Field& u0, double lambda, const SolverConfig& config,
                                       const std::vector<double>& times, double tol = 1e-4);
SolverConfig scaled_config(const SolverConfig& config, double lambda, const Grid& grid);
Field scaled_initial_data(const Field& u0, double lambda, double p);

// If ||u0||_inf <= 1.5 lambda1 (p = 2), E(u0) >= -1e-10 (1 + int |grad u0|^2).
CheckResult energy_positivity_smalldata_check(const Field& u0, double p = 2.0);

}  // namespace nlheat
