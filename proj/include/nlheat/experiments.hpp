#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nlheat/domain.hpp"
#include "nlheat/gamma.hpp"
#include "nlheat/report.hpp"
#include "nlheat/solver.hpp"

namespace nlheat {

enum class ExperimentKind {
  Simulate,
  BlowupCriterion,
  SmallDataDecay,
  KernelConstants,
  LpLqSuite,
  ThetaSweep,
  ScalingCheck,
  Verify,
};

const char* kind_name(ExperimentKind kind) noexcept;
// Accepts config names (blowup_criterion) and CLI subcommands (blowup).
std::optional<ExperimentKind> parse_kind(const std::string& text);

struct ExperimentConfig {
  std::string name = "run";
  ExperimentKind kind = ExperimentKind::Simulate;
  std::string output_dir = "out";
  std::vector<std::uint64_t> seeds{1};

  int dim = 1;
  std::vector<double> lengths{1.0};
  std::vector<int> points{256};

  SolverConfig solver;  // p lives here

  // initial data
  double amplitude = 1.0;         // simulate: grid max of the random field
  int max_mode = 16;
  double amplitude_factor = 2.0;  // blowup: multiple of the threshold amplitude
  bool grid_check = true;         // blowup: rerun on the doubled grid

  double r = 2.0;                 // decay

  std::vector<double> r_values{2.0, 3.0};  // kernel
  int per_decade = 16;
  int lattice = 8;
  int random_rectangles = 10;

  int lplq_fields = 50;           // lplq
  int holder_fields = 100;

  std::vector<double> thetas{1e-3, 1e-4, 1e-5};  // sweep
  MinimizeOptions minimize;
  int identity_fields = 50;

  double lambda = 2.0;            // scaling
  std::vector<double> scaling_times{0.01, 0.05, 0.1};

  std::string fault = "none";     // verify: none | skip_mode0_zeroing

  Domain domain() const;
  Grid grid() const;
  void validate() const;
  std::vector<std::string> echo() const;
};

// Flat sectioned key-value text:
//   [experiment] name kind output_dir seeds
//   [domain] dim lengths      [grid] points
//   [model] p                 [solver] scheme t_end dt_init dt_min dt_max cfl_c u_max dealias max_steps sample_every
//   [initial] amplitude max_mode amplitude_factor grid_check
//   [decay] r   [kernel] r_values per_decade lattice random_rectangles
//   [lplq] fields holder_fields   [sweep] thetas tol max_iter identity_fields
//   [scaling] lambda times        [verify] fault
// Lists are comma separated. Lines starting with ';' or '#' are comments.
// Throws Error(Parse) with the line number, Error(Validation) naming the field.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);
ExperimentConfig default_config(ExperimentKind kind);

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentOutput {
  RunReport report;
  std::vector<OutputFile> files;
};

ExperimentOutput run_simulate(const ExperimentConfig& config);
ExperimentOutput run_blowup_criterion(const ExperimentConfig& config);
ExperimentOutput run_small_data_decay(const ExperimentConfig& config);
ExperimentOutput run_kernel_constants(const ExperimentConfig& config);
ExperimentOutput run_lp_lq_suite(const ExperimentConfig& config);
ExperimentOutput run_theta_sweep(const ExperimentConfig& config);
ExperimentOutput run_scaling_check(const ExperimentConfig& config);
ExperimentOutput run_verify(const ExperimentConfig& config);
ExperimentOutput run_experiment(const ExperimentConfig& config);

// Writes report.txt plus every file into `dir` (created if missing).
void write_outputs(const ExperimentOutput& out, const std::string& dir);

// ---------------------------------------------------------------- building blocks

// phi = cos(pi x0 / L0) + cos(2 pi x0 / L0) / 2 and the amplitude a* where E(a phi) changes sign.
Field blowup_seed_profile(const Grid& grid);
double blowup_threshold_amplitude(const Grid& grid, double p);
// Solver defaults used for blow-up runs at exponent p and amplitude threshold u_max.
SolverConfig blowup_solver_defaults(double p);

std::string format_number(double v);  // %.17g
std::string trajectory_csv(const SimulationResult& result);
std::string sweep_csv(const SweepResult& sweep);
std::string field_csv(const Field& field);

// Invariants covered by verify, one entry per invariant of the library modules.
struct CoverageEntry {
  const char* id;
  const char* module;
};
std::vector<CoverageEntry> verify_manifest();

}  // namespace nlheat
