// Command-line front end. Talks to the library only through the C API.
#include <atomic>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nlheat/nlheat.h"

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2 };

struct Job {
  nlh_config* config = nullptr;
  nlh_result* result = nullptr;
  nlh_status status = NLH_OK;
  std::string error;
  std::string out_dir;
};

bool is_config_error(nlh_status s) {
  return s == NLH_ERR_PARSE || s == NLH_ERR_VALIDATION || s == NLH_ERR_INVALID_ARGUMENT;
}

void run_job(Job& j) {
  j.status = nlh_experiment_run(j.config, &j.result);
  if (j.status != NLH_OK) {
    j.error = nlh_last_error();
    return;
  }
  if (nlh_result_write(j.result, j.out_dir.c_str()) != NLH_OK) {
    j.status = NLH_ERR_IO;
    j.error = nlh_last_error();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal semilinear heat equation experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::vector<std::string> config_paths;
  std::string out_dir;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  app.add_option("--config", config_paths, "Experiment config file (repeatable)")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--jobs", jobs, "Run independent experiments on n threads")->check(CLI::Range(1u, 256u));
  auto* seed_opt = app.add_option("--seed", seed, "Replace the config seeds with a single seed");

  const char* commands[][2] = {
      {"simulate", "Random-data runs with solver monitors"},
      {"blowup", "Negative-energy seed: blow-up criterion and monitors"},
      {"decay", "Small-data global existence and decay"},
      {"kernel", "Heat-kernel constants and thresholds"},
      {"lplq", "Semigroup Lp-Lq and moment product suites"},
      {"sweep-theta", "Constrained minimization sweep in theta"},
      {"scaling", "Dilation covariance of the flow"},
      {"verify", "Invariant suite over every library module"},
  };
  for (auto& c : commands) app.add_subcommand(c[0], c[1]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  nlh_config* probe = nullptr;
  if (nlh_config_default(command.c_str(), &probe) != NLH_OK) {
    std::fprintf(stderr, "error: %s\n", nlh_last_error());
    return kUsage;
  }
  const char* want_kind = nullptr;
  nlh_config_kind(probe, &want_kind);
  const std::string kind = want_kind;

  std::vector<Job> work;
  auto cleanup = [&] {
    nlh_config_free(probe);
    for (auto& j : work) {
      nlh_result_free(j.result);
      nlh_config_free(j.config);
    }
  };
  if (config_paths.empty()) {
    work.push_back({probe, nullptr, NLH_OK, {}, {}});
    probe = nullptr;
  }
  for (const auto& path : config_paths) {
    Job j;
    if (nlh_config_load(path.c_str(), &j.config) != NLH_OK) {
      std::fprintf(stderr, "error: %s\n", nlh_last_error());
      cleanup();
      return kUsage;
    }
    const char* k = nullptr;
    nlh_config_kind(j.config, &k);
    if (kind != k) {
      std::fprintf(stderr, "error: %s: kind %s does not match subcommand %s\n", path.c_str(), k, command.c_str());
      nlh_config_free(j.config);
      cleanup();
      return kUsage;
    }
    work.push_back(j);
  }
  for (auto& j : work) {
    if (seed_opt->count() > 0) nlh_config_set_seed(j.config, seed);
    const char* name = nullptr;
    const char* dir = nullptr;
    nlh_config_name(j.config, &name);
    nlh_config_output_dir(j.config, &dir);
    if (out_dir.empty()) j.out_dir = dir;
    else j.out_dir = work.size() == 1 ? out_dir : out_dir + "/" + name;
  }

  // Experiments are independent; results are reported in config order.
  const unsigned n = std::min<unsigned>(jobs, static_cast<unsigned>(work.size()));
  if (n <= 1) {
    for (auto& j : work) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < work.size(); i = next++) run_job(work[i]);
      });
    }
    for (auto& t : pool) t.join();
  }

  int rc = kPass;
  for (auto& j : work) {
    if (j.status != NLH_OK) {
      std::fprintf(stderr, "error: %s: %s\n", nlh_status_name(j.status), j.error.c_str());
      rc = std::max(rc, is_config_error(j.status) ? int(kUsage) : int(kFail));
      continue;
    }
    const char* text = nullptr;
    nlh_result_report(j.result, &text);
    std::fputs(text, stdout);
    std::printf("# written to %s\n", j.out_dir.c_str());
    std::size_t fails = 0;
    nlh_result_fail_count(j.result, &fails);
    if (fails > 0) rc = std::max(rc, int(kFail));
  }
  cleanup();
  return rc;
}
