#pragma once

#include <string>
#include <vector>

namespace nlheat {

enum class CheckStatus { Pass, Fail, NotApplicable };

const char* status_name(CheckStatus s) noexcept;

// One line of a run report. `anchor` is a short token naming the property
// being checked (e.g. "energy-nonincreasing").
struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::NotApplicable;
  double measured = 0.0;
  double expected = 0.0;
  double tol = 0.0;
  std::string anchor;
  std::string detail;

  bool passed() const noexcept { return status != CheckStatus::Fail; }
};

CheckResult make_check(std::string name, bool ok, double measured, double expected, double tol,
                       std::string anchor, std::string detail = {});
CheckResult not_applicable(std::string name, std::string anchor, std::string detail);

struct RunReport {
  std::string name;
  std::vector<std::string> config_echo;
  std::vector<CheckResult> checks;
  double wall_seconds = 0.0;

  void add(CheckResult c) { checks.push_back(std::move(c)); }
  int fail_count() const noexcept;
  // `name status measured expected tol anchor`, one check per line.
  std::string to_text() const;
};

}  // namespace nlheat
