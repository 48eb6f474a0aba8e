#include "nlheat/report.hpp"

#include <cstdio>
#include <sstream>

namespace nlheat {

const char* status_name(CheckStatus s) noexcept {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

CheckResult make_check(std::string name, bool ok, double measured, double expected, double tol,
                       std::string anchor, std::string detail) {
  return CheckResult{std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, measured, expected, tol,
                     std::move(anchor), std::move(detail)};
}

CheckResult not_applicable(std::string name, std::string anchor, std::string detail) {
  return CheckResult{std::move(name), CheckStatus::NotApplicable, 0.0, 0.0, 0.0, std::move(anchor),
                     std::move(detail)};
}

int RunReport::fail_count() const noexcept {
  int n = 0;
  for (const auto& c : checks) n += c.status == CheckStatus::Fail;
  return n;
}

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string RunReport::to_text() const {
  std::ostringstream os;
  os << "# report " << name << '\n';
  for (const auto& line : config_echo) os << "# " << line << '\n';
  for (const auto& c : checks) {
    os << c.name << ' ' << status_name(c.status) << ' ' << num(c.measured) << ' ' << num(c.expected) << ' '
       << num(c.tol) << ' ' << c.anchor;
    if (!c.detail.empty()) os << "  # " << c.detail;
    os << '\n';
  }
  os << "# wall_seconds=" << num(wall_seconds) << '\n';
  os << "# failures=" << fail_count() << '\n';
  return os.str();
}

}  // namespace nlheat
