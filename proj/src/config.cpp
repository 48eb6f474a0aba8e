#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nlheat/error.hpp"
#include "nlheat/experiments.hpp"

namespace nlheat {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* config;
  const char* command;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::Simulate, "simulate", "simulate"},
    {ExperimentKind::BlowupCriterion, "blowup_criterion", "blowup"},
    {ExperimentKind::SmallDataDecay, "small_data_decay", "decay"},
    {ExperimentKind::KernelConstants, "kernel_constants", "kernel"},
    {ExperimentKind::LpLqSuite, "lp_lq_suite", "lplq"},
    {ExperimentKind::ThetaSweep, "theta_sweep", "sweep-theta"},
    {ExperimentKind::ScalingCheck, "scaling_check", "scaling"},
    {ExperimentKind::Verify, "verify", "verify"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Inline comments need whitespace before the marker.
std::string strip_inline_comment(const std::string& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if ((s[i] == ';' || s[i] == '#') && (s[i - 1] == ' ' || s[i - 1] == '\t')) return trim(s.substr(0, i));
  }
  return trim(s);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& field, const std::string& why) {
  fail(Errc::Validation, field + ": " + why);
}

double to_double(const std::string& field, const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    bad_value(field, "not a number: '" + s + "'");
  }
  if (pos != s.size()) bad_value(field, "not a number: '" + s + "'");
  return v;
}

long long to_integer(const std::string& field, const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    bad_value(field, "not an integer: '" + s + "'");
  }
  if (pos != s.size()) bad_value(field, "not an integer: '" + s + "'");
  return v;
}

std::uint64_t to_u64(const std::string& field, const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    bad_value(field, "not an unsigned integer: '" + s + "'");
  }
  if (pos != s.size()) bad_value(field, "not an unsigned integer: '" + s + "'");
  return v;
}

bool to_bool(const std::string& field, const std::string& s) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  bad_value(field, "not a boolean: '" + s + "'");
}

std::vector<double> to_doubles(const std::string& field, const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(to_double(field, item));
  if (out.empty()) bad_value(field, "empty list");
  return out;
}

int to_int(const std::string& field, const std::string& s) {
  const long long v = to_integer(field, s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) bad_value(field, "out of range");
  return static_cast<int>(v);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& field, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment.name", [](auto& c, auto&, auto& v) { c.name = v; }},
      {"experiment.kind",
       [](auto& c, auto& f, auto& v) {
         auto k = parse_kind(v);
         if (!k) bad_value(f, "unknown kind '" + v + "'");
         c.kind = *k;
       }},
      {"experiment.output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
      {"experiment.seeds",
       [](auto& c, auto& f, auto& v) {
         c.seeds.clear();
         for (const auto& s : split_list(v)) c.seeds.push_back(to_u64(f, s));
       }},
      {"domain.dim", [](auto& c, auto& f, auto& v) { c.dim = to_int(f, v); }},
      {"domain.lengths", [](auto& c, auto& f, auto& v) { c.lengths = to_doubles(f, v); }},
      {"grid.points",
       [](auto& c, auto& f, auto& v) {
         c.points.clear();
         for (const auto& s : split_list(v)) c.points.push_back(to_int(f, s));
       }},
      {"model.p", [](auto& c, auto& f, auto& v) { c.solver.p = to_double(f, v); }},
      {"solver.scheme",
       [](auto& c, auto& f, auto& v) {
         if (v == "IMEX1" || v == "imex1") c.solver.step_scheme = StepScheme::IMEX1;
         else if (v == "ETD2" || v == "etd2") c.solver.step_scheme = StepScheme::ETD2;
         else bad_value(f, "unknown scheme '" + v + "' (IMEX1 or ETD2)");
       }},
      {"solver.t_end", [](auto& c, auto& f, auto& v) { c.solver.t_end = to_double(f, v); }},
      {"solver.dt_init", [](auto& c, auto& f, auto& v) { c.solver.dt_init = to_double(f, v); }},
      {"solver.dt_min", [](auto& c, auto& f, auto& v) { c.solver.dt_min = to_double(f, v); }},
      {"solver.dt_max", [](auto& c, auto& f, auto& v) { c.solver.dt_max = to_double(f, v); }},
      {"solver.cfl_c", [](auto& c, auto& f, auto& v) { c.solver.cfl_c = to_double(f, v); }},
      {"solver.u_max", [](auto& c, auto& f, auto& v) { c.solver.u_max = to_double(f, v); }},
      {"solver.dealias", [](auto& c, auto& f, auto& v) { c.solver.dealias = to_bool(f, v); }},
      {"solver.max_steps", [](auto& c, auto& f, auto& v) { c.solver.max_steps = to_integer(f, v); }},
      {"solver.sample_every", [](auto& c, auto& f, auto& v) { c.solver.sample_every = to_int(f, v); }},
      {"initial.amplitude", [](auto& c, auto& f, auto& v) { c.amplitude = to_double(f, v); }},
      {"initial.max_mode", [](auto& c, auto& f, auto& v) { c.max_mode = to_int(f, v); }},
      {"initial.amplitude_factor", [](auto& c, auto& f, auto& v) { c.amplitude_factor = to_double(f, v); }},
      {"initial.grid_check", [](auto& c, auto& f, auto& v) { c.grid_check = to_bool(f, v); }},
      {"decay.r", [](auto& c, auto& f, auto& v) { c.r = to_double(f, v); }},
      {"kernel.r_values", [](auto& c, auto& f, auto& v) { c.r_values = to_doubles(f, v); }},
      {"kernel.per_decade", [](auto& c, auto& f, auto& v) { c.per_decade = to_int(f, v); }},
      {"kernel.lattice", [](auto& c, auto& f, auto& v) { c.lattice = to_int(f, v); }},
      {"kernel.random_rectangles", [](auto& c, auto& f, auto& v) { c.random_rectangles = to_int(f, v); }},
      {"lplq.fields", [](auto& c, auto& f, auto& v) { c.lplq_fields = to_int(f, v); }},
      {"lplq.holder_fields", [](auto& c, auto& f, auto& v) { c.holder_fields = to_int(f, v); }},
      {"sweep.thetas", [](auto& c, auto& f, auto& v) { c.thetas = to_doubles(f, v); }},
      {"sweep.tol", [](auto& c, auto& f, auto& v) { c.minimize.tol = to_double(f, v); }},
      {"sweep.max_iter", [](auto& c, auto& f, auto& v) { c.minimize.max_iter = to_int(f, v); }},
      {"sweep.identity_fields", [](auto& c, auto& f, auto& v) { c.identity_fields = to_int(f, v); }},
      {"scaling.lambda", [](auto& c, auto& f, auto& v) { c.lambda = to_double(f, v); }},
      {"scaling.times", [](auto& c, auto& f, auto& v) { c.scaling_times = to_doubles(f, v); }},
      {"verify.fault", [](auto& c, auto&, auto& v) { c.fault = v; }},
  };
  return table;
}

void apply_kind_defaults(ExperimentConfig& c) {
  switch (c.kind) {
    case ExperimentKind::BlowupCriterion:
      c.points = {512};
      c.solver = blowup_solver_defaults(c.solver.p);
      break;
    case ExperimentKind::SmallDataDecay:
      c.solver.dt_init = 1e-3;
      c.solver.dt_max = 1e-2;
      break;
    case ExperimentKind::LpLqSuite:
    case ExperimentKind::KernelConstants:
      break;
    case ExperimentKind::ThetaSweep:
      c.points = {4096};
      break;
    case ExperimentKind::ScalingCheck:
      c.solver.dt_init = c.solver.dt_min = c.solver.dt_max = 1e-4;
      c.solver.t_end = 0.1;
      c.amplitude = 2.0;
      c.max_mode = 6;
      break;
    case ExperimentKind::Simulate:
      c.solver.t_end = 0.1;
      break;
    case ExperimentKind::Verify:
      break;
  }
}

}  // namespace

const char* kind_name(ExperimentKind kind) noexcept {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.config;
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(const std::string& text) {
  for (const auto& k : kKinds) {
    if (text == k.config || text == k.command) return k.kind;
  }
  return std::nullopt;
}

Domain ExperimentConfig::domain() const { return make_domain(dim, lengths); }

Grid ExperimentConfig::grid() const { return Grid(domain(), points); }

void ExperimentConfig::validate() const {
  if (name.empty()) bad_value("[experiment] name", "must not be empty");
  if (output_dir.empty()) bad_value("[experiment] output_dir", "must not be empty");
  if (seeds.empty()) bad_value("[experiment] seeds", "at least one seed is required");
  if (dim != 1 && dim != 2) bad_value("[domain] dim", "must be 1 or 2");
  if (static_cast<int>(lengths.size()) != dim) bad_value("[domain] lengths", "need one length per axis");
  for (double l : lengths) {
    if (!(l > 0.0) || !std::isfinite(l)) bad_value("[domain] lengths", "lengths must be positive");
  }
  if (static_cast<int>(points.size()) != dim) bad_value("[grid] points", "need one count per axis");
  for (int m : points) {
    if (m < 4) bad_value("[grid] points", "at least 4 points per axis");
  }
  if (!(solver.p > 1.0) || !std::isfinite(solver.p)) bad_value("[model] p", "p must exceed 1");
  try {
    solver.validate();
  } catch (const Error& e) {
    fail(Errc::Validation, std::string("[solver] ") + e.what());
  }
  if (!(amplitude >= 0.0)) bad_value("[initial] amplitude", "must be nonnegative");
  if (max_mode < 1) bad_value("[initial] max_mode", "must be at least 1");
  if (!(amplitude_factor > 0.0)) bad_value("[initial] amplitude_factor", "must be positive");
  for (double rv : r_values) {
    if (!(rv >= 2.0) || !(rv > dim / 2.0)) bad_value("[kernel] r_values", "need r >= 2 and r > N/2");
  }
  if (per_decade < 1 || lattice < 1) bad_value("[kernel] per_decade", "grid resolutions must be positive");
  if (random_rectangles < 0) bad_value("[kernel] random_rectangles", "must be nonnegative");
  if (lplq_fields < 1 || holder_fields < 1) bad_value("[lplq] fields", "must be positive");
  for (double t : thetas) {
    if (!(t > 0.0 && t <= 1.0)) bad_value("[sweep] thetas", "theta must lie in (0, 1]");
  }
  if (!(minimize.tol > 0.0)) bad_value("[sweep] tol", "must be positive");
  if (minimize.max_iter < 1) bad_value("[sweep] max_iter", "must be positive");
  if (identity_fields < 1) bad_value("[sweep] identity_fields", "must be positive");
  if (!(lambda > 0.0)) bad_value("[scaling] lambda", "must be positive");
  for (double t : scaling_times) {
    if (!(t > 0.0)) bad_value("[scaling] times", "must be positive");
  }
  if (fault != "none" && fault != "skip_mode0_zeroing") bad_value("[verify] fault", "none or skip_mode0_zeroing");
  switch (kind) {
    case ExperimentKind::BlowupCriterion:
      if (!(solver.p <= 2.0)) bad_value("[model] p", "blow-up criterion needs 1 < p <= 2");
      break;
    case ExperimentKind::SmallDataDecay:
      if (solver.p != 2.0) bad_value("[model] p", "small-data decay needs p = 2");
      if (!(r >= 2.0) || !(r > dim / 2.0)) bad_value("[decay] r", "need r >= 2 and r > N/2");
      break;
    case ExperimentKind::ThetaSweep:
      if (std::abs(domain().volume() - 1.0) > 1e-12) bad_value("[domain] lengths", "sweep needs a unit-volume domain");
      break;
    default:
      break;
  }
}

std::vector<std::string> ExperimentConfig::echo() const {
  std::ostringstream os;
  std::vector<std::string> out;
  auto list = [](const auto& v) {
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
    return s.str();
  };
  out.push_back("name=" + name);
  out.push_back(std::string("kind=") + kind_name(kind));
  out.push_back("seeds=" + list(seeds));
  out.push_back("domain=" + std::to_string(dim) + "d lengths=" + list(lengths));
  out.push_back("grid=" + list(points));
  os << "p=" << format_number(solver.p) << " scheme=" << (solver.step_scheme == StepScheme::IMEX1 ? "IMEX1" : "ETD2")
     << " t_end=" << format_number(solver.t_end) << " dt_init=" << format_number(solver.dt_init)
     << " dt_min=" << format_number(solver.dt_min) << " dt_max=" << format_number(solver.dt_max)
     << " cfl_c=" << format_number(solver.cfl_c) << " u_max=" << format_number(solver.u_max)
     << " dealias=" << (solver.dealias ? "true" : "false");
  out.push_back(os.str());
  return out;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.name = kind_name(kind);
  c.output_dir = std::string("out/") + kind_name(kind);
  apply_kind_defaults(c);
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.line() << ": " << e.message();
    fail(Errc::Parse, os.str());
  }

  // Kind and p first: they pick the defaults the remaining keys override.
  ExperimentConfig c;
  auto kind_text = tree.get_optional<std::string>("experiment.kind");
  if (kind_text) kind_text = strip_inline_comment(*kind_text);
  if (!kind_text) fail(Errc::Validation, "[experiment] kind: required");
  if (auto k = parse_kind(*kind_text)) {
    c = default_config(*k);
  } else {
    bad_value("[experiment] kind", "unknown kind '" + *kind_text + "'");
  }
  std::set<std::string> explicit_keys;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      fail(Errc::Validation, "key '" + section + "' must sit inside a [section]");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = setters().find(full);
      if (it == setters().end()) fail(Errc::Validation, "[" + section + "] " + key + ": unknown key");
      if (!value.empty()) fail(Errc::Validation, "[" + section + "] " + key + ": nested values are not allowed");
      explicit_keys.insert(full);
    }
  }
  auto set = [&](const std::string& full) {
    const auto dot = full.find('.');
    const std::string field = "[" + full.substr(0, dot) + "] " + full.substr(dot + 1);
    setters().at(full)(c, field, strip_inline_comment(tree.get<std::string>(full)));
  };
  if (explicit_keys.count("model.p")) {
    set("model.p");
    if (c.kind == ExperimentKind::BlowupCriterion && c.solver.p > 1.0) {
      const double p = c.solver.p;
      c.solver = blowup_solver_defaults(p);
    }
  }
  for (const auto& full : explicit_keys) {
    if (full != "model.p") set(full);
  }
  // Default grid follows the dimension when only the dimension was given.
  if (explicit_keys.count("domain.dim") && !explicit_keys.count("domain.lengths")) {
    c.lengths.assign(static_cast<std::size_t>(std::max(c.dim, 1)), 1.0);
  }
  if (explicit_keys.count("domain.dim") && !explicit_keys.count("grid.points")) {
    const int m = c.dim == 2 ? 48 : c.points.front();
    c.points.assign(static_cast<std::size_t>(std::max(c.dim, 1)), m);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::Io, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace nlheat
