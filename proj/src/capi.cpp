#include "nlheat/nlheat.h"

#include <exception>
#include <new>
#include <string>

#include "nlheat/error.hpp"
#include "nlheat/experiments.hpp"
#include "nlheat/heat_kernel.hpp"

struct nlh_config {
  nlheat::ExperimentConfig cfg;
};

struct nlh_result {
  nlheat::ExperimentOutput out;
  std::string report;
};

namespace {

thread_local std::string g_last_error;

nlh_status map(nlheat::Errc c) {
  using nlheat::Errc;
  switch (c) {
    case Errc::InvalidArgument: return NLH_ERR_INVALID_ARGUMENT;
    case Errc::NonpositiveLength: return NLH_ERR_NONPOSITIVE_LENGTH;
    case Errc::ShapeMismatch: return NLH_ERR_SHAPE_MISMATCH;
    case Errc::NonFinite: return NLH_ERR_NON_FINITE;
    case Errc::OutOfDomain: return NLH_ERR_OUT_OF_DOMAIN;
    case Errc::ProjectionStall: return NLH_ERR_PROJECTION_STALL;
    case Errc::UnresolvedInterface: return NLH_ERR_UNRESOLVED_INTERFACE;
    case Errc::SeedConstruction: return NLH_ERR_SEED_CONSTRUCTION;
    case Errc::Parse: return NLH_ERR_PARSE;
    case Errc::Validation: return NLH_ERR_VALIDATION;
    case Errc::Io: return NLH_ERR_IO;
  }
  return NLH_ERR_INTERNAL;
}

nlh_status set_error(nlh_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Every entry point funnels through here so no exception crosses the C boundary.
template <class F>
nlh_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return NLH_OK;
  } catch (const nlheat::Error& e) {
    return set_error(map(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(NLH_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(NLH_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(NLH_ERR_INTERNAL, "unknown exception");
  }
}

#define NLH_REQUIRE(cond, what) \
  do {                          \
    if (!(cond)) return set_error(NLH_ERR_INVALID_ARGUMENT, what); \
  } while (0)

}  // namespace

extern "C" {

const char* nlh_version(void) { return "0.1.0"; }

const char* nlh_status_name(nlh_status s) {
  switch (s) {
    case NLH_OK: return "ok";
    case NLH_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case NLH_ERR_NONPOSITIVE_LENGTH: return "nonpositive_length";
    case NLH_ERR_SHAPE_MISMATCH: return "shape_mismatch";
    case NLH_ERR_NON_FINITE: return "non_finite";
    case NLH_ERR_OUT_OF_DOMAIN: return "out_of_domain";
    case NLH_ERR_PROJECTION_STALL: return "projection_stall";
    case NLH_ERR_UNRESOLVED_INTERFACE: return "unresolved_interface";
    case NLH_ERR_SEED_CONSTRUCTION: return "seed_construction";
    case NLH_ERR_PARSE: return "parse";
    case NLH_ERR_VALIDATION: return "validation";
    case NLH_ERR_IO: return "io";
    case NLH_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* nlh_last_error(void) { return g_last_error.c_str(); }

nlh_status nlh_config_default(const char* kind, nlh_config** out) {
  NLH_REQUIRE(kind && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto k = nlheat::parse_kind(kind);
    if (!k) nlheat::fail(nlheat::Errc::Validation, std::string("unknown experiment kind '") + kind + "'");
    *out = new nlh_config{nlheat::default_config(*k)};
  });
}

nlh_status nlh_config_parse(const char* text, const char* origin, nlh_config** out) {
  NLH_REQUIRE(text && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new nlh_config{nlheat::parse_config(text, origin ? origin : "<config>")}; });
}

nlh_status nlh_config_load(const char* path, nlh_config** out) {
  NLH_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new nlh_config{nlheat::load_config(path)}; });
}

void nlh_config_free(nlh_config* c) { delete c; }

nlh_status nlh_config_kind(const nlh_config* c, const char** kind) {
  NLH_REQUIRE(c && kind, "null argument");
  *kind = nlheat::kind_name(c->cfg.kind);
  return NLH_OK;
}

nlh_status nlh_config_name(const nlh_config* c, const char** name) {
  NLH_REQUIRE(c && name, "null argument");
  *name = c->cfg.name.c_str();
  return NLH_OK;
}

nlh_status nlh_config_output_dir(const nlh_config* c, const char** dir) {
  NLH_REQUIRE(c && dir, "null argument");
  *dir = c->cfg.output_dir.c_str();
  return NLH_OK;
}

nlh_status nlh_config_set_output_dir(nlh_config* c, const char* dir) {
  NLH_REQUIRE(c && dir && *dir, "null or empty argument");
  return guarded([&] { c->cfg.output_dir = dir; });
}

nlh_status nlh_config_set_seed(nlh_config* c, uint64_t seed) {
  NLH_REQUIRE(c, "null argument");
  return guarded([&] { c->cfg.seeds = {seed}; });
}

nlh_status nlh_experiment_run(const nlh_config* c, nlh_result** out) {
  NLH_REQUIRE(c && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto* r = new nlh_result{nlheat::run_experiment(c->cfg), {}};
    r->report = r->out.report.to_text();
    *out = r;
  });
}

void nlh_result_free(nlh_result* r) { delete r; }

nlh_status nlh_result_check_count(const nlh_result* r, size_t* n) {
  NLH_REQUIRE(r && n, "null argument");
  *n = r->out.report.checks.size();
  return NLH_OK;
}

nlh_status nlh_result_fail_count(const nlh_result* r, size_t* n) {
  NLH_REQUIRE(r && n, "null argument");
  *n = static_cast<size_t>(r->out.report.fail_count());
  return NLH_OK;
}

nlh_status nlh_result_check(const nlh_result* r, size_t i, nlh_check* out) {
  NLH_REQUIRE(r && out, "null argument");
  NLH_REQUIRE(i < r->out.report.checks.size(), "check index out of range");
  const auto& c = r->out.report.checks[i];
  out->name = c.name.c_str();
  out->status = c.status == nlheat::CheckStatus::Pass   ? NLH_CHECK_PASS
                : c.status == nlheat::CheckStatus::Fail ? NLH_CHECK_FAIL
                                                        : NLH_CHECK_NOT_APPLICABLE;
  out->measured = c.measured;
  out->expected = c.expected;
  out->tol = c.tol;
  out->anchor = c.anchor.c_str();
  out->detail = c.detail.c_str();
  return NLH_OK;
}

nlh_status nlh_result_wall_seconds(const nlh_result* r, double* s) {
  NLH_REQUIRE(r && s, "null argument");
  *s = r->out.report.wall_seconds;
  return NLH_OK;
}

nlh_status nlh_result_report(const nlh_result* r, const char** text) {
  NLH_REQUIRE(r && text, "null argument");
  *text = r->report.c_str();
  return NLH_OK;
}

nlh_status nlh_result_file_count(const nlh_result* r, size_t* n) {
  NLH_REQUIRE(r && n, "null argument");
  *n = r->out.files.size();
  return NLH_OK;
}

nlh_status nlh_result_file(const nlh_result* r, size_t i, const char** name, const char** content, size_t* size) {
  NLH_REQUIRE(r, "null argument");
  NLH_REQUIRE(i < r->out.files.size(), "file index out of range");
  const auto& f = r->out.files[i];
  if (name) *name = f.name.c_str();
  if (content) *content = f.content.c_str();
  if (size) *size = f.content.size();
  return NLH_OK;
}

nlh_status nlh_result_write(const nlh_result* r, const char* dir) {
  NLH_REQUIRE(r && dir && *dir, "null or empty argument");
  return guarded([&] { nlheat::write_outputs(r->out, dir); });
}

nlh_status nlh_verify_manifest_count(size_t* n) {
  NLH_REQUIRE(n, "null argument");
  *n = nlheat::verify_manifest().size();
  return NLH_OK;
}

nlh_status nlh_verify_manifest_entry(size_t i, const char** id, const char** module) {
  const auto m = nlheat::verify_manifest();
  NLH_REQUIRE(i < m.size(), "manifest index out of range");
  if (id) *id = m[i].id;
  if (module) *module = m[i].module;
  return NLH_OK;
}

nlh_status nlh_mobility_constant(double p, double* out) {
  NLH_REQUIRE(out, "null argument");
  return guarded([&] { *out = nlheat::mobility_constant(nlheat::DoubleWell(p)); });
}

nlh_status nlh_lambda1_star(int dim, double* out) {
  NLH_REQUIRE(out, "null argument");
  return guarded([&] { *out = nlheat::lambda1_star(dim); });
}

nlh_status nlh_blowup_threshold(double length, int points, double p, double* out) {
  NLH_REQUIRE(out, "null argument");
  return guarded([&] {
    const nlheat::Grid g(nlheat::make_domain(1, {length}), {points});
    *out = nlheat::blowup_threshold_amplitude(g, p);
  });
}

}  // extern "C"
