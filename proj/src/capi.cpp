#include "pmi/pmi_c.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "pmi/pipeline.hpp"

struct pmi_problem {
  pmi::ProblemFile file;
};

struct pmi_artifact {
  pmi::Artifact artifact;
};

namespace {

thread_local std::string last_error;

pmi_status fail(pmi_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
pmi_status guarded(F&& f) {
  try {
    f();
    return PMI_OK;
  } catch (const pmi::ParseError& e) {
    return fail(PMI_ERR_PARSE, e.what());
  } catch (const pmi::DegreeError& e) {
    return fail(PMI_ERR_DEGREE, e.what());
  } catch (const pmi::SolverError& e) {
    return fail(PMI_ERR_SOLVER, e.what());
  } catch (const pmi::VerifyError& e) {
    return fail(PMI_ERR_VERIFY, e.what());
  } catch (const pmi::IoError& e) {
    return fail(PMI_ERR_IO, e.what());
  } catch (const pmi::DimensionError& e) {
    return fail(PMI_ERR_DIMENSION, e.what());
  } catch (const pmi::GeometryError& e) {
    return fail(PMI_ERR_GEOMETRY, e.what());
  } catch (const pmi::Error& e) {
    return fail(PMI_ERR_USAGE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PMI_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PMI_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(PMI_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  if (!p) throw pmi::Error(std::string(what) + " is null");
}

pmi::RunOptions run_options(const pmi_options* o) {
  pmi_options d;
  pmi_options_init(&d);
  if (!o) o = &d;
  pmi::RunOptions r;
  if (o->has_tol) {
    if (!(o->tol > 0.0)) throw pmi::Error("tolerance must be positive");
    r.tol = o->tol;
  }
  if (o->has_seed) r.seed = o->seed;
  if (o->multiplier_order > 0) r.multiplier_order = o->multiplier_order;
  if (o->grid_res < 2) throw pmi::Error("grid resolution must be at least 2");
  if (o->samples < 1) throw pmi::Error("sample count must be positive");
  r.lift_order = o->lift_order != 0;
  r.grid_res = o->grid_res;
  r.samples = o->samples;
  r.verify = o->verify != 0;
  r.verbosity = o->verbosity;
  return r;
}

pmi::VariantKind variant_of(const char* v) {
  if (!v || !*v) return pmi::VariantKind::plain;
  try {
    return pmi::parse_variant(v);
  } catch (const pmi::ParseError& e) {
    throw pmi::Error(e.what());
  }
}

const pmi::Polynomial* prev_of(pmi::VariantKind kind, const pmi_artifact* prev) {
  if (kind != pmi::VariantKind::nested) return nullptr;
  if (!prev) throw pmi::Error("nested variant needs the previous artifact");
  return &prev->artifact.g;
}

}  // namespace

extern "C" {

const char* pmi_version(void) { return "1.0.0"; }

const char* pmi_status_name(pmi_status status) {
  switch (status) {
    case PMI_OK: return "ok";
    case PMI_ERR_USAGE: return "usage";
    case PMI_ERR_PARSE: return "parse";
    case PMI_ERR_DEGREE: return "degree";
    case PMI_ERR_SOLVER: return "solver";
    case PMI_ERR_VERIFY: return "verification";
    case PMI_ERR_IO: return "io";
    case PMI_ERR_DIMENSION: return "dimension";
    case PMI_ERR_GEOMETRY: return "geometry";
    case PMI_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* pmi_last_error(void) { return last_error.c_str(); }

void pmi_string_free(char* s) { std::free(s); }

void pmi_options_init(pmi_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof *o);
  const pmi::RunOptions r;
  o->grid_res = r.grid_res;
  o->samples = r.samples;
  o->verify = r.verify ? 1 : 0;
}

pmi_status pmi_example_names(char** out) {
  return guarded([&] {
    need(out, "out");
    std::string s;
    for (const auto& n : pmi::example_names()) s += n + "\n";
    *out = dup(s);
  });
}

pmi_status pmi_problem_example(const char* name, pmi_problem** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = new pmi_problem{pmi::example_problem(name)};
  });
}

pmi_status pmi_problem_parse(const char* text, pmi_problem** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new pmi_problem{pmi::parse_problem(text)};
  });
}

pmi_status pmi_problem_read(const char* path, pmi_problem** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pmi_problem{pmi::parse_problem(pmi::read_text_file(path))};
  });
}

pmi_status pmi_problem_print(const pmi_problem* problem, char** out) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    *out = dup(pmi::print_problem(problem->file));
  });
}

pmi_status pmi_problem_dims(const pmi_problem* problem, int* n, int* p, int* m) {
  return guarded([&] {
    need(problem, "problem");
    const auto& U = problem->file.universe;
    if (n) *n = U.n;
    if (p) *p = U.p;
    if (m) *m = U.m;
  });
}

void pmi_problem_free(pmi_problem* problem) { delete problem; }

pmi_status pmi_solve(const pmi_problem* problem, int degree, const char* variant, const pmi_artifact* prev,
                     const pmi_options* options, pmi_artifact** out) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    const pmi::RunOptions ro = run_options(options);
    const pmi::VariantKind kind = variant_of(variant);
    *out = new pmi_artifact{pmi::run_solve(problem->file, degree, kind, prev_of(kind, prev), ro)};
  });
}

pmi_status pmi_sweep(const pmi_problem* problem, int d_min, int d_max, const char* variant,
                     const pmi_options* options, char** csv, int* failures, long long* violations) {
  return guarded([&] {
    need(problem, "problem");
    need(csv, "csv");
    const pmi::RunOptions ro = run_options(options);
    const pmi::VariantKind kind = variant_of(variant);
    const auto rows = pmi::run_sweep(problem->file, d_min, d_max, kind, ro);
    int nfail = 0;
    long long nviol = 0;
    for (const auto& r : rows) {
      if (!r.artifact) ++nfail;
      nviol += r.violations;
    }
    *csv = dup(pmi::sweep_csv(rows, kind == pmi::VariantKind::nested));
    if (failures) *failures = nfail;
    if (violations) *violations = nviol;
  });
}

pmi_status pmi_moments(const pmi_problem* problem, int max_degree, char** out) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    *out = dup(pmi::moments_table(problem->file, max_degree));
  });
}

pmi_status pmi_export_sdp(const pmi_problem* problem, int degree, const char* variant, const pmi_artifact* prev,
                          const pmi_options* options, char** out) {
  return guarded([&] {
    need(problem, "problem");
    need(out, "out");
    const pmi::RunOptions ro = run_options(options);
    const pmi::VariantKind kind = variant_of(variant);
    *out = dup(pmi::export_sdp_text(problem->file, degree, kind, prev_of(kind, prev), ro));
  });
}

pmi_status pmi_artifact_parse(const char* text, pmi_artifact** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    *out = new pmi_artifact{pmi::parse_artifact(text)};
  });
}

pmi_status pmi_artifact_read(const char* path, pmi_artifact** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new pmi_artifact{pmi::read_artifact_file(path)};
  });
}

pmi_status pmi_artifact_write(const pmi_artifact* artifact, const char* path) {
  return guarded([&] {
    need(artifact, "artifact");
    need(path, "path");
    pmi::write_text_file(path, pmi::write_artifact(artifact->artifact));
  });
}

pmi_status pmi_artifact_text(const pmi_artifact* artifact, char** out) {
  return guarded([&] {
    need(artifact, "artifact");
    need(out, "out");
    *out = dup(pmi::write_artifact(artifact->artifact));
  });
}

pmi_status pmi_artifact_summary(const pmi_artifact* artifact, pmi_summary* out) {
  return guarded([&] {
    need(artifact, "artifact");
    need(out, "out");
    const pmi::Artifact& a = artifact->artifact;
    pmi_summary s{};
    s.degree = a.degree;
    s.order = a.order;
    s.iterations = a.iterations;
    s.optimal = a.status == pmi::SdpStatus::optimal;
    s.objective = a.objective;
    s.primal_residual = a.residuals.primal;
    s.dual_residual = a.residuals.dual;
    s.gap = a.residuals.gap;
    s.identity_residual = a.identity_residual / a.identity_scale;
    s.min_gram_eigenvalue = a.min_gram_eigenvalue;
    if (a.soundness) {
      s.has_soundness = 1;
      s.soundness_tested = a.soundness->tested;
      s.soundness_violations = a.soundness->violations;
      s.soundness_worst = a.soundness->worst_margin;
    }
    if (a.hessian_min) {
      s.has_hessian = 1;
      s.hessian_min = *a.hessian_min;
    }
    s.verified = a.verified();
    *out = s;
  });
}

pmi_status pmi_artifact_eval(const pmi_artifact* artifact, const double* x, size_t n, double* out) {
  return guarded([&] {
    need(artifact, "artifact");
    need(out, "out");
    if (n != static_cast<size_t>(artifact->artifact.problem.universe.n))
      throw pmi::DimensionError("point has " + std::to_string(n) + " coordinates, expected " +
                                std::to_string(artifact->artifact.problem.universe.n));
    if (n > 0) need(x, "x");
    *out = pmi::eval_x(artifact->artifact.g, {x, n});
  });
}

pmi_status pmi_grid(const pmi_artifact* artifact, int res, const char* section, char** csv) {
  return guarded([&] {
    need(artifact, "artifact");
    need(csv, "csv");
    if (res < 2) throw pmi::Error("grid resolution must be at least 2");
    const pmi::Section s = pmi::parse_section(section ? section : "", artifact->artifact.problem.universe.n);
    *csv = dup(pmi::grid_csv(artifact->artifact, res, s));
  });
}

pmi_status pmi_verify(const pmi_artifact* artifact, const pmi_options* options, char** json, int* verified) {
  return guarded([&] {
    need(artifact, "artifact");
    const pmi::RunOptions ro = run_options(options);
    bool ok = false;
    const std::string report = pmi::verify_report(artifact->artifact, ro, &ok);
    if (json) *json = dup(report);
    if (verified) *verified = ok;
  });
}

void pmi_artifact_free(pmi_artifact* artifact) { delete artifact; }

pmi_status pmi_write_text(const char* path, const char* text) {
  return guarded([&] {
    need(path, "path");
    need(text, "text");
    if (std::strcmp(path, "-") == 0) {
      std::fputs(text, stdout);
      std::fflush(stdout);
      return;
    }
    pmi::write_text_file(path, text);
  });
}

}  // extern "C"
