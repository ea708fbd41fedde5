// pmi-inner: command-line front end over the C API.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmi/pmi_c.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kDegree = 3, kSolver = 4, kVerify = 5, kIo = 6 };

int exit_code(pmi_status s) {
  switch (s) {
    case PMI_OK: return kOk;
    case PMI_ERR_PARSE:
    case PMI_ERR_GEOMETRY: return kParse;
    case PMI_ERR_DEGREE: return kDegree;
    case PMI_ERR_SOLVER: return kSolver;
    case PMI_ERR_VERIFY: return kVerify;
    case PMI_ERR_IO: return kIo;
    default: return kUsage;
  }
}

struct Failed {
  int code;
};

void check(pmi_status s) {
  if (s == PMI_OK) return;
  std::fprintf(stderr, "pmi-inner: %s error: %s\n", pmi_status_name(s), pmi_last_error());
  throw Failed{exit_code(s)};
}

// Owning wrappers for the C handles.
struct Problem {
  pmi_problem* p = nullptr;
  ~Problem() { pmi_problem_free(p); }
};
struct Art {
  pmi_artifact* a = nullptr;
  ~Art() { pmi_artifact_free(a); }
};
struct Text {
  char* s = nullptr;
  ~Text() { pmi_string_free(s); }
};

struct Common {
  double tol = 0.0;
  std::uint64_t seed = 0;
  int order = 0;
  int grid_res = 100;
  long long samples = 100000;
  int verbosity = 0;
  std::string out = "-";
  std::string variant = "plain";
};

void add_common(CLI::App* c, Common& o, bool solve_flags) {
  c->add_option("--seed", o.seed, "Random seed (defaults to the file option)");
  c->add_option("--grid-res", o.grid_res, "Grid points per axis for checks and exports")
      ->check(CLI::Range(2, 100000));
  c->add_option("--samples", o.samples, "Monte-Carlo sample count")->check(CLI::PositiveNumber);
  c->add_option("--out,-o", o.out, "Output path, - for standard output");
  if (solve_flags) {
    c->add_option("--tol", o.tol, "Solver tolerance (defaults to the file option)")->check(CLI::PositiveNumber);
    c->add_option("--multiplier-order", o.order, "Multiplier order D >= d")->check(CLI::PositiveNumber);
    c->add_option("--variant", o.variant, "plain, nested, convex or concave")
        ->check(CLI::IsMember({"plain", "nested", "convex", "concave"}));
    c->add_flag("-v,--verbose", o.verbosity, "Print the solver log to stderr");
  }
}

pmi_options options_of(const Common& c, CLI::App* app) {
  pmi_options o;
  pmi_options_init(&o);
  auto given = [&](const char* name) {
    const CLI::Option* opt = app->get_option_no_throw(name);
    return opt && opt->count() > 0;
  };
  if (given("--tol")) {
    o.has_tol = 1;
    o.tol = c.tol;
  }
  if (given("--seed")) {
    o.has_seed = 1;
    o.seed = c.seed;
  }
  o.multiplier_order = c.order;
  o.grid_res = c.grid_res;
  o.samples = c.samples;
  o.verbosity = c.verbosity;
  return o;
}

void load_problem(const std::string& path, Problem& p) { check(pmi_problem_read(path.c_str(), &p.p)); }

void emit(const std::string& path, const char* text) { check(pmi_write_text(path.c_str(), text)); }

// "2:5", "2..5" or a single degree.
bool parse_range(const std::string& s, int& lo, int& hi) {
  try {
    std::size_t used = 0;
    lo = std::stoi(s, &used);
    if (used == s.size()) {
      hi = lo;
      return true;
    }
    std::size_t skip = s.compare(used, 2, "..") == 0 ? 2 : (s[used] == ':' || s[used] == '-') ? 1 : 0;
    if (skip == 0) return false;
    const std::string rest = s.substr(used + skip);
    hi = std::stoi(rest, &used);
    return used == rest.size();
  } catch (const std::exception&) {
    return false;
  }
}

void print_summary(const pmi_artifact* a) {
  pmi_summary s;
  check(pmi_artifact_summary(a, &s));
  std::fprintf(stderr, "degree %d order %d: %s in %d iterations, int_B g = %.10g, identity residual %.3g\n", s.degree,
               s.order, s.optimal ? "optimal" : "not optimal", s.iterations, s.objective, s.identity_residual);
  if (s.has_soundness)
    std::fprintf(stderr, "soundness: %lld grid points with g >= 0, %lld violations, worst lambda %.3g\n",
                 s.soundness_tested, s.soundness_violations, s.soundness_worst);
  if (s.has_hessian) std::fprintf(stderr, "hessian: min eigenvalue %.3g\n", s.hessian_min);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polynomial inner approximations of parametrized PMI sets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pmi_version());

  Common so, sw, gr, mo, ex, vf;

  auto* solve = app.add_subcommand("solve", "Solve one relaxation degree and write an artifact");
  std::string solve_file, solve_prev;
  int solve_degree = 0;
  solve->add_option("file", solve_file, "Problem file")->required();
  solve->add_option("--degree,-d", solve_degree, "Relaxation degree d (deg g = 2d)")->required();
  solve->add_option("--prev", solve_prev, "Artifact of degree d-1 (nested variant)");
  add_common(solve, so, true);

  auto* sweep = app.add_subcommand("sweep", "Solve a range of degrees and write CSV");
  std::string sweep_file, sweep_range;
  sweep->add_option("file", sweep_file, "Problem file")->required();
  sweep->add_option("--range,-r", sweep_range, "Degrees, e.g. 1:4")->required();
  add_common(sweep, sw, true);

  auto* grid = app.add_subcommand("grid", "Evaluate g and lambda on a planar grid");
  std::string grid_art, grid_section;
  grid->add_option("artifact", grid_art, "Artifact file")->required();
  grid->add_option("--section", grid_section, "Fixed coordinates, e.g. x3=0");
  add_common(grid, gr, false);

  auto* moments = app.add_subcommand("moments", "Moments of the bounding set");
  std::string mom_file;
  int mom_degree = 4;
  moments->add_option("file", mom_file, "Problem file")->required();
  moments->add_option("--degree,-d", mom_degree, "Maximum total degree")->check(CLI::NonNegativeNumber);
  moments->add_option("--out,-o", mo.out, "Output path, - for standard output");

  auto* examples = app.add_subcommand("examples", "List or write the built-in examples");
  std::string ex_print, ex_write;
  examples->add_option("--print", ex_print, "Print one example");
  examples->add_option("--write", ex_write, "Write every example as <dir>/<name>.pmi");

  auto* exp = app.add_subcommand("export-sdp", "Write the built SDP in text form");
  std::string exp_file, exp_prev;
  int exp_degree = 0;
  exp->add_option("file", exp_file, "Problem file")->required();
  exp->add_option("--degree,-d", exp_degree, "Relaxation degree d")->required();
  exp->add_option("--prev", exp_prev, "Artifact of degree d-1 (nested variant)");
  add_common(exp, ex, true);

  auto* verify = app.add_subcommand("verify", "Re-check an artifact and write a JSON report");
  std::string vf_art;
  verify->add_option("artifact", vf_art, "Artifact file")->required();
  add_common(verify, vf, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) {
      Problem p;
      load_problem(solve_file, p);
      Art prev, a;
      if (!solve_prev.empty()) check(pmi_artifact_read(solve_prev.c_str(), &prev.a));
      if (so.variant == "nested" && !prev.a) {
        std::fprintf(stderr, "pmi-inner: the nested variant needs --prev\n");
        return kUsage;
      }
      const pmi_options o = options_of(so, solve);
      check(pmi_solve(p.p, solve_degree, so.variant.c_str(), prev.a, &o, &a.a));
      if (so.out == "-") {
        Text t;
        check(pmi_artifact_text(a.a, &t.s));
        emit("-", t.s);
      } else {
        check(pmi_artifact_write(a.a, so.out.c_str()));
      }
      print_summary(a.a);
      pmi_summary s;
      check(pmi_artifact_summary(a.a, &s));
      return s.verified ? kOk : kVerify;
    }
    if (*sweep) {
      int lo = 0, hi = 0;
      if (!parse_range(sweep_range, lo, hi)) {
        std::fprintf(stderr, "pmi-inner: bad --range '%s'\n", sweep_range.c_str());
        return kUsage;
      }
      Problem p;
      load_problem(sweep_file, p);
      const pmi_options o = options_of(sw, sweep);
      Text csv;
      int failures = 0;
      long long violations = 0;
      check(pmi_sweep(p.p, lo, hi, sw.variant.c_str(), &o, &csv.s, &failures, &violations));
      emit(sw.out, csv.s);
      if (failures > 0) return kSolver;
      return violations > 0 ? kVerify : kOk;
    }
    if (*grid) {
      Art a;
      check(pmi_artifact_read(grid_art.c_str(), &a.a));
      Text csv;
      check(pmi_grid(a.a, gr.grid_res, grid_section.c_str(), &csv.s));
      emit(gr.out, csv.s);
      return kOk;
    }
    if (*moments) {
      Problem p;
      load_problem(mom_file, p);
      Text t;
      check(pmi_moments(p.p, mom_degree, &t.s));
      emit(mo.out, t.s);
      return kOk;
    }
    if (*examples) {
      Text names;
      check(pmi_example_names(&names.s));
      if (!ex_print.empty()) {
        Problem p;
        check(pmi_problem_example(ex_print.c_str(), &p.p));
        Text t;
        check(pmi_problem_print(p.p, &t.s));
        emit("-", t.s);
        return kOk;
      }
      if (!ex_write.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(ex_write, ec);
        std::string list = names.s;
        std::size_t start = 0;
        for (std::size_t nl; (nl = list.find('\n', start)) != std::string::npos; start = nl + 1) {
          const std::string name = list.substr(start, nl - start);
          Problem p;
          check(pmi_problem_example(name.c_str(), &p.p));
          Text t;
          check(pmi_problem_print(p.p, &t.s));
          emit((std::filesystem::path(ex_write) / (name + ".pmi")).string(), t.s);
        }
        return kOk;
      }
      emit("-", names.s);
      return kOk;
    }
    if (*exp) {
      Problem p;
      load_problem(exp_file, p);
      Art prev;
      if (!exp_prev.empty()) check(pmi_artifact_read(exp_prev.c_str(), &prev.a));
      const pmi_options o = options_of(ex, exp);
      Text t;
      check(pmi_export_sdp(p.p, exp_degree, ex.variant.c_str(), prev.a, &o, &t.s));
      emit(ex.out, t.s);
      return kOk;
    }
    if (*verify) {
      Art a;
      check(pmi_artifact_read(vf_art.c_str(), &a.a));
      const pmi_options o = options_of(vf, verify);
      Text json;
      int ok = 0;
      check(pmi_verify(a.a, &o, &json.s, &ok));
      emit(vf.out, json.s);
      return ok ? kOk : kVerify;
    }
  } catch (const Failed& f) {
    return f.code;
  }
  return kUsage;
}
