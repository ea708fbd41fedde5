#include "pmi/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace pmi {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s, int line) {
  const std::string t(trim(s));
  if (t == "inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("artifact line " + std::to_string(line) + ": bad number '" + t + "'");
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

SdpStatus parse_status(const std::string& s, int line) {
  for (SdpStatus v : {SdpStatus::optimal, SdpStatus::infeasible, SdpStatus::unbounded, SdpStatus::max_iter,
                      SdpStatus::numerical_failure})
    if (s == to_string(v)) return v;
  throw ParseError("artifact line " + std::to_string(line) + ": unknown status '" + s + "'");
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

double rel_tol(const ProblemFile& f, const RunOptions& o) { return o.tol.value_or(f.options.tol); }
std::uint64_t seed_of(const ProblemFile& f, const RunOptions& o) { return o.seed.value_or(f.options.seed); }

UPlan plan_for(const ProblemFile& f, const PmiProblem& pb, const RunOptions& o) {
  return make_u_plan(pb, f.options.ugrid, 1000, seed_of(f, o));
}

}  // namespace

bool Artifact::verified() const {
  if (soundness && soundness->violations > 0) return false;
  if (hessian_min && !(*hessian_min >= -1e-6)) return false;
  return true;
}

std::string write_artifact(const Artifact& a) {
  std::ostringstream o;
  o << "pmi-artifact 1\n";
  o << "degree " << a.degree << '\n';
  o << "order " << a.order << '\n';
  o << "variant " << to_string(a.variant) << '\n';
  o << "status " << to_string(a.status) << '\n';
  o << "iterations " << a.iterations << '\n';
  o << "objective " << fmt(a.objective) << '\n';
  o << "residuals " << fmt(a.residuals.primal) << ' ' << fmt(a.residuals.dual) << ' ' << fmt(a.residuals.gap) << '\n';
  o << "identity-residual " << fmt(a.identity_residual) << ' ' << fmt(a.identity_scale) << '\n';
  o << "min-gram-eigenvalue " << fmt(a.min_gram_eigenvalue) << '\n';
  if (a.soundness)
    o << "soundness " << a.soundness->samples << ' ' << a.soundness->tested << ' ' << a.soundness->violations << ' '
      << fmt(a.soundness->worst_margin) << '\n';
  if (a.hessian_min) o << "hessian-min " << fmt(*a.hessian_min) << '\n';
  o << "g " << to_string(a.g.drop_small(1e-12)) << '\n';
  o << "problem\n" << print_problem(a.problem);
  return o.str();
}

Artifact parse_artifact(std::string_view text) {
  Artifact a;
  std::string g_text;
  bool header = false, have_g = false;
  int line = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line;
    const std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#') continue;
    const std::size_t sp = s.find(' ');
    const std::string key(s.substr(0, sp));
    const std::string_view rest = sp == std::string_view::npos ? std::string_view{} : trim(s.substr(sp + 1));
    if (!header) {
      if (s != "pmi-artifact 1") throw ParseError("artifact must start with 'pmi-artifact 1'");
      header = true;
      continue;
    }
    if (key == "problem") {
      a.problem = parse_problem(text.substr(pos));
      if (!have_g) throw ParseError("artifact has no g line");
      a.g = parse_polynomial(g_text, a.problem.universe);
      return a;
    }
    const auto w = words(rest);
    auto need = [&](std::size_t k) {
      if (w.size() != k) throw ParseError("artifact line " + std::to_string(line) + ": expected " + std::to_string(k) + " values after " + key);
    };
    if (key == "degree") {
      need(1);
      a.degree = static_cast<int>(parse_real(w[0], line));
    } else if (key == "order") {
      need(1);
      a.order = static_cast<int>(parse_real(w[0], line));
    } else if (key == "variant") {
      need(1);
      try {
        a.variant = parse_variant(w[0]);
      } catch (const Error&) {
        throw ParseError("artifact line " + std::to_string(line) + ": unknown variant");
      }
    } else if (key == "status") {
      need(1);
      a.status = parse_status(w[0], line);
    } else if (key == "iterations") {
      need(1);
      a.iterations = static_cast<int>(parse_real(w[0], line));
    } else if (key == "objective") {
      need(1);
      a.objective = parse_real(w[0], line);
    } else if (key == "residuals") {
      need(3);
      a.residuals = {parse_real(w[0], line), parse_real(w[1], line), parse_real(w[2], line)};
    } else if (key == "identity-residual") {
      need(2);
      a.identity_residual = parse_real(w[0], line);
      a.identity_scale = parse_real(w[1], line);
    } else if (key == "min-gram-eigenvalue") {
      need(1);
      a.min_gram_eigenvalue = parse_real(w[0], line);
    } else if (key == "soundness") {
      need(4);
      SampleReport r;
      r.samples = static_cast<long long>(parse_real(w[0], line));
      r.tested = static_cast<long long>(parse_real(w[1], line));
      r.violations = static_cast<long long>(parse_real(w[2], line));
      r.worst_margin = parse_real(w[3], line);
      a.soundness = r;
    } else if (key == "hessian-min") {
      need(1);
      a.hessian_min = parse_real(w[0], line);
    } else if (key == "g") {
      g_text = std::string(rest);
      have_g = true;
    } else {
      throw ParseError("artifact line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  throw ParseError(header ? "artifact has no problem section" : "empty artifact");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

Artifact read_artifact_file(const std::string& path) { return parse_artifact(read_text_file(path)); }

std::optional<int> effective_order(const ProblemFile& file, int d, const RunOptions& opts) {
  const std::optional<int> explicit_order = opts.multiplier_order ? opts.multiplier_order : file.options.multiplier_order;
  if (explicit_order) return std::max(d, *explicit_order);
  if (opts.lift_order) {
    const PmiProblem pb = with_guards(to_pmi_problem(file));
    const int d0 = multiplier_degrees(pb, d, std::numeric_limits<int>::max() / 4).d0;
    if (d < d0) return d0;
  }
  return std::nullopt;
}

Artifact run_solve(const ProblemFile& file, int d, VariantKind variant, const Polynomial* prev,
                   const RunOptions& opts) {
  const PmiProblem pb = to_pmi_problem(file);
  Variant v;
  v.kind = variant;
  if (prev) v.prev = *prev;
  BuildOptions bo;
  bo.order = effective_order(file, d, opts);
  SolverOptions so;
  so.tol = rel_tol(file, opts);
  so.verbosity = opts.verbosity;
  const InnerSdp built = build_inner_sdp(pb, d, v, bo);
  const SdpSolution sol = solve(built.sdp, so);
  const InnerApprox ia = extract_solution(built, sol, seed_of(file, opts));
  Artifact a;
  a.problem = file;
  a.degree = d;
  a.order = built.degrees.order;
  a.variant = variant;
  a.status = sol.status;
  a.iterations = sol.iterations;
  a.objective = ia.objective_value;
  a.residuals = sol.residuals;
  a.identity_residual = ia.identity_residual;
  a.identity_scale = ia.identity_scale;
  a.min_gram_eigenvalue = ia.min_gram_eigenvalue;
  a.g = ia.g;
  if (opts.verify) verify_artifact(a, opts);
  return a;
}

void verify_artifact(Artifact& a, const RunOptions& opts) {
  const PmiProblem pb = to_pmi_problem(a.problem);
  const UPlan plan = plan_for(a.problem, pb, opts);
  a.soundness = soundness_sweep(pb, a.g, plan, opts.grid_res, seed_of(a.problem, opts));
  if (a.variant == VariantKind::convex || a.variant == VariantKind::concave) {
    const auto pts = grid_in_bounds(pb.moments, opts.grid_res);
    a.hessian_min = min_hessian_eigenvalue(a.g, pts, a.variant == VariantKind::convex ? 1.0 : -1.0);
  }
}

std::vector<SweepRow> run_sweep(const ProblemFile& file, int d_min, int d_max, VariantKind variant,
                                const RunOptions& opts) {
  if (d_min > d_max || d_min < 1) throw Error("empty degree range");
  RunOptions o = opts;
  o.lift_order = true;
  const PmiProblem pb = to_pmi_problem(file);
  const UPlan plan = plan_for(file, pb, o);
  const std::uint64_t seed = seed_of(file, o);
  const std::vector<Point> grid = grid_in_bounds(pb.moments, o.grid_res);
  std::vector<SweepRow> rows;
  const Polynomial* prev = nullptr;
  for (int d = d_min; d <= d_max; ++d) {
    SweepRow row;
    row.d = d;
    const bool nested = variant == VariantKind::nested && prev != nullptr;
    const VariantKind kind = variant == VariantKind::nested && !nested ? VariantKind::plain : variant;
    try {
      Artifact a = run_solve(file, d, kind, nested ? prev : nullptr, o);
      a.variant = kind;
      row.order = a.order;
      row.status = to_string(a.status);
      row.objective = a.objective;
      const GapEstimate gap = l1_gap(a.g, pb, plan, o.samples, seed);
      row.rho = gap.estimate;
      row.volume = mc_volume(a.g, pb.moments, o.samples, seed);
      row.violations = a.soundness ? a.soundness->violations : 0;
      if (nested) {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& x : grid) worst = std::min(worst, eval_x(a.g, x) - eval_x(*prev, x));
        row.nested_min = worst;
      }
      row.artifact = std::move(a);
    } catch (const SolveFailure& e) {
      row.status = to_string(e.status);
      row.error = e.what();
    } catch (const DegreeError& e) {
      row.status = "degree_error";
      row.error = e.what();
    } catch (const Error& e) {
      row.status = "error";
      row.error = e.what();
    }
    rows.push_back(std::move(row));
    prev = rows.back().artifact ? &rows.back().artifact->g : nullptr;
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool nested) {
  std::ostringstream o;
  o << "d,order,status,objective,rho,rho_se,volume,volume_se,violations";
  if (nested) o << ",nested_min";
  o << '\n';
  for (const auto& r : rows) {
    o << r.d << ',' << r.order << ',' << r.status;
    if (r.artifact) {
      o << ',' << fmt(r.objective) << ',' << fmt(r.rho.value) << ',' << fmt(r.rho.std_error) << ','
        << fmt(r.volume.value) << ',' << fmt(r.volume.std_error) << ',' << r.violations;
    } else {
      o << ",,,,,,";
    }
    if (nested) {
      o << ',';
      if (r.nested_min) o << fmt(*r.nested_min);
    }
    o << '\n';
  }
  return o.str();
}

Section parse_section(std::string_view spec, int n) {
  Section s;
  s.fixed.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> fixed(static_cast<std::size_t>(n), false);
  std::string_view rest = trim(spec);
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : trim(rest.substr(comma + 1));
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || item.size() < 2 || item.front() != 'x')
      throw ParseError("section items look like x3=0");
    int idx = 0;
    try {
      std::size_t used = 0;
      const std::string num(trim(item.substr(1, eq - 1)));
      idx = std::stoi(num, &used);
      if (used != num.size()) throw ParseError("bad section variable");
    } catch (const std::exception&) {
      throw ParseError("bad section variable in '" + std::string(item) + "'");
    }
    if (idx < 1 || idx > n) throw DimensionError("section variable x" + std::to_string(idx) + " out of range");
    s.fixed[static_cast<std::size_t>(idx - 1)] = parse_real(item.substr(eq + 1), 0);
    fixed[static_cast<std::size_t>(idx - 1)] = true;
  }
  std::vector<int> free_axes;
  for (int i = 0; i < n; ++i)
    if (!fixed[static_cast<std::size_t>(i)]) free_axes.push_back(i);
  if (free_axes.size() != 2)
    throw DimensionError("grid needs a two-dimensional section; fix " + std::to_string(std::max(n - 2, 0)) +
                         " coordinates, e.g. --section x3=0");
  s.axes[0] = free_axes[0];
  s.axes[1] = free_axes[1];
  return s;
}

std::string grid_csv(const Artifact& a, int res, const Section& section) {
  const PmiProblem pb = to_pmi_problem(a.problem);
  const UPlan plan = plan_for(a.problem, pb, {});
  const auto pts = section_grid(pb.moments, section, res);
  const LambdaEvaluator lam_of(pb, plan);
  std::ostringstream o;
  o << 'x' << section.axes[0] + 1 << ",x" << section.axes[1] + 1 << ",g,lambda\n";
  for (const auto& x : pts) {
    o << fmt(x[static_cast<std::size_t>(section.axes[0])]) << ',' << fmt(x[static_cast<std::size_t>(section.axes[1])])
      << ',' << fmt(eval_x(a.g, x)) << ',' << fmt(lam_of(x)) << '\n';
  }
  return o.str();
}

std::string verify_report(const Artifact& a, const RunOptions& opts, bool* verified) {
  Artifact v = a;
  verify_artifact(v, opts);
  const PmiProblem pb = to_pmi_problem(a.problem);
  const UPlan plan = plan_for(a.problem, pb, opts);
  const std::uint64_t seed = seed_of(a.problem, opts);
  const GapEstimate gap = l1_gap(a.g, pb, plan, opts.samples, seed);
  const Estimate vol = mc_volume(a.g, pb.moments, opts.samples, seed);
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr); };
  nlohmann::ordered_json j;
  j["problem"] = a.problem.name;
  j["degree"] = a.degree;
  j["order"] = a.order;
  j["variant"] = to_string(a.variant);
  j["status"] = to_string(a.status);
  j["seed"] = seed;
  j["u_samples"] = plan.points.size();
  j["soundness"] = {{"grid_res", opts.grid_res},
                    {"samples", v.soundness->samples},
                    {"tested", v.soundness->tested},
                    {"violations", v.soundness->violations},
                    {"worst_margin", num(v.soundness->worst_margin)}};
  j["l1_gap"] = {{"samples", gap.estimate.samples},
                 {"estimate", num(gap.estimate.value)},
                 {"std_error", num(gap.estimate.std_error)},
                 {"violations", gap.violations},
                 {"worst_margin", num(gap.worst_margin)}};
  j["volume"] = {{"samples", vol.samples},
                 {"estimate", num(vol.value)},
                 {"std_error", num(vol.std_error)},
                 {"bounding_set", num(pb.moments.volume())}};
  if (v.hessian_min) j["hessian_min"] = num(*v.hessian_min);
  j["identity_residual"] = num(a.identity_residual / a.identity_scale);
  j["verified"] = v.verified();
  if (verified) *verified = v.verified();
  return j.dump(2) + "\n";
}

std::string moments_table(const ProblemFile& file, int max_degree) {
  if (max_degree < 0) throw DegreeError("moment degree must be nonnegative");
  const MomentSource B = make_moment_source(file.bounds);
  const int n = B.dimension();
  std::ostringstream o;
  for (int i = 0; i < n; ++i) o << 'a' << i + 1 << ',';
  o << "moment\n";
  for (const auto& m : enum_monomials(n, max_degree)) {
    for (int i = 0; i < n; ++i) o << m[i] << ',';
    o << fmt(B.get(m)) << '\n';
  }
  return o.str();
}

std::string export_sdp_text(const ProblemFile& file, int d, VariantKind variant, const Polynomial* prev,
                            const RunOptions& opts) {
  Variant v;
  v.kind = variant;
  if (prev) v.prev = *prev;
  BuildOptions bo;
  bo.order = effective_order(file, d, opts);
  const InnerSdp built = build_inner_sdp(to_pmi_problem(file), d, v, bo);
  std::ostringstream o;
  write_sdp(o, built.sdp);
  return o.str();
}

}  // namespace pmi
