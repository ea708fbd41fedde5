// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pmi/pipeline.hpp"
#include "pmi/sdp.hpp"
#include "pmi/sosbuild.hpp"
#include "pmi/stability.hpp"
#include "pmi/verify.hpp"

using namespace pmi;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double combined_se(const Estimate& a, const Estimate& b) { return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error); }

struct Solved {
  std::string example;
  std::vector<Artifact> by_degree;  // index d - 1
};

const std::vector<std::pair<std::string, int>> kDisplayed = {
    {"planar-box", 4}, {"planar-disk", 4}, {"hermite3", 3}, {"hermite4", 4}, {"hermite4-robust", 2}};

RunOptions soundness_options() {
  RunOptions o;
  o.grid_res = 100;
  o.lift_order = true;
  return o;
}

// 1: every displayed degree solves and passes the soundness grid.
Outcome soundness(std::map<std::string, Solved>& solved) {
  const auto t0 = Clock::now();
  long long violations = 0, tested = 0;
  int runs = 0;
  std::string failures;
  for (const auto& [name, dmax] : kDisplayed) {
    Solved s{name, {}};
    const ProblemFile f = example_problem(name);
    for (int d = 1; d <= dmax; ++d) {
      try {
        Artifact a = run_solve(f, d, VariantKind::plain, nullptr, soundness_options());
        ++runs;
        if (a.status != SdpStatus::optimal) failures += fmt(" %s/d%d:%s", name.c_str(), d, to_string(a.status));
        violations += a.soundness->violations;
        tested += a.soundness->tested;
        s.by_degree.push_back(std::move(a));
      } catch (const std::exception& e) {
        failures += fmt(" %s/d%d:%s", name.c_str(), d, e.what());
      }
    }
    solved[name] = std::move(s);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = failures.empty() && violations == 0 && secs < 300.0;
  o.detail = fmt("%d solves, %lld grid points with g >= 1e-6, %lld violations, %.1f s", runs, tested, violations, secs) +
             (failures.empty() ? "" : "; failed:" + failures);
  return o;
}

// 2: rho_d on planar-disk does not increase beyond 3 standard errors.
Outcome l1_convergence(const std::map<std::string, Solved>& solved) {
  const auto& s = solved.at("planar-disk");
  if (s.by_degree.size() != 4) return {false, "planar-disk degrees missing"};
  const ProblemFile f = example_problem("planar-disk");
  const PmiProblem pb = to_pmi_problem(f);
  const UPlan plan = make_u_plan(pb, f.options.ugrid);
  std::vector<Estimate> rho;
  std::string detail = "rho";
  for (const auto& a : s.by_degree) {
    rho.push_back(l1_gap(a.g, pb, plan, 1000000, 11).estimate);
    detail += fmt(" %.5f(%.1e)", rho.back().value, rho.back().std_error);
  }
  bool pass = true;
  for (std::size_t d = 1; d < rho.size(); ++d)
    if (rho[d].value - rho[d - 1].value > 3.0 * combined_se(rho[d], rho[d - 1])) pass = false;
  return {pass, detail};
}

// 3: the disk bounding set gives a larger G_2 than the box.
Outcome bounding_set(const std::map<std::string, Solved>& solved) {
  const auto& disk = solved.at("planar-disk").by_degree;
  const auto& box = solved.at("planar-box").by_degree;
  if (disk.size() < 2 || box.size() < 2) return {false, "degree 2 missing"};
  const auto Bd = make_moment_source(example_problem("planar-disk").bounds);
  const auto Bb = make_moment_source(example_problem("planar-box").bounds);
  const Estimate vd = mc_volume(disk[1].g, Bd, 1000000, 21);
  const Estimate vb = mc_volume(box[1].g, Bb, 1000000, 22);
  const double se = combined_se(vd, vb);
  return {vd.value - vb.value > 3.0 * se,
          fmt("vol G2 disk %.5f, box %.5f, difference %.2f standard errors", vd.value, vb.value, (vd.value - vb.value) / se)};
}

// 4: SOS and moment programs agree for planar-box d = 2.
Outcome duality() {
  const PmiProblem pb = to_pmi_problem(example_problem("planar-box"));
  const InnerSdp s = build_inner_sdp(pb, 2);
  const SdpSolution sol = solve(s.sdp);
  const InnerApprox ia = extract_solution(s, sol);
  const SdpSolution dual = solve(build_moment_sdp(s));
  if (sol.status != SdpStatus::optimal || dual.status != SdpStatus::optimal) return {false, "a program did not solve"};
  const double rel = std::abs(dual.primal_objective - ia.objective_value) / std::abs(ia.objective_value);
  return {rel <= 1e-5, fmt("rho %.10f, rho* %.10f, relative gap %.2e", ia.objective_value, dual.primal_objective, rel)};
}

// 5: identity residuals of every solve, relative to the coefficient scale.
Outcome identity(const std::map<std::string, Solved>& solved) {
  double worst = 0.0;
  int count = 0;
  auto take = [&](const Artifact& a) {
    worst = std::max(worst, a.identity_residual / a.identity_scale);
    ++count;
  };
  for (const auto& [name, s] : solved)
    for (const auto& a : s.by_degree) take(a);
  return {count > 0 && worst <= 1e-6, fmt("%d solves, worst scaled residual %.2e", count, worst)};
}

// 6: nested growth on planar-box and sign containment of the running max.
Outcome nested(const std::map<std::string, Solved>& solved) {
  RunOptions o;
  o.grid_res = 100;
  o.lift_order = true;
  o.samples = 10000;
  const auto rows = run_sweep(example_problem("planar-box"), 1, 4, VariantKind::nested, o);
  bool pass = rows.size() == 4;
  std::string detail = "nested min";
  for (const auto& r : rows) {
    if (r.status != "optimal") pass = false;
    if (r.d < 2) continue;
    if (!r.nested_min || *r.nested_min < -1e-7) pass = false;
    detail += r.nested_min ? fmt(" %.2e", *r.nested_min) : std::string(" none");
  }

  long long bad = 0, checked = 0;
  for (const char* name : {"planar-box", "planar-disk"}) {
    const ProblemFile f = example_problem(name);
    const PmiProblem pb = to_pmi_problem(f);
    const UPlan plan = make_u_plan(pb, f.options.ugrid);
    const auto& arts = solved.at(name).by_degree;
    const auto pts = grid_in_bounds(make_moment_source(f.bounds), 100);
    std::vector<Polynomial> gs;
    for (const auto& a : arts) {
      const std::vector<Polynomial> prev = gs;
      gs.push_back(a.g);
      for (const auto& x : pts) {
        const double now = eval_piecewise_max(gs, x);
        if (!prev.empty() && eval_piecewise_max(prev, x) >= 0.0 && now < 0.0) ++bad;
        if (now >= 1e-6) {
          ++checked;
          if (lambda_min(pb, x, plan) < -1e-9) ++bad;
        }
      }
    }
  }
  pass = pass && bad == 0;
  detail += fmt("; running max: %lld points with max g >= 1e-6, %lld containment failures", checked, bad);
  return {pass, detail};
}

// 7: hermite4 convex variant at d = 2.
Outcome convex() {
  RunOptions o;
  o.grid_res = 100;
  const Artifact a = run_solve(example_problem("hermite4"), 2, VariantKind::convex, nullptr, o);
  const double h = a.hessian_min.value_or(-1e300);
  const bool pass = a.status == SdpStatus::optimal && h >= -1e-6;
  return {pass, fmt("status %s, min grid Hessian eigenvalue of g %.3e", to_string(a.status), h)};
}

// 8: reflection samples are Hermite stable and the hull vertices are exact.
Outcome reflection() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int stable = 0, total = 0;
  for (int n : {3, 4}) {
    const auto f = reflection_map(n);
    const auto h = hermite_matrix(n);
    for (int s = 0; s < 1000; ++s) {
      Point k(static_cast<std::size_t>(n));
      for (auto& v : k) v = U(rng);
      const auto ev = eig_sym(h.P.eval(f(k)));
      ++total;
      if (ev.front() > 0.0) ++stable;
    }
  }
  auto sorted = [](std::vector<Point> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  const bool v3 = sorted(stable_simplex_vertices(3)) == sorted({{-3, 3, -1}, {-1, -1, 1}, {1, -1, -1}, {3, 3, 1}});
  const bool v4 = sorted(stable_simplex_vertices(4)) ==
                  sorted({{-4, 6, -4, 1}, {-2, 0, 2, -1}, {0, -2, 0, 1}, {2, 0, -2, -1}, {4, 6, 4, 1}});
  return {stable == total && v3 && v4,
          fmt("%d/%d samples positive definite, n=3 vertices %s, n=4 vertices %s", stable, total, v3 ? "match" : "differ",
              v4 ? "match" : "differ")};
}

// 9: closed-form moments against Monte-Carlo integrals.
Outcome moments() {
  const double vol3 = pushforward_moment(reflection_map(3), Monomial::from_exponents(std::vector<int>{0, 0, 0}));
  bool pass = std::abs(vol3 - 16.0 / 3.0) <= 1e-10;
  std::string detail = fmt("vol stability(3) - 16/3 = %.1e", vol3 - 16.0 / 3.0);

  struct Case {
    const char* label;
    MomentSource B;
  };
  const std::vector<Case> cases = {
      {"box", make_moment_source(example_problem("planar-box").bounds)},
      {"ball", make_moment_source(example_problem("planar-disk").bounds)},
      {"simplex", make_moment_source(example_problem("hermite4").bounds)},
      {"stability", MomentSource::pushforward(3)},
  };
  const long long N = 1000000;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const MomentSource& B = cases[c].B;
    const int n = B.dimension();
    const auto box = bounding_box(B);
    const auto monos = enum_monomials(n, 6);
    std::vector<double> s(monos.size(), 0.0), s2(monos.size(), 0.0);
    double vol = 1.0;
    std::vector<std::uniform_real_distribution<double>> U;
    for (const auto& iv : box) {
      vol *= iv.hi - iv.lo;
      U.emplace_back(iv.lo, iv.hi);
    }
    std::mt19937_64 rng(900 + c);
    Point x(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> pw(static_cast<std::size_t>(n), std::vector<double>(7));
    for (long long i = 0; i < N; ++i) {
      for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = U[static_cast<std::size_t>(j)](rng);
      if (!B.contains(x)) continue;
      for (int j = 0; j < n; ++j) {
        auto& p = pw[static_cast<std::size_t>(j)];
        p[0] = 1.0;
        for (int e = 1; e <= 6; ++e) p[static_cast<std::size_t>(e)] = p[static_cast<std::size_t>(e - 1)] * x[static_cast<std::size_t>(j)];
      }
      for (std::size_t k = 0; k < monos.size(); ++k) {
        double v = 1.0;
        for (int j = 0; j < n; ++j) v *= pw[static_cast<std::size_t>(j)][static_cast<std::size_t>(monos[k][j])];
        s[k] += v;
        s2[k] += v * v;
      }
    }
    int bad = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < monos.size(); ++k) {
      const double mean = s[k] / N;
      const double se = vol * std::sqrt(std::max(0.0, s2[k] / N - mean * mean) / N);
      const double z = std::abs(B.get(monos[k]) - vol * mean) / std::max(se, 1e-300);
      worst = std::max(worst, z);
      if (std::abs(B.get(monos[k]) - vol * mean) > 3.0 * se + 1e-12) ++bad;
    }
    if (bad) pass = false;
    detail += fmt("; %s %d/%zu within 3 SE (max %.2f)", cases[c].label, static_cast<int>(monos.size()) - bad,
                  monos.size(), worst);
  }
  return {pass, detail};
}

// 10: the three small solver examples.
Outcome solver() {
  std::vector<SdpProblem> probs(3);
  // minimize x s.t. x - s = 1
  probs[0].psd_blocks = {{"x", 1}, {"s", 1}};
  probs[0].rows.push_back({{{0, 0, 0, 1.0}, {1, 0, 0, -1.0}}, {}, 1.0});
  probs[0].objective_psd = {{0, 0, 0, 1.0}};
  // minimize trace X s.t. X11 = 1, X22 = 2
  probs[1].psd_blocks = {{"X", 2}};
  probs[1].rows.push_back({{{0, 0, 0, 1.0}}, {}, 1.0});
  probs[1].rows.push_back({{{0, 1, 1, 1.0}}, {}, 2.0});
  probs[1].objective_psd = {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}};
  // maximize t s.t. [[1, t], [t, 1]] PSD
  probs[2].psd_blocks = {{"X", 2}};
  probs[2].free_blocks = {{"t", 1}};
  probs[2].rows.push_back({{{0, 0, 0, 1.0}}, {}, 1.0});
  probs[2].rows.push_back({{{0, 1, 1, 1.0}}, {}, 1.0});
  probs[2].rows.push_back({{{0, 0, 1, 0.5}}, {{0, 0, -1.0}}, 0.0});
  probs[2].objective_free = {{0, 0, -1.0}};
  const double expected[3] = {1.0, 3.0, -1.0};

  bool pass = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const SdpSolution s = solve(probs[static_cast<std::size_t>(i)]);
    const double r = std::max({s.residuals.primal, s.residuals.dual, s.residuals.gap});
    const bool ok = s.status == SdpStatus::optimal && r <= 1e-8 && s.iterations < 50 &&
                    std::abs(s.primal_objective - expected[i]) <= 1e-7;
    pass = pass && ok;
    detail += fmt("%sexample %d: %d iterations, residual %.1e, objective %.9f", i ? "; " : "", i + 1, s.iterations, r,
                  s.primal_objective);
  }
  return {pass, detail};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int k, const char* what, const Outcome& o) {
    std::printf("criterion %2d %s  %s: %s\n", k, o.pass ? "PASS" : "FAIL", what, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };
  auto guarded = [&](int k, const char* what, auto&& fn) {
    try {
      report(k, what, fn());
    } catch (const std::exception& e) {
      report(k, what, Outcome{false, std::string("exception: ") + e.what()});
    }
  };

  std::map<std::string, Solved> solved;
  guarded(1, "soundness", [&] { return soundness(solved); });
  guarded(2, "L1 convergence", [&] { return l1_convergence(solved); });
  guarded(3, "bounding set", [&] { return bounding_set(solved); });
  guarded(4, "duality gap", [] { return duality(); });
  guarded(5, "identity residual", [&] { return identity(solved); });
  guarded(6, "nested variant", [&] { return nested(solved); });
  guarded(7, "convex variant", [] { return convex(); });
  guarded(8, "reflection oracle", [] { return reflection(); });
  guarded(9, "moments", [] { return moments(); });
  guarded(10, "solver examples", [] { return solver(); });
  std::printf("%d of 10 criteria failed\n", failed);
  return failed ? 1 : 0;
}
