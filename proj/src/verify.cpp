#include "pmi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <thread>

namespace pmi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Runs body(c) for c in [0, count) on up to hardware_concurrency threads.
/// Callers write into per-chunk slots and reduce in chunk order.
template <class Body>
void for_chunks(long long count, Body body) {
  const long long T = std::clamp<long long>(std::thread::hardware_concurrency(), 1, std::max(1LL, count));
  if (T <= 1) {
    for (long long c = 0; c < count; ++c) body(c);
    return;
  }
  std::vector<std::thread> pool;
  for (long long t = 0; t < T; ++t)
    pool.emplace_back([&, t] {
      for (long long c = t; c < count; c += T) body(c);
    });
  for (auto& th : pool) th.join();
}

Point full_point(const Universe& U, std::span<const double> x, std::span<const double> u) {
  Point pt(static_cast<std::size_t>(U.size()), 0.0);
  for (int i = 0; i < U.n && i < static_cast<int>(x.size()); ++i) pt[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
  for (int i = 0; i < U.p && i < static_cast<int>(u.size()); ++i) pt[static_cast<std::size_t>(U.u(i))] = u[static_cast<std::size_t>(i)];
  return pt;
}

struct Moments {
  long long n = 0;
  double sum = 0.0;
  double sumsq = 0.0;
  long long hits = 0;
  long long violations = 0;
  double worst = kInf;
};

}  // namespace

std::vector<double> eig_sym(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw DimensionError("eig_sym expects a square matrix");
  const int n = static_cast<int>(M.rows());
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(M(i, j) - M(j, i)) > 1e-12 * scale) throw DimensionError("eig_sym expects a symmetric matrix");

  Eigen::MatrixXd A = 0.5 * (M + M.transpose());
  const double stop = 1e-12 * std::max(1.0, A.norm());
  auto off = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += 2.0 * A(i, j) * A(i, j);
    return std::sqrt(s);
  };
  for (int sweep = 0; sweep < 100 && off() > stop; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = A(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

UPlan make_u_plan(const PmiProblem& problem, int grid, int random, std::uint64_t seed) {
  const Universe& U = problem.universe;
  UPlan plan;
  if (U.p == 0) {
    plan.points.emplace_back();
    return plan;
  }
  if (static_cast<int>(problem.u_box.size()) != U.p) throw DimensionError("u box does not match the u dimension");
  const Point zero_x(static_cast<std::size_t>(U.n), 0.0);
  auto feasible = [&](const Point& u) {
    const Point pt = full_point(U, zero_x, u);
    for (const auto& a : problem.a)
      if (a.eval(pt) < 0.0) return false;
    return true;
  };
  if (grid > 0) {
    std::vector<int> idx(static_cast<std::size_t>(U.p), 0);
    for (;;) {
      Point u(static_cast<std::size_t>(U.p));
      for (int i = 0; i < U.p; ++i) {
        const Interval& I = problem.u_box[static_cast<std::size_t>(i)];
        u[static_cast<std::size_t>(i)] =
            grid == 1 ? 0.5 * (I.lo + I.hi) : I.lo + (I.hi - I.lo) * idx[static_cast<std::size_t>(i)] / (grid - 1);
      }
      if (feasible(u)) plan.points.push_back(u);
      int k = 0;
      while (k < U.p && ++idx[static_cast<std::size_t>(k)] == grid) idx[static_cast<std::size_t>(k++)] = 0;
      if (k == U.p) break;
    }
  }
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  const long long max_tries = 100LL * std::max(random, 1);
  int kept = 0;
  for (long long tries = 0; kept < random && tries < max_tries; ++tries) {
    Point u(static_cast<std::size_t>(U.p));
    for (int i = 0; i < U.p; ++i) {
      const Interval& I = problem.u_box[static_cast<std::size_t>(i)];
      u[static_cast<std::size_t>(i)] = I.lo + (I.hi - I.lo) * U01(rng);
    }
    if (feasible(u)) {
      plan.points.push_back(u);
      ++kept;
    }
  }
  if (plan.points.empty()) throw VerifyError("no u sample satisfies the U constraints");
  return plan;
}

double lambda_min(const PmiProblem& problem, std::span<const double> x, const UPlan& plan) {
  return LambdaEvaluator(problem, plan)(x);
}

LambdaEvaluator::LambdaEvaluator(const PmiProblem& problem, const UPlan& plan)
    : size_(problem.P.size()), universe_(problem.universe) {
  if (plan.points.empty()) throw VerifyError("empty u sampling plan");
  const Universe& U = universe_;
  std::map<std::vector<std::pair<int, int>>, int> u_index;
  for (int i = 0; i < size_; ++i)
    for (int j = i; j < size_; ++j) {
      const int e = static_cast<int>(entries_.size());
      entries_.emplace_back(i, j);
      for (const auto& [mono, c] : problem.P.entry(i, j).terms()) {
        Term t;
        t.entry = e;
        t.coeff = c;
        std::vector<std::pair<int, int>> up;
        for (int s = 0; s < U.size(); ++s) {
          if (mono[s] == 0) continue;
          if (U.is_x(s))
            t.x_pows.emplace_back(s, mono[s]);
          else if (U.is_u(s))
            up.emplace_back(s - U.n, mono[s]);
          else
            throw DimensionError("P must not depend on v");
        }
        auto it = u_index.try_emplace(up, static_cast<int>(u_monos_.size())).first;
        if (it->second == static_cast<int>(u_monos_.size())) u_monos_.push_back(up);
        t.u_mono = it->second;
        terms_.push_back(std::move(t));
      }
    }
  for (const auto& u : plan.points) {
    std::vector<double> vals;
    for (const auto& um : u_monos_) {
      double v = 1.0;
      for (auto [s, k] : um) v *= std::pow(u[static_cast<std::size_t>(s)], k);
      vals.push_back(v);
    }
    u_values_.push_back(std::move(vals));
  }
}

double LambdaEvaluator::operator()(std::span<const double> x) const {
  const int m = size_;
  const std::size_t K = u_monos_.size();
  std::vector<Eigen::MatrixXd> Mk(K, Eigen::MatrixXd::Zero(m, m));
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (auto [s, k] : t.x_pows) v *= std::pow(x[static_cast<std::size_t>(s)], k);
    const auto [i, j] = entries_[static_cast<std::size_t>(t.entry)];
    Mk[static_cast<std::size_t>(t.u_mono)](i, j) += v;
  }
  for (auto& M : Mk) M.triangularView<Eigen::StrictlyLower>() = M.transpose().triangularView<Eigen::StrictlyLower>();
  double best = kInf;
  Eigen::MatrixXd P(m, m);
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  for (const auto& w : u_values_) {
    P.setZero();
    for (std::size_t k = 0; k < K; ++k) P += w[k] * Mk[k];
    if (std::isfinite(best)) {
      Eigen::MatrixXd Q = P;
      Q.diagonal().array() -= best;
      llt.compute(Q);
      if (llt.info() == Eigen::Success) continue;
    }
    best = std::min(best, eig_sym(P).front());
  }
  return best;
}

Membership membership(const PmiProblem& problem, std::span<const double> x, const UPlan& plan) {
  const double lam = lambda_min(problem, x, plan);
  return {lam >= -1e-9, lam};
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Estimate mc_volume(const RegionPredicate& inside, const MomentSource& B, long long N, std::uint64_t seed) {
  Estimate e;
  const double vol = B.volume();
  if (N <= 0) return e;
  const long long chunks = (N + kChunk - 1) / kChunk;
  std::vector<long long> hits(static_cast<std::size_t>(chunks), 0);
  for_chunks(chunks, [&](long long c) {
    std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(c)));
    const long long len = std::min(kChunk, N - c * kChunk);
    long long h = 0;
    for (long long i = 0; i < len; ++i)
      if (inside(B.sample(rng))) ++h;
    hits[static_cast<std::size_t>(c)] = h;
  });
  long long total = 0;
  for (long long h : hits) total += h;
  const double p = static_cast<double>(total) / static_cast<double>(N);
  e.value = vol * p;
  e.std_error = vol * std::sqrt(p * (1.0 - p) / static_cast<double>(N));
  e.samples = N;
  return e;
}

Estimate mc_volume(const Polynomial& g, const MomentSource& B, long long N, std::uint64_t seed) {
  return mc_volume([&](std::span<const double> x) { return eval_x(g, x) >= 0.0; }, B, N, seed);
}

GapEstimate l1_gap(const Polynomial& g, const PmiProblem& problem, const UPlan& plan, long long N,
                   std::uint64_t seed) {
  GapEstimate out;
  const MomentSource& B = problem.moments;
  const double vol = B.volume();
  if (N <= 0) return out;
  const long long chunks = (N + kChunk - 1) / kChunk;
  std::vector<Moments> parts(static_cast<std::size_t>(chunks));
  const LambdaEvaluator lam_of(problem, plan);
  for_chunks(chunks, [&](long long c) {
    std::mt19937_64 rng(splitmix64(seed + static_cast<std::uint64_t>(c)));
    Moments& m = parts[static_cast<std::size_t>(c)];
    const long long len = std::min(kChunk, N - c * kChunk);
    for (long long i = 0; i < len; ++i) {
      const Point x = B.sample(rng);
      const double lam = lam_of(x);
      const double gx = eval_x(g, x);
      const double diff = lam - gx;
      m.sum += diff;
      m.sumsq += diff * diff;
      ++m.n;
      if (gx > lam + 1e-6) ++m.violations;
      m.worst = std::min(m.worst, diff);
    }
  });
  Moments t;
  for (const auto& m : parts) {
    t.n += m.n;
    t.sum += m.sum;
    t.sumsq += m.sumsq;
    t.violations += m.violations;
    t.worst = std::min(t.worst, m.worst);
  }
  const double Nd = static_cast<double>(t.n);
  const double mean = t.sum / Nd;
  const double var = t.n > 1 ? std::max(0.0, (t.sumsq - Nd * mean * mean) / (Nd - 1.0)) : 0.0;
  out.estimate.value = vol * mean;
  out.estimate.std_error = vol * std::sqrt(var / Nd);
  out.estimate.samples = t.n;
  out.violations = t.violations;
  out.worst_margin = t.worst;
  return out;
}

double eval_x(const Polynomial& g, std::span<const double> x) {
  return g.eval(full_point(g.universe(), x, {}));
}

double eval_piecewise_max(std::span<const Polynomial> gs, std::span<const double> x) {
  if (gs.empty()) throw DimensionError("eval_piecewise_max needs at least one polynomial");
  double best = -kInf;
  for (const auto& g : gs) best = std::max(best, eval_x(g, x));
  return best;
}

std::vector<Interval> bounding_box(const MomentSource& B) {
  const int n = B.dimension();
  std::vector<Interval> box(static_cast<std::size_t>(n));
  switch (B.kind()) {
    case BoundKind::box:
      return B.box_bounds();
    case BoundKind::ball: {
      const auto& c = B.ball_center();
      const double r = B.ball_radius();
      for (int i = 0; i < n; ++i) box[static_cast<std::size_t>(i)] = {c[static_cast<std::size_t>(i)] - r, c[static_cast<std::size_t>(i)] + r};
      return box;
    }
    case BoundKind::simplex:
    case BoundKind::pushforward: {
      for (auto& I : box) I = {kInf, -kInf};
      for (const auto& v : B.simplex_vertices())
        for (int i = 0; i < n; ++i) {
          auto& I = box[static_cast<std::size_t>(i)];
          I.lo = std::min(I.lo, v[static_cast<std::size_t>(i)]);
          I.hi = std::max(I.hi, v[static_cast<std::size_t>(i)]);
        }
      return box;
    }
  }
  return box;
}

namespace {

double grid_coord(const Interval& I, int k, int res) {
  return res == 1 ? 0.5 * (I.lo + I.hi) : I.lo + (I.hi - I.lo) * k / (res - 1);
}

}  // namespace

std::vector<Point> section_grid(const MomentSource& B, const Section& section, int res) {
  const int n = B.dimension();
  if (res < 1) throw DimensionError("grid resolution must be positive");
  for (int a : section.axes)
    if (a < 0 || a >= n) throw DimensionError("section axis out of range");
  if (section.axes[0] == section.axes[1]) throw DimensionError("section axes must differ");
  Point base(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n && i < static_cast<int>(section.fixed.size()); ++i) base[static_cast<std::size_t>(i)] = section.fixed[static_cast<std::size_t>(i)];
  const auto box = bounding_box(B);
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(res) * static_cast<std::size_t>(res));
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      Point x = base;
      x[static_cast<std::size_t>(section.axes[0])] = grid_coord(box[static_cast<std::size_t>(section.axes[0])], i, res);
      x[static_cast<std::size_t>(section.axes[1])] = grid_coord(box[static_cast<std::size_t>(section.axes[1])], j, res);
      pts.push_back(std::move(x));
    }
  return pts;
}

std::vector<Point> grid_in_bounds(const MomentSource& B, int res) {
  const int n = B.dimension();
  if (res < 1) throw DimensionError("grid resolution must be positive");
  std::vector<Point> pts;
  if (n > 3 || n < 1) {
    for (auto& x : section_grid(B, Section{}, res))
      if (B.contains(x, 1e-12)) pts.push_back(std::move(x));
    return pts;
  }
  const auto box = bounding_box(B);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    Point x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = grid_coord(box[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(i)], res);
    if (B.contains(x, 1e-12)) pts.push_back(std::move(x));
    int k = 0;
    while (k < n && ++idx[static_cast<std::size_t>(k)] == res) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == n) break;
  }
  return pts;
}

SampleReport soundness_sweep(const PmiProblem& problem, const Polynomial& g, const UPlan& plan, int res,
                             std::uint64_t seed) {
  const std::vector<Point> pts = grid_in_bounds(problem.moments, res);
  const long long count = static_cast<long long>(pts.size());
  const long long chunks = (count + kChunk - 1) / kChunk;
  std::vector<Moments> parts(static_cast<std::size_t>(chunks));
  const LambdaEvaluator lam_of(problem, plan);
  for_chunks(chunks, [&](long long c) {
    Moments& m = parts[static_cast<std::size_t>(c)];
    const long long end = std::min(count, (c + 1) * kChunk);
    for (long long i = c * kChunk; i < end; ++i) {
      const Point& x = pts[static_cast<std::size_t>(i)];
      ++m.n;
      if (eval_x(g, x) < 1e-6) continue;
      ++m.hits;
      const double lam = lam_of(x);
      m.worst = std::min(m.worst, lam);
      if (lam < -1e-9) ++m.violations;
    }
  });
  SampleReport r;
  r.seed = seed;
  r.worst_margin = kInf;
  for (const auto& m : parts) {
    r.samples += m.n;
    r.tested += m.hits;
    r.violations += m.violations;
    r.worst_margin = std::min(r.worst_margin, m.worst);
  }
  return r;
}

double min_hessian_eigenvalue(const Polynomial& g, std::span<const Point> points, double sign) {
  const MatrixPolynomial H = hessian(g);
  double worst = kInf;
  for (const auto& x : points) {
    const Eigen::MatrixXd Hx = sign * H.eval(full_point(g.universe(), x, {}));
    worst = std::min(worst, eig_sym(Hx).front());
  }
  return worst;
}

}  // namespace pmi
