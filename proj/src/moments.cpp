#include "pmi/moments.hpp"

#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include "pmi/errors.hpp"

namespace pmi {

namespace {

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// int_{-1}^{1} t^e dt
double unit_interval_moment(int e) { return e % 2 == 1 ? 0.0 : 2.0 / (e + 1); }

}  // namespace

double box_moment(std::span<const Interval> bounds, const Monomial& alpha) {
  double r = 1.0;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const int a = alpha[static_cast<int>(i)];
    const auto [lo, hi] = bounds[i];
    r *= (std::pow(hi, a + 1) - std::pow(lo, a + 1)) / (a + 1);
  }
  return r;
}

double ball_moment(int n, double radius, const Monomial& alpha) {
  double num = 1.0;
  for (int i = 0; i < n; ++i) {
    if (alpha[i] % 2 == 1) return 0.0;
    num *= std::tgamma((alpha[i] + 1) / 2.0);
  }
  const int total = alpha.degree_in(0, n);
  return std::pow(radius, n + total) * num / std::tgamma(1.0 + (n + total) / 2.0);
}

double ball_moment(std::span<const double> center, double radius, const Monomial& alpha) {
  const int n = static_cast<int>(center.size());
  // (c + y)^alpha = sum_beta C(alpha, beta) c^(alpha-beta) y^beta
  std::vector<int> beta(static_cast<std::size_t>(n), 0);
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) {
      const int a = alpha[i], b = beta[static_cast<std::size_t>(i)];
      w *= binomial(a, b) * std::pow(center[static_cast<std::size_t>(i)], a - b);
    }
    if (w != 0.0) sum += w * ball_moment(n, radius, Monomial::from_exponents(beta));
    int i = 0;
    while (i < n && beta[static_cast<std::size_t>(i)] == alpha[i]) beta[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
    ++beta[static_cast<std::size_t>(i)];
  }
  return sum;
}

double simplex_volume(std::span<const Point> vertices) {
  const int n = static_cast<int>(vertices.size()) - 1;
  if (n < 1) throw GeometryError("simplex needs at least two vertices");
  Eigen::MatrixXd T(n, n);
  for (int j = 1; j <= n; ++j) {
    if (static_cast<int>(vertices[static_cast<std::size_t>(j)].size()) != n ||
        static_cast<int>(vertices[0].size()) != n)
      throw DimensionError("simplex vertex dimension mismatch");
    for (int i = 0; i < n; ++i)
      T(i, j - 1) = vertices[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] - vertices[0][static_cast<std::size_t>(i)];
  }
  return std::abs(T.determinant()) / factorial(n);
}

double simplex_moment(std::span<const Point> vertices, const Monomial& alpha) {
  const int n = static_cast<int>(vertices.size()) - 1;
  const double vol = simplex_volume(vertices);
  double scale = 0.0;
  for (const auto& v : vertices)
    for (double c : v) scale = std::max(scale, std::abs(c));
  if (vol <= 1e-14 * std::pow(std::max(scale, 1.0), n)) throw GeometryError("degenerate simplex");

  const Universe L{n + 1, 0, 0};
  Polynomial prod = Polynomial::constant(L, 1.0);
  for (int i = 0; i < n; ++i) {
    if (alpha[i] == 0) continue;
    Polynomial xi(L);
    for (int j = 0; j <= n; ++j)
      xi.add_term(Monomial::variable(j), vertices[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
    prod = prod * xi.pow(alpha[i]);
  }
  double sum = 0.0;
  for (const auto& [beta, c] : prod.terms()) {
    double w = 1.0;
    for (int j = 0; j <= n; ++j) w *= factorial(beta[j]);
    sum += c * w / factorial(n + beta.degree());
  }
  return sum * factorial(n) * vol;
}

double pushforward_moment(const ReflectionMap& f, const Monomial& alpha) {
  Polynomial integrand = f.jacobian_det;
  for (int i = 0; i < f.n; ++i)
    if (alpha[i] > 0) integrand = integrand * f.components[static_cast<std::size_t>(i)].pow(alpha[i]);
  double sum = 0.0;
  for (const auto& [m, c] : integrand.terms()) {
    double w = c;
    for (int i = 0; i < f.n && w != 0.0; ++i) w *= unit_interval_moment(m[i]);
    sum += w;
  }
  return sum;
}

// ----------------------------------------------------------- MomentSource

struct MomentSource::State {
  BoundKind kind = BoundKind::box;
  int n = 0;
  std::vector<Interval> bounds;
  std::vector<double> center;
  double radius = 0.0;
  std::vector<Point> vertices;
  ReflectionMap reflection;

  mutable std::shared_mutex mutex;
  mutable std::unordered_map<Monomial, double, MonomialHash> cache;

  double compute(const Monomial& a) const {
    switch (kind) {
      case BoundKind::box: return box_moment(bounds, a);
      case BoundKind::ball: return ball_moment(center, radius, a);
      case BoundKind::simplex: return simplex_moment(vertices, a);
      case BoundKind::pushforward: return pushforward_moment(reflection, a);
    }
    return 0.0;
  }
};

MomentSource MomentSource::box(std::vector<Interval> bounds) {
  if (bounds.empty()) throw DimensionError("box needs at least one axis");
  for (const auto& b : bounds)
    if (!(b.lo < b.hi)) throw GeometryError("box interval must satisfy lo < hi");
  auto s = std::make_shared<State>();
  s->kind = BoundKind::box;
  s->n = static_cast<int>(bounds.size());
  s->bounds = std::move(bounds);
  return MomentSource(std::move(s));
}

MomentSource MomentSource::ball(std::vector<double> center, double radius) {
  if (center.empty()) throw DimensionError("ball needs a center");
  if (!(radius > 0.0)) throw GeometryError("ball radius must be positive");
  auto s = std::make_shared<State>();
  s->kind = BoundKind::ball;
  s->n = static_cast<int>(center.size());
  s->center = std::move(center);
  s->radius = radius;
  return MomentSource(std::move(s));
}

MomentSource MomentSource::simplex(std::vector<Point> vertices) {
  auto s = std::make_shared<State>();
  s->kind = BoundKind::simplex;
  s->n = static_cast<int>(vertices.size()) - 1;
  s->vertices = std::move(vertices);
  simplex_moment(s->vertices, Monomial{});  // validates
  return MomentSource(std::move(s));
}

MomentSource MomentSource::pushforward(int n) {
  auto s = std::make_shared<State>();
  s->kind = BoundKind::pushforward;
  s->n = n;
  s->reflection = reflection_map(n);
  s->vertices = stable_simplex_vertices(n);
  return MomentSource(std::move(s));
}

const MomentSource::State& MomentSource::state() const {
  if (!state_) throw DimensionError("moment source is empty");
  return *state_;
}

BoundKind MomentSource::kind() const { return state().kind; }
int MomentSource::dimension() const { return state().n; }
const std::vector<Interval>& MomentSource::box_bounds() const { return state().bounds; }
const std::vector<double>& MomentSource::ball_center() const { return state().center; }
double MomentSource::ball_radius() const { return state().radius; }
const std::vector<Point>& MomentSource::simplex_vertices() const { return state().vertices; }
const ReflectionMap& MomentSource::reflection() const { return state().reflection; }

double MomentSource::get(const Monomial& alpha) const {
  state();
  {
    std::shared_lock lock(state_->mutex);
    if (auto it = state_->cache.find(alpha); it != state_->cache.end()) return it->second;
  }
  const double v = state_->compute(alpha);
  std::unique_lock lock(state_->mutex);
  state_->cache.emplace(alpha, v);
  return v;
}

double MomentSource::outer_radius() const {
  const State& s = state();
  switch (s.kind) {
    case BoundKind::box: {
      double r2 = 0.0;
      for (const auto& b : s.bounds) r2 += std::max(b.lo * b.lo, b.hi * b.hi);
      return std::sqrt(r2);
    }
    case BoundKind::ball: {
      double c2 = 0.0;
      for (double c : s.center) c2 += c * c;
      return std::sqrt(c2) + s.radius;
    }
    case BoundKind::simplex:
    case BoundKind::pushforward: {
      double r2 = 0.0;
      for (const auto& v : s.vertices) {
        double t = 0.0;
        for (double c : v) t += c * c;
        r2 = std::max(r2, t);
      }
      return std::sqrt(r2);
    }
  }
  return 0.0;
}

namespace {

/// Barycentric coordinates lambda(x) = L x + c of a simplex, rows 0..n.
void barycentric(const std::vector<Point>& V, Eigen::MatrixXd& L, Eigen::VectorXd& c) {
  const int n = static_cast<int>(V.size()) - 1;
  Eigen::MatrixXd T(n, n);
  Eigen::VectorXd v0 = Eigen::Map<const Eigen::VectorXd>(V[0].data(), n);
  for (int j = 1; j <= n; ++j) T.col(j - 1) = Eigen::Map<const Eigen::VectorXd>(V[static_cast<std::size_t>(j)].data(), n) - v0;
  const Eigen::MatrixXd Ti = T.inverse();
  L.resize(n + 1, n);
  c.resize(n + 1);
  L.bottomRows(n) = Ti;
  c.tail(n) = -Ti * v0;
  L.row(0) = -Ti.colwise().sum();
  c(0) = 1.0 - c.tail(n).sum();
}

bool hermite_pd(std::span<const double> x) {
  static thread_local std::vector<HermiteInstance> cache;
  const int n = static_cast<int>(x.size());
  while (static_cast<int>(cache.size()) < n) cache.push_back(hermite_matrix(static_cast<int>(cache.size()) + 1));
  Eigen::MatrixXd H = cache[static_cast<std::size_t>(n - 1)].P.eval(x);
  // Singular H (roots on the circle or in reciprocal pairs) must not pass
  // on rounding.
  H.diagonal().array() -= 1e-10 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  return llt.info() == Eigen::Success;
}

}  // namespace

std::vector<Polynomial> MomentSource::constraints(Universe U) const {
  const State& s = state();
  if (U.n != s.n) throw DimensionError("bounding set dimension differs from the number of x variables");
  std::vector<Polynomial> out;
  auto xv = [&](int i) { return Polynomial::variable(U, U.x(i)); };
  switch (s.kind) {
    case BoundKind::box:
      for (int i = 0; i < s.n; ++i) {
        const auto [lo, hi] = s.bounds[static_cast<std::size_t>(i)];
        out.push_back((Polynomial::constant(U, hi) - xv(i)) * (xv(i) - Polynomial::constant(U, lo)));
      }
      break;
    case BoundKind::ball: {
      Polynomial p = Polynomial::constant(U, s.radius * s.radius);
      for (int i = 0; i < s.n; ++i) {
        const Polynomial d = xv(i) - Polynomial::constant(U, s.center[static_cast<std::size_t>(i)]);
        p -= d * d;
      }
      out.push_back(std::move(p));
      break;
    }
    case BoundKind::simplex:
    case BoundKind::pushforward: {
      Eigen::MatrixXd L;
      Eigen::VectorXd c;
      barycentric(s.vertices, L, c);
      for (int r = 0; r <= s.n; ++r) {
        Polynomial p = Polynomial::constant(U, c(r));
        for (int i = 0; i < s.n; ++i)
          if (L(r, i) != 0.0) p += L(r, i) * xv(i);
        out.push_back(std::move(p));
      }
      break;
    }
  }
  return out;
}

bool MomentSource::contains(std::span<const double> x, double tol) const {
  const State& s = state();
  if (static_cast<int>(x.size()) != s.n) throw DimensionError("point dimension mismatch");
  switch (s.kind) {
    case BoundKind::box:
      for (int i = 0; i < s.n; ++i) {
        const auto [lo, hi] = s.bounds[static_cast<std::size_t>(i)];
        if (x[static_cast<std::size_t>(i)] < lo - tol || x[static_cast<std::size_t>(i)] > hi + tol) return false;
      }
      return true;
    case BoundKind::ball: {
      double r2 = 0.0;
      for (int i = 0; i < s.n; ++i) {
        const double d = x[static_cast<std::size_t>(i)] - s.center[static_cast<std::size_t>(i)];
        r2 += d * d;
      }
      return r2 <= s.radius * s.radius + tol;
    }
    case BoundKind::simplex: {
      Eigen::MatrixXd L;
      Eigen::VectorXd c;
      barycentric(s.vertices, L, c);
      const Eigen::VectorXd lam = L * Eigen::Map<const Eigen::VectorXd>(x.data(), s.n) + c;
      return lam.minCoeff() >= -tol;
    }
    case BoundKind::pushforward:
      return hermite_pd(x);
  }
  return false;
}

Point MomentSource::sample(std::mt19937_64& rng) const {
  const State& s = state();
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  Point x(static_cast<std::size_t>(s.n));
  auto simplex_point = [&] {
    // Dirichlet(1, ..., 1) weights on the vertices.
    std::exponential_distribution<double> E(1.0);
    std::vector<double> w(static_cast<std::size_t>(s.n + 1));
    double tot = 0.0;
    for (auto& wi : w) tot += (wi = E(rng));
    std::fill(x.begin(), x.end(), 0.0);
    for (int j = 0; j <= s.n; ++j)
      for (int i = 0; i < s.n; ++i)
        x[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(j)] / tot * s.vertices[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  };
  switch (s.kind) {
    case BoundKind::box:
      for (int i = 0; i < s.n; ++i) {
        const auto [lo, hi] = s.bounds[static_cast<std::size_t>(i)];
        x[static_cast<std::size_t>(i)] = lo + (hi - lo) * U01(rng);
      }
      break;
    case BoundKind::ball: {
      std::normal_distribution<double> N01;
      double nrm = 0.0;
      for (auto& xi : x) {
        xi = N01(rng);
        nrm += xi * xi;
      }
      nrm = std::sqrt(nrm);
      const double r = s.radius * std::pow(U01(rng), 1.0 / s.n);
      for (int i = 0; i < s.n; ++i)
        x[static_cast<std::size_t>(i)] = s.center[static_cast<std::size_t>(i)] + r * x[static_cast<std::size_t>(i)] / nrm;
      break;
    }
    case BoundKind::simplex:
      simplex_point();
      break;
    case BoundKind::pushforward:
      do simplex_point();
      while (!hermite_pd(x));
      break;
  }
  return x;
}

}  // namespace pmi
