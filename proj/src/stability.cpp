#include "pmi/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pmi/errors.hpp"

namespace pmi {

HermiteInstance hermite_matrix(int n) { return hermite_matrix(n, Universe{n, 0, 0}); }

HermiteInstance hermite_matrix(int n, Universe universe) {
  if (n < 1) throw DimensionError("hermite_matrix needs n >= 1");
  if (universe.n < n) throw DimensionError("universe has fewer x slots than polynomial coefficients");

  // coef(0) = 1 (monic), coef(i) = x_i.
  auto coef = [&](int i) {
    return i == 0 ? Polynomial::constant(universe, 1.0) : Polynomial::variable(universe, universe.x(i - 1));
  };
  // T1(r, c) = coef(c - r), T2(r, c) = coef(n - (c - r)) for c >= r.
  auto t1 = [&](int r, int c) { return c >= r ? coef(c - r) : Polynomial(universe); };
  auto t2 = [&](int r, int c) { return c >= r ? coef(n - (c - r)) : Polynomial(universe); };

  HermiteInstance h{n, MatrixPolynomial(n, universe)};
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Polynomial e(universe);
      for (int r = 0; r <= std::min(i, j); ++r) {
        e += t1(r, i) * t1(r, j);
        e -= t2(r, i) * t2(r, j);
      }
      h.P.set(i, j, e);
    }
  return h;
}

Point ReflectionMap::operator()(std::span<const double> k) const {
  Point x(components.size());
  for (std::size_t i = 0; i < components.size(); ++i) x[i] = components[i].eval(k);
  return x;
}

ReflectionMap reflection_map(int n) {
  if (n < 1) throw DimensionError("reflection_map needs n >= 1");
  const Universe K{n, 0, 0};
  std::vector<Polynomial> c{Polynomial::constant(K, 1.0)};
  for (int j = 0; j < n; ++j) {
    c.emplace_back(K);
    const Polynomial kj = Polynomial::variable(K, j);
    std::vector<Polynomial> next(c.size(), Polynomial(K));
    for (std::size_t i = 0; i < c.size(); ++i) next[i] = c[i] + kj * c[c.size() - 1 - i];
    c = std::move(next);
  }

  ReflectionMap f;
  f.n = n;
  f.components.assign(c.begin() + 1, c.end());
  std::vector<std::vector<Polynomial>> jac(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) jac[static_cast<std::size_t>(i)].push_back(f.components[static_cast<std::size_t>(i)].derivative(j));
  f.jacobian_det = determinant(jac);
  return f;
}

std::vector<Point> stable_simplex_vertices(int n) {
  if (n < 1) throw DimensionError("stable_simplex_vertices needs n >= 1");
  std::vector<Point> out;
  for (int j = n; j >= 0; --j) {
    // Coefficients of (z-1)^j (z+1)^(n-j), highest degree first.
    std::vector<double> c{1.0};
    auto mul = [&](double root) {
      std::vector<double> r(c.size() + 1, 0.0);
      for (std::size_t i = 0; i < c.size(); ++i) {
        r[i] += c[i];
        r[i + 1] -= root * c[i];
      }
      c = std::move(r);
    };
    for (int i = 0; i < j; ++i) mul(1.0);
    for (int i = 0; i < n - j; ++i) mul(-1.0);
    out.emplace_back(c.begin() + 1, c.end());
  }
  return out;
}

std::vector<Point> section_bounding_simplex(int n, const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (A.rows() != n || b.size() != n) throw DimensionError("affine substitution must map into R^n");
  const int k = static_cast<int>(A.cols());
  if (k < 1 || k > n) throw DimensionError("design dimension must be between 1 and n");
  if (Eigen::FullPivLU<Eigen::MatrixXd>(A).rank() < k)
    throw GeometryError("affine substitution is not injective; the section is unbounded");

  const auto V = stable_simplex_vertices(n);
  Eigen::MatrixXd T(n, n);
  Eigen::VectorXd v0 = Eigen::Map<const Eigen::VectorXd>(V[0].data(), n);
  for (int j = 1; j <= n; ++j) T.col(j - 1) = Eigen::Map<const Eigen::VectorXd>(V[static_cast<std::size_t>(j)].data(), n) - v0;
  const Eigen::MatrixXd Tinv = T.inverse();

  // Barycentric coordinates of A x + b are L x + c.
  Eigen::MatrixXd L(n + 1, k);
  Eigen::VectorXd c(n + 1);
  L.bottomRows(n) = Tinv * A;
  c.tail(n) = Tinv * (b - v0);
  L.row(0) = -L.bottomRows(n).colwise().sum();
  c(0) = 1.0 - c.tail(n).sum();

  std::vector<Point> verts;
  std::vector<int> pick(static_cast<std::size_t>(k));
  std::iota(pick.begin(), pick.end(), 0);
  const double tol = 1e-10;
  while (true) {
    Eigen::MatrixXd Ls(k, k);
    Eigen::VectorXd cs(k);
    for (int r = 0; r < k; ++r) {
      Ls.row(r) = L.row(pick[static_cast<std::size_t>(r)]);
      cs(r) = c(pick[static_cast<std::size_t>(r)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Ls);
    if (lu.rank() == k) {
      Eigen::VectorXd x = lu.solve(-cs);
      if (((L * x + c).array() >= -tol).all()) {
        Point p(x.data(), x.data() + k);
        const bool dup = std::any_of(verts.begin(), verts.end(), [&](const Point& q) {
          double d = 0.0;
          for (int i = 0; i < k; ++i) d = std::max(d, std::abs(q[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]));
          return d < 1e-9;
        });
        if (!dup) verts.push_back(std::move(p));
      }
    }
    // Next k-subset of {0..n}.
    int i = k - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n + 1 - k + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (verts.empty()) throw GeometryError("affine section does not meet the stability simplex");

  if (k == 2 && verts.size() > 2) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : verts) {
      cx += p[0];
      cy += p[1];
    }
    cx /= static_cast<double>(verts.size());
    cy /= static_cast<double>(verts.size());
    std::sort(verts.begin(), verts.end(), [&](const Point& a, const Point& q) {
      return std::atan2(a[1] - cy, a[0] - cx) < std::atan2(q[1] - cy, q[0] - cx);
    });
  }
  return verts;
}

std::vector<Polynomial> affine_images(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, Universe design) {
  if (design.n < A.cols()) throw DimensionError("design universe too small for substitution");
  std::vector<Polynomial> out;
  for (int i = 0; i < A.rows(); ++i) {
    Polynomial p = Polynomial::constant(design, b(i));
    for (int j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0.0) p += Polynomial::term(design, Monomial::variable(design.x(j)), A(i, j));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace pmi
