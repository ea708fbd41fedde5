#pragma once

#include <memory>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "pmi/polyalg.hpp"
#include "pmi/stability.hpp"

namespace pmi {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class BoundKind { box, ball, simplex, pushforward };

/// Lebesgue moments y_alpha = int_B x^alpha dx of a bounding set B in R^n.
/// Values are memoized per alpha; concurrent get() calls are safe.
class MomentSource {
 public:
  /// Empty source; every accessor except valid() throws until assigned.
  MomentSource() = default;
  static MomentSource box(std::vector<Interval> bounds);
  static MomentSource ball(std::vector<double> center, double radius);
  /// Throws GeometryError when the vertices are affinely dependent.
  static MomentSource simplex(std::vector<Point> vertices);
  /// Stability region of monic degree-n polynomials, through reflection_map(n).
  static MomentSource pushforward(int n);

  bool valid() const { return state_ != nullptr; }
  BoundKind kind() const;
  int dimension() const;
  /// alpha is read from slots 0..n-1.
  double get(const Monomial& alpha) const;
  double volume() const { return get(Monomial{}); }

  const std::vector<Interval>& box_bounds() const;
  const std::vector<double>& ball_center() const;
  double ball_radius() const;
  /// Simplex vertices; for pushforward, the vertices of its convex hull.
  const std::vector<Point>& simplex_vertices() const;
  /// Only for pushforward.
  const ReflectionMap& reflection() const;

  /// Euclidean radius of a centered ball containing B.
  double outer_radius() const;

  /// Polynomials b_j(x) >= 0 describing B over `universe` (x in its first
  /// n slots): box (hi - x)(x - lo), ball r^2 - |x - c|^2, simplex and
  /// pushforward the barycentric coordinates of the (hull) simplex.
  std::vector<Polynomial> constraints(Universe universe) const;
  bool contains(std::span<const double> x, double tol = 0.0) const;
  /// One point uniformly distributed on B.
  Point sample(std::mt19937_64& rng) const;

 private:
  struct State;
  explicit MomentSource(std::shared_ptr<State> s) : state_(std::move(s)) {}
  const State& state() const;
  std::shared_ptr<State> state_;
};

/// prod_i (hi_i^(a_i+1) - lo_i^(a_i+1)) / (a_i + 1)
double box_moment(std::span<const Interval> bounds, const Monomial& alpha);

/// Ball of radius r centered at the origin in R^n: zero when any a_i is odd,
/// otherwise r^(n+|a|) prod_i Gamma((a_i+1)/2) / Gamma(1 + (n+|a|)/2).
double ball_moment(int n, double radius, const Monomial& alpha);
/// Off-center ball through the binomial shift.
double ball_moment(std::span<const double> center, double radius, const Monomial& alpha);

/// Dirichlet route: expand x^alpha in barycentric coordinates and use
/// int lambda^beta dx = n! vol prod beta_j! / (n + |beta|)!.
double simplex_moment(std::span<const Point> vertices, const Monomial& alpha);

/// int_{[-1,1]^n} prod_i f_i(k)^a_i det(grad f(k)) dk, expanded symbolically.
double pushforward_moment(const ReflectionMap& f, const Monomial& alpha);

/// Signed volume helper; |det [v1-v0, ..., vn-v0]| / n!.
double simplex_volume(std::span<const Point> vertices);

}  // namespace pmi
