#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pmi {

inline constexpr int kMaxVars = 16;

/// Variable layout shared by every polynomial of a problem: slots
/// [0, n) hold x, [n, n+p) hold u and [n+p, n+p+m) hold v.
struct Universe {
  int n = 0;
  int p = 0;
  int m = 0;

  int size() const { return n + p + m; }
  int x(int i) const { return i; }
  int u(int i) const { return n + i; }
  int v(int i) const { return n + p + i; }
  bool is_x(int slot) const { return slot < n; }
  bool is_u(int slot) const { return slot >= n && slot < n + p; }
  bool is_v(int slot) const { return slot >= n + p && slot < size(); }
  /// "x1", "u2", "v3", ...
  std::string slot_name(int slot) const;

  friend bool operator==(const Universe&, const Universe&) = default;
};

class Monomial {
 public:
  Monomial() = default;

  static Monomial variable(int slot, int power = 1);
  static Monomial from_exponents(std::span<const int> exponents);

  int operator[](int slot) const { return exps_[static_cast<std::size_t>(slot)]; }
  void set(int slot, int exponent);
  int degree() const { return degree_; }
  /// Sum of exponents over slots [first, last).
  int degree_in(int first, int last) const;

  Monomial operator*(const Monomial& other) const;

  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps_ == b.exps_; }
  std::size_t hash() const;

 private:
  std::array<std::uint8_t, kMaxVars> exps_{};
  std::uint16_t degree_ = 0;
};

/// Graded-lex order: lower total degree first; within a degree the monomial
/// with the larger exponent at the first differing slot comes first, so two
/// variables enumerate as 1, x1, x2, x1^2, x1*x2, x2^2.
struct GradedLex {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const { return m.hash(); }
};

class Polynomial {
 public:
  using Terms = std::map<Monomial, double, GradedLex>;

  Polynomial() = default;
  explicit Polynomial(Universe universe) : universe_(universe) {}

  static Polynomial constant(Universe universe, double c);
  static Polynomial variable(Universe universe, int slot);
  static Polynomial term(Universe universe, const Monomial& mono, double c = 1.0);

  const Universe& universe() const { return universe_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const;
  double coeff(const Monomial& mono) const;
  double max_abs_coeff() const;
  /// True when every term has zero exponent outside slots [first, last).
  bool supported_in(int first, int last) const;

  /// Adds c to the coefficient of mono; a coefficient that becomes exactly
  /// zero is erased.
  void add_term(const Monomial& mono, double c);

  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);
  Polynomial& operator*=(double c);
  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(Polynomial p, double c) { return p *= c; }
  friend Polynomial operator*(double c, Polynomial p) { return p *= c; }
  Polynomial operator-() const { return *this * -1.0; }
  Polynomial pow(int k) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.universe_ == b.universe_ && a.terms_ == b.terms_;
  }

  double eval(std::span<const double> point) const;
  Polynomial derivative(int slot) const;
  /// Replaces slot i by images[i]; all images share one target universe.
  Polynomial substitute(std::span<const Polynomial> images) const;
  /// Re-indexes the polynomial into `target`; slot_map[i] is the target slot
  /// of source slot i (or -1 if the variable must not occur).
  Polynomial remap(Universe target, std::span<const int> slot_map) const;
  /// Drops terms with |coefficient| <= tol. Used only at I/O boundaries.
  Polynomial drop_small(double tol) const;

 private:
  Universe universe_;
  Terms terms_;
};

/// Symmetric m-by-m matrix of polynomials; only the upper triangle is
/// stored, entry(i, j) and entry(j, i) name the same object.
class MatrixPolynomial {
 public:
  MatrixPolynomial() = default;
  MatrixPolynomial(int size, Universe universe);

  int size() const { return size_; }
  const Universe& universe() const { return universe_; }
  const Polynomial& entry(int i, int j) const { return entries_[index(i, j)]; }
  void set(int i, int j, Polynomial p);
  /// Max total degree over entries, -1 if all entries vanish.
  int degree() const;

  Eigen::MatrixXd eval(std::span<const double> point) const;

  friend bool operator==(const MatrixPolynomial&, const MatrixPolynomial&) = default;

 private:
  std::size_t index(int i, int j) const;

  int size_ = 0;
  Universe universe_;
  std::vector<Polynomial> entries_;
};

/// All monomials over `slots` of total degree <= max_degree, graded-lex.
std::vector<Monomial> enum_monomials(std::span<const int> slots, int max_degree);
/// Convenience: the first `count` slots.
std::vector<Monomial> enum_monomials(int count, int max_degree);

/// Entrywise substitution, see Polynomial::substitute.
MatrixPolynomial substitute(const MatrixPolynomial& P, std::span<const Polynomial> images);

/// Determinant by cofactor expansion; meant for small sizes.
Polynomial determinant(const std::vector<std::vector<Polynomial>>& rows);

/// v^T P v as a polynomial in (x, u, v); requires universe().m == P.size().
Polynomial quad_form(const MatrixPolynomial& P);

/// Matrix of second derivatives with respect to the x slots.
MatrixPolynomial hessian(const Polynomial& g);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// Canonical text: graded-lex ascending terms, shortest round-trip
/// coefficients, e.g. "1 - 16*x1*x2".
std::string to_string(const Polynomial& p);

/// Parses sums and products of numbers, variables x<i>/u<i>/v<i>,
/// parentheses and non-negative integer powers. Throws ParseError.
Polynomial parse_polynomial(std::string_view text, Universe universe);

}  // namespace pmi

template <>
struct std::hash<pmi::Monomial> {
  std::size_t operator()(const pmi::Monomial& m) const { return m.hash(); }
};
