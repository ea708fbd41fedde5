#include "pmi/polyalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "pmi/errors.hpp"

namespace pmi {

std::string Universe::slot_name(int slot) const {
  if (is_x(slot)) return "x" + std::to_string(slot + 1);
  if (is_u(slot)) return "u" + std::to_string(slot - n + 1);
  if (is_v(slot)) return "v" + std::to_string(slot - n - p + 1);
  throw DimensionError("slot " + std::to_string(slot) + " outside universe");
}

// ---------------------------------------------------------------- Monomial

Monomial Monomial::variable(int slot, int power) {
  Monomial m;
  m.set(slot, power);
  return m;
}

Monomial Monomial::from_exponents(std::span<const int> exponents) {
  if (exponents.size() > static_cast<std::size_t>(kMaxVars))
    throw DimensionError("too many variables for a monomial");
  Monomial m;
  for (std::size_t i = 0; i < exponents.size(); ++i) m.set(static_cast<int>(i), exponents[i]);
  return m;
}

void Monomial::set(int slot, int exponent) {
  if (slot < 0 || slot >= kMaxVars) throw DimensionError("monomial slot out of range");
  if (exponent < 0 || exponent > 255) throw DimensionError("monomial exponent out of range");
  auto& e = exps_[static_cast<std::size_t>(slot)];
  degree_ = static_cast<std::uint16_t>(degree_ - e + exponent);
  e = static_cast<std::uint8_t>(exponent);
}

int Monomial::degree_in(int first, int last) const {
  int d = 0;
  for (int i = first; i < last; ++i) d += exps_[static_cast<std::size_t>(i)];
  return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial r;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    const int e = exps_[i] + other.exps_[i];
    if (e > 255) throw DimensionError("monomial exponent overflow");
    r.exps_[i] = static_cast<std::uint8_t>(e);
  }
  r.degree_ = static_cast<std::uint16_t>(degree_ + other.degree_);
  return r;
}

std::size_t Monomial::hash() const {
  // FNV-1a over the exponent bytes.
  std::size_t h = 1469598103934665603ull;
  for (auto e : exps_) {
    h ^= e;
    h *= 1099511628211ull;
  }
  return h;
}

bool GradedLex::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = 0; i < kMaxVars; ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

// -------------------------------------------------------------- Polynomial

Polynomial Polynomial::constant(Universe universe, double c) {
  return term(universe, Monomial{}, c);
}

Polynomial Polynomial::variable(Universe universe, int slot) {
  if (slot < 0 || slot >= universe.size()) throw DimensionError("variable slot outside universe");
  return term(universe, Monomial::variable(slot), 1.0);
}

Polynomial Polynomial::term(Universe universe, const Monomial& mono, double c) {
  Polynomial p(universe);
  p.add_term(mono, c);
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  return terms_.rbegin()->first.degree();
}

double Polynomial::coeff(const Monomial& mono) const {
  auto it = terms_.find(mono);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coeff() const {
  double r = 0.0;
  for (const auto& [m, c] : terms_) r = std::max(r, std::abs(c));
  return r;
}

bool Polynomial::supported_in(int first, int last) const {
  for (const auto& [m, c] : terms_)
    if (m.degree_in(first, last) != m.degree()) return false;
  return true;
}

void Polynomial::add_term(const Monomial& mono, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(mono, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  if (!(universe_ == q.universe_)) throw DimensionError("polynomial universes differ");
  for (const auto& [m, c] : q.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  if (!(universe_ == q.universe_)) throw DimensionError("polynomial universes differ");
  for (const auto& [m, c] : q.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (it->second == 0.0)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (!(p.universe_ == q.universe_)) throw DimensionError("polynomial universes differ");
  Polynomial r(p.universe_);
  for (const auto& [a, ca] : p.terms_)
    for (const auto& [b, cb] : q.terms_) r.add_term(a * b, ca * cb);
  return r;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw DimensionError("negative polynomial power");
  Polynomial r = constant(universe_, 1.0);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return r;
}

double Polynomial::eval(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(universe_.size()))
    throw DimensionError("evaluation point does not match universe");
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (int i = 0; i < universe_.size(); ++i) {
      const int e = m[i];
      if (e == 0) continue;
      const double xi = point[static_cast<std::size_t>(i)];
      double f = xi;
      for (int k = 1; k < e; ++k) f *= xi;
      t *= f;
    }
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::derivative(int slot) const {
  Polynomial r(universe_);
  for (const auto& [m, c] : terms_) {
    const int e = m[slot];
    if (e == 0) continue;
    Monomial d = m;
    d.set(slot, e - 1);
    r.add_term(d, c * e);
  }
  return r;
}

Polynomial Polynomial::substitute(std::span<const Polynomial> images) const {
  if (images.size() != static_cast<std::size_t>(universe_.size()))
    throw DimensionError("substitution needs one image per variable");
  if (images.empty()) return *this;
  const Universe target = images.front().universe();
  for (const auto& img : images)
    if (!(img.universe() == target)) throw DimensionError("substitution images differ in universe");

  // Cache powers of each image; exponents are small.
  std::vector<std::vector<Polynomial>> powers(images.size());
  auto power_of = [&](std::size_t slot, int e) -> const Polynomial& {
    auto& cache = powers[slot];
    if (cache.empty()) cache.push_back(constant(target, 1.0));
    while (static_cast<int>(cache.size()) <= e) cache.push_back(cache.back() * images[slot]);
    return cache[static_cast<std::size_t>(e)];
  };

  Polynomial r(target);
  for (const auto& [m, c] : terms_) {
    Polynomial t = constant(target, c);
    for (int i = 0; i < universe_.size(); ++i)
      if (m[i] > 0) t = t * power_of(static_cast<std::size_t>(i), m[i]);
    r += t;
  }
  return r;
}

Polynomial Polynomial::remap(Universe target, std::span<const int> slot_map) const {
  if (slot_map.size() != static_cast<std::size_t>(universe_.size()))
    throw DimensionError("remap needs one entry per source slot");
  Polynomial r(target);
  for (const auto& [m, c] : terms_) {
    Monomial t;
    for (int i = 0; i < universe_.size(); ++i) {
      if (m[i] == 0) continue;
      const int dst = slot_map[static_cast<std::size_t>(i)];
      if (dst < 0 || dst >= target.size())
        throw DimensionError("variable " + universe_.slot_name(i) + " has no image in target universe");
      t.set(dst, t[dst] + m[i]);
    }
    r.add_term(t, c);
  }
  return r;
}

Polynomial Polynomial::drop_small(double tol) const {
  Polynomial r(universe_);
  for (const auto& [m, c] : terms_)
    if (std::abs(c) > tol) r.terms_.emplace_hint(r.terms_.end(), m, c);
  return r;
}

// -------------------------------------------------------- MatrixPolynomial

MatrixPolynomial::MatrixPolynomial(int size, Universe universe)
    : size_(size),
      universe_(universe),
      entries_(static_cast<std::size_t>(size * (size + 1) / 2), Polynomial(universe)) {}

std::size_t MatrixPolynomial::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= size_ || j >= size_) throw DimensionError("matrix index out of range");
  if (i > j) std::swap(i, j);
  // Row-major upper triangle.
  return static_cast<std::size_t>(i * size_ - i * (i - 1) / 2 + (j - i));
}

void MatrixPolynomial::set(int i, int j, Polynomial p) {
  if (!(p.universe() == universe_)) throw DimensionError("matrix entry universe differs");
  entries_[index(i, j)] = std::move(p);
}

int MatrixPolynomial::degree() const {
  int d = -1;
  for (const auto& e : entries_) d = std::max(d, e.degree());
  return d;
}

Eigen::MatrixXd MatrixPolynomial::eval(std::span<const double> point) const {
  Eigen::MatrixXd M(size_, size_);
  for (int i = 0; i < size_; ++i)
    for (int j = i; j < size_; ++j) {
      const double v = entry(i, j).eval(point);
      M(i, j) = v;
      M(j, i) = v;
    }
  return M;
}

// ---------------------------------------------------------------- helpers

std::vector<Monomial> enum_monomials(std::span<const int> slots, int max_degree) {
  std::vector<Monomial> out;
  if (max_degree < 0) return out;
  Monomial cur;
  // Depth-first over slots, distributing the remaining degree budget.
  std::function<void(std::size_t, int)> rec = [&](std::size_t k, int budget) {
    if (k == slots.size()) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      cur.set(slots[k], e);
      rec(k + 1, budget - e);
    }
    cur.set(slots[k], 0);
  };
  rec(0, max_degree);
  std::sort(out.begin(), out.end(), GradedLex{});
  return out;
}

std::vector<Monomial> enum_monomials(int count, int max_degree) {
  std::vector<int> slots(static_cast<std::size_t>(count));
  std::iota(slots.begin(), slots.end(), 0);
  return enum_monomials(slots, max_degree);
}

MatrixPolynomial substitute(const MatrixPolynomial& P, std::span<const Polynomial> images) {
  if (images.empty()) throw DimensionError("substitution needs images");
  MatrixPolynomial R(P.size(), images.front().universe());
  for (int i = 0; i < P.size(); ++i)
    for (int j = i; j < P.size(); ++j) R.set(i, j, P.entry(i, j).substitute(images));
  return R;
}

Polynomial determinant(const std::vector<std::vector<Polynomial>>& rows) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw DimensionError("determinant of an empty matrix");
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != n) throw DimensionError("determinant needs a square matrix");
  if (n > 20) throw DimensionError("determinant size too large for cofactor expansion");
  const Universe U = rows[0][0].universe();
  // Expansion along successive rows; minors keyed by the set of used columns.
  std::map<std::uint32_t, Polynomial> memo;
  std::function<Polynomial(int, std::uint32_t)> minor = [&](int row, std::uint32_t used) -> Polynomial {
    if (row == n) return Polynomial::constant(U, 1.0);
    if (auto it = memo.find(used); it != memo.end()) return it->second;
    Polynomial acc(U);
    int sign_pos = 0;
    for (int c = 0; c < n; ++c) {
      if (used & (1u << c)) continue;
      const Polynomial& a = rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)];
      if (!a.is_zero()) {
        Polynomial t = a * minor(row + 1, used | (1u << c));
        if (sign_pos % 2 == 1) t = -t;
        acc += t;
      }
      ++sign_pos;
    }
    memo.emplace(used, acc);
    return acc;
  };
  return minor(0, 0);
}

Polynomial quad_form(const MatrixPolynomial& P) {
  const Universe& U = P.universe();
  if (U.m != P.size()) throw DimensionError("quad_form needs one v slot per matrix row");
  Polynomial q(U);
  for (int i = 0; i < P.size(); ++i)
    for (int j = i; j < P.size(); ++j) {
      const Polynomial& e = P.entry(i, j);
      if (e.is_zero()) continue;
      Monomial vv = Monomial::variable(U.v(i)) * Monomial::variable(U.v(j));
      q += e * Polynomial::term(U, vv, i == j ? 1.0 : 2.0);
    }
  return q;
}

MatrixPolynomial hessian(const Polynomial& g) {
  const Universe& U = g.universe();
  if (!g.supported_in(0, U.n)) throw DimensionError("hessian expects a polynomial in x only");
  MatrixPolynomial H(U.n, U);
  for (int i = 0; i < U.n; ++i) {
    Polynomial gi = g.derivative(U.x(i));
    for (int j = i; j < U.n; ++j) H.set(i, j, gi.derivative(U.x(j)));
  }
  return H;
}

// ------------------------------------------------------------- text I/O

std::string format_double(double c) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, c);
  return std::string(buf, res.ptr);
}

namespace {

std::string monomial_text(const Universe& U, const Monomial& m) {
  std::string s;
  for (int i = 0; i < U.size(); ++i) {
    if (m[i] == 0) continue;
    if (!s.empty()) s += '*';
    s += U.slot_name(i);
    if (m[i] > 1) s += '^' + std::to_string(m[i]);
  }
  return s;
}

class Parser {
 public:
  Parser(std::string_view text, Universe universe) : text_(text), U_(universe) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in \"" + std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial r(U_);
    bool first = true;
    while (true) {
      double sign = 1.0;
      if (eat('+')) {
      } else if (eat('-')) {
        sign = -1.0;
      } else if (!first) {
        break;
      }
      Polynomial t = term();
      if (sign < 0) t = -t;
      r += t;
      first = false;
    }
    return r;
  }

  Polynomial term() {
    Polynomial r = factor();
    while (eat('*')) r = r * factor();
    return r;
  }

  Polynomial factor() {
    Polynomial base = primary();
    if (eat('^')) {
      skip_ws();
      int e = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), e);
      if (ec != std::errc{} || e < 0) fail("expected non-negative integer exponent");
      pos_ = static_cast<std::size_t>(ptr - text_.data());
      base = base.pow(e);
    }
    return base;
  }

  Polynomial primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of polynomial");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial r = expr();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    if (c == 'x' || c == 'u' || c == 'v') {
      ++pos_;
      int idx = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), idx);
      if (ec != std::errc{}) fail("expected variable index");
      pos_ = static_cast<std::size_t>(ptr - text_.data());
      const int count = c == 'x' ? U_.n : (c == 'u' ? U_.p : U_.m);
      if (idx < 1 || idx > count) fail(std::string("variable ") + c + std::to_string(idx) + " not in universe");
      const int slot = c == 'x' ? U_.x(idx - 1) : (c == 'u' ? U_.u(idx - 1) : U_.v(idx - 1));
      return Polynomial::variable(U_, slot);
    }
    if ((c >= '0' && c <= '9') || c == '.') {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
      if (ec != std::errc{}) fail("malformed number");
      pos_ = static_cast<std::size_t>(ptr - text_.data());
      return Polynomial::constant(U_, value);
    }
    fail("unexpected character");
  }

  std::string_view text_;
  Universe U_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const double mag = std::abs(c);
    if (first) {
      if (c < 0) s += '-';
    } else {
      s += c < 0 ? " - " : " + ";
    }
    const std::string mono = monomial_text(p.universe(), m);
    if (mono.empty()) {
      s += format_double(mag);
    } else if (mag == 1.0) {
      s += mono;
    } else {
      s += format_double(mag) + '*' + mono;
    }
    first = false;
  }
  return s;
}

Polynomial parse_polynomial(std::string_view text, Universe universe) {
  return Parser(text, universe).parse();
}

}  // namespace pmi
