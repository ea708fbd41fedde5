#include <doctest.h>

#include <cmath>
#include <random>

#include "pmi/errors.hpp"
#include "pmi/polyalg.hpp"

using namespace pmi;

namespace {

Polynomial random_poly(Universe U, int max_deg, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  std::uniform_int_distribution<int> coin(0, 2);
  Polynomial p(U);
  for (const auto& m : enum_monomials(U.size(), max_deg))
    if (coin(rng) == 0) p.add_term(m, std::round(c(rng) * 8.0) / 8.0);  // dyadic keeps products exact
  return p;
}

std::vector<double> random_point(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(k));
  for (auto& v : x) v = d(rng);
  return x;
}

}  // namespace

TEST_CASE("monomial enumeration counts") {
  const auto one = enum_monomials(1, 2);
  REQUIRE(one.size() == 3);
  CHECK(one[0].degree() == 0);
  CHECK(one[1][0] == 1);
  CHECK(one[2][0] == 2);
  CHECK(enum_monomials(2, 2).size() == 6);
  CHECK(enum_monomials(3, 2).size() == 10);
  CHECK(enum_monomials(2, 4).size() == 15);
}

TEST_CASE("graded-lex order") {
  const auto ms = enum_monomials(2, 2);
  const Universe U{2, 0, 0};
  std::vector<std::string> names;
  for (const auto& m : ms) names.push_back(to_string(Polynomial::term(U, m)));
  CHECK(names == std::vector<std::string>{"1", "x1", "x2", "x1^2", "x1*x2", "x2^2"});
}

TEST_CASE("small products") {
  const Universe U{2, 0, 2};
  const auto x1 = Polynomial::variable(U, U.x(0));
  const auto x2 = Polynomial::variable(U, U.x(1));
  const auto one = Polynomial::constant(U, 1.0);
  CHECK((one + x1) * (one - x1) == one - x1 * x1);
  const auto sphere = one - Polynomial::variable(U, U.v(0)).pow(2) - Polynomial::variable(U, U.v(1)).pow(2);
  CHECK(sphere * one == sphere);
  const auto p = x1 * x2;
  CHECK(p.terms().size() == 1);
  CHECK(to_string(p) == "x1*x2");
}

TEST_CASE("evaluation") {
  const Universe U2{2, 0, 0};
  CHECK(parse_polynomial("1 - 16*x1*x2", U2).eval(std::vector<double>{0.25, 0.25}) == doctest::Approx(0.0));
  CHECK(parse_polynomial("1 - x1^2 - x2^2", U2).eval(std::vector<double>{0.6, 0.8}) == doctest::Approx(0.0));
  const Universe U3{3, 0, 0};
  CHECK(parse_polynomial("x3", U3).eval(std::vector<double>{0, 0, 1}) == 1.0);
}

TEST_CASE("ring axioms on random polynomials") {
  std::mt19937_64 rng(7);
  const Universe U{2, 1, 0};
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_poly(U, 4, rng), q = random_poly(U, 3, rng), r = random_poly(U, 2, rng);
    CHECK(p + q == q + p);
    CHECK(p * q == q * p);
    CHECK((p + q) + r == p + (q + r));
    CHECK((p * q) * r == p * (q * r));
    CHECK(p * (q + r) == p * q + p * r);
    CHECK((p - p).is_zero());
  }
}

TEST_CASE("evaluation is multiplicative") {
  std::mt19937_64 rng(11);
  const Universe U{3, 0, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_poly(U, 4, rng), q = random_poly(U, 4, rng);
    const auto x = random_point(3, rng);
    const double lhs = (p * q).eval(x), rhs = p.eval(x) * q.eval(x);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("matrix evaluation") {
  const Universe U{2, 0, 2};
  MatrixPolynomial P(2, U);
  P.set(0, 0, parse_polynomial("1 - 16*x1*x2", U));
  P.set(0, 1, parse_polynomial("x1", U));
  P.set(1, 1, parse_polynomial("1 - x1^2 - x2^2", U));
  const Eigen::MatrixXd at0 = P.eval(std::vector<double>{0, 0, 0, 0});
  CHECK(at0.isApprox(Eigen::MatrixXd::Identity(2, 2)));
  const Eigen::MatrixXd M = P.eval(std::vector<double>{0.25, 0.25, 0, 0});
  CHECK(M(0, 0) == doctest::Approx(0.0));
  CHECK(M(0, 1) == doctest::Approx(0.25));
  CHECK(M(1, 0) == doctest::Approx(0.25));
  CHECK(M(1, 1) == doctest::Approx(0.875));
}

TEST_CASE("quadratic forms") {
  const Universe U{0, 0, 2};
  MatrixPolynomial I(2, U);
  I.set(0, 0, Polynomial::constant(U, 1.0));
  I.set(1, 1, Polynomial::constant(U, 1.0));
  CHECK(quad_form(I) == parse_polynomial("v1^2 + v2^2", U));
  MatrixPolynomial J(2, U);
  J.set(0, 1, Polynomial::constant(U, 1.0));
  CHECK(quad_form(J) == parse_polynomial("2*v1*v2", U));

  const Universe W{2, 0, 2};
  MatrixPolynomial P(2, W);
  P.set(0, 0, parse_polynomial("1 - 16*x1*x2", W));
  P.set(0, 1, parse_polynomial("x1", W));
  P.set(1, 1, parse_polynomial("1 - x1^2 - x2^2", W));
  CHECK(quad_form(P) == parse_polynomial("v1^2 + v2^2 - 16*x1*x2*v1^2 + 2*x1*v1*v2 - (x1^2 + x2^2)*v2^2", W));
}

TEST_CASE("quadratic form agrees with v^T P v") {
  std::mt19937_64 rng(3);
  const Universe U{2, 1, 3};
  for (int trial = 0; trial < 20; ++trial) {
    MatrixPolynomial P(3, U);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        Polynomial e = random_poly(Universe{3, 0, 0}, 2, rng);
        const int map[] = {U.x(0), U.x(1), U.u(0)};
        P.set(i, j, e.remap(U, map));
      }
    const auto q = quad_form(P);
    const auto pt = random_point(U.size(), rng);
    const Eigen::MatrixXd M = P.eval(pt);
    const Eigen::Map<const Eigen::VectorXd> v(pt.data() + U.v(0), 3);
    const double direct = v.dot(M * v);
    CHECK(std::abs(q.eval(pt) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST_CASE("hessians") {
  const Universe U{2, 0, 0};
  const auto H1 = hessian(parse_polynomial("x1^2 + x2^2", U));
  CHECK(H1.eval(std::vector<double>{0.3, -0.2}).isApprox(2.0 * Eigen::MatrixXd::Identity(2, 2)));
  const Eigen::MatrixXd H2 = hessian(parse_polynomial("x1*x2", U)).eval(std::vector<double>{0.1, 0.7});
  CHECK(H2(0, 0) == 0.0);
  CHECK(H2(0, 1) == 1.0);
  CHECK(H2(1, 1) == 0.0);
  const Universe U1{1, 0, 0};
  const auto H3 = hessian(parse_polynomial("x1^3", U1));
  CHECK(H3.entry(0, 0) == parse_polynomial("6*x1", U1));
}

TEST_CASE("hessian matches central differences") {
  std::mt19937_64 rng(5);
  const Universe U{3, 0, 0};
  const double h = 1e-4;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_poly(U, 4, rng);
    const auto x = random_point(3, rng);
    const Eigen::MatrixXd H = hessian(g).eval(x);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        auto at = [&](double si, double sj) {
          auto y = x;
          y[static_cast<std::size_t>(i)] += si;
          y[static_cast<std::size_t>(j)] += sj;
          return g.eval(y);
        };
        const double fd = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
        CHECK(std::abs(fd - H(i, j)) <= 1e-6 * std::max(1.0, std::abs(H(i, j))));
      }
  }
}

TEST_CASE("parse and print round trip") {
  const Universe U{2, 1, 2};
  for (const char* s : {"1 - 16*x1*x2", "x1 + 0.5*u1^2 - 3*v1*v2", "0", "-x1^3*x2 + 1e-05"}) {
    const auto p = parse_polynomial(s, U);
    CHECK(parse_polynomial(to_string(p), U) == p);
  }
  CHECK(to_string(parse_polynomial("(x1 + 1)^2", U)) == "1 + 2*x1 + x1^2");
  CHECK_THROWS_AS(parse_polynomial("x3", U), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x1 +", U), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x1^-1", U), ParseError);
}

TEST_CASE("determinant and substitution") {
  const Universe U{2, 0, 0};
  const auto a = parse_polynomial("x1", U), b = parse_polynomial("x2", U);
  const auto one = Polynomial::constant(U, 1.0);
  CHECK(determinant({{a, b}, {b, a}}) == a * a - b * b);
  const Universe T{1, 0, 0};
  const std::vector<Polynomial> images = {parse_polynomial("2*x1", T), parse_polynomial("1 - x1", T)};
  CHECK(parse_polynomial("x1*x2 + 1", U).substitute(images) == parse_polynomial("2*x1 - 2*x1^2 + 1", T));
  CHECK(one.degree() == 0);
  CHECK(Polynomial(U).degree() == -1);
}
