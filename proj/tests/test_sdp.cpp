#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pmi/sdp.hpp"

using namespace pmi;

namespace {

// minimize x s.t. x - s = 1 with x, s 1x1 PSD blocks.
SdpProblem scalar_lower_bound() {
  SdpProblem P;
  P.psd_blocks = {{"x", 1}, {"s", 1}};
  P.rows.push_back({{{0, 0, 0, 1.0}, {1, 0, 0, -1.0}}, {}, 1.0});
  P.objective_psd = {{0, 0, 0, 1.0}};
  return P;
}

// minimize trace X s.t. X11 = 1, X22 = 2.
SdpProblem fixed_diagonal() {
  SdpProblem P;
  P.psd_blocks = {{"X", 2}};
  P.rows.push_back({{{0, 0, 0, 1.0}}, {}, 1.0});
  P.rows.push_back({{{0, 1, 1, 1.0}}, {}, 2.0});
  P.objective_psd = {{0, 0, 0, 1.0}, {0, 1, 1, 1.0}};
  return P;
}

// maximize t s.t. [[1, t], [t, 1]] PSD, with t free.
SdpProblem unit_correlation() {
  SdpProblem P;
  P.psd_blocks = {{"X", 2}};
  P.free_blocks = {{"t", 1}};
  P.rows.push_back({{{0, 0, 0, 1.0}}, {}, 1.0});
  P.rows.push_back({{{0, 1, 1, 1.0}}, {}, 1.0});
  P.rows.push_back({{{0, 0, 1, 0.5}}, {{0, 0, -1.0}}, 0.0});
  P.objective_free = {{0, 0, -1.0}};
  return P;
}

void check_optimal(const SdpSolution& s, double tol) {
  CHECK(s.status == SdpStatus::optimal);
  CHECK(s.residuals.primal <= tol);
  CHECK(s.residuals.dual <= tol);
  CHECK(s.residuals.gap <= tol);
  CHECK(s.iterations < 50);
}

}  // namespace

TEST_CASE("scalar lower bound solves to x = 1") {
  const auto s = solve(scalar_lower_bound());
  check_optimal(s, 1e-8);
  CHECK(s.X[0](0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("fixed diagonal gives trace 3 and a diagonal solution") {
  const auto s = solve(fixed_diagonal());
  check_optimal(s, 1e-8);
  CHECK(s.primal_objective == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(std::abs(s.X[0](0, 1)) < 1e-6);
}

TEST_CASE("correlation bound t = 1") {
  const auto s = solve(unit_correlation());
  check_optimal(s, 1e-8);
  // 1 - t^2 >= 0 is the determinant condition; the maximizer sits on it.
  CHECK(s.z[0](0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.primal_objective == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("minimum eigenvalue program") {
  // min <C, X> s.t. trace X = 1 equals lambda_min(C).
  SdpProblem P;
  P.psd_blocks = {{"X", 2}};
  P.rows.push_back({{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}, {}, 1.0});
  const double a = 0.3, b = 0.4, c = 0.9;
  P.objective_psd = {{0, 0, 0, a}, {0, 0, 1, b}, {0, 1, 1, c}};
  const auto s = solve(P);
  REQUIRE(s.status == SdpStatus::optimal);
  const double lmin = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  CHECK(s.primal_objective == doctest::Approx(lmin).epsilon(1e-7));
}

TEST_CASE("check_certificate") {
  const auto P = scalar_lower_bound();
  auto s = solve(P);
  auto rep = check_certificate(P, s);
  CHECK(rep.relative.primal <= 1e-8);
  CHECK(rep.relative.dual <= 1e-8);
  CHECK(rep.relative.gap <= 1e-8);

  s.X[0](0, 0) += 1e-2;
  rep = check_certificate(P, s);
  CHECK(rep.primal_abs >= 1e-3);

  SdpSolution zero;
  const auto F = fixed_diagonal();
  rep = check_certificate(F, zero);
  CHECK(rep.primal_abs == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("weak duality on logged iterates") {
  for (const auto& P : {scalar_lower_bound(), fixed_diagonal(), unit_correlation()}) {
    std::ostringstream log;
    SolverOptions o;
    o.verbosity = 1;
    o.log = &log;
    const auto s = solve(P, o);
    REQUIRE(s.status == SdpStatus::optimal);
    std::istringstream in(log.str());
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      double pobj = 0.0, dobj = 0.0;
      REQUIRE(std::sscanf(line.c_str(), "iter=%*d pobj=%lf dobj=%lf", &pobj, &dobj) == 2);
      CHECK(pobj >= dobj - o.tol);
      ++n;
    }
    CHECK(n == s.iterations);
  }
}

TEST_CASE("infeasible and unbounded statuses") {
  SdpProblem inf;
  inf.psd_blocks = {{"x", 1}};
  inf.rows.push_back({{{0, 0, 0, 1.0}}, {}, -1.0});
  inf.objective_psd = {{0, 0, 0, 1.0}};
  CHECK(solve(inf).status == SdpStatus::infeasible);

  SdpProblem unb;
  unb.psd_blocks = {{"x", 1}, {"s", 1}};
  unb.rows.push_back({{{0, 0, 0, 1.0}, {1, 0, 0, -1.0}}, {}, 0.0});
  unb.objective_psd = {{0, 0, 0, -1.0}};
  CHECK(solve(unb).status == SdpStatus::unbounded);
}

TEST_CASE("free blocks agree with nullspace elimination") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N01;
  using Eigen::MatrixXd;
  using Eigen::VectorXd;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3, nf = 2, m = 4;
    std::vector<MatrixXd> A(m);
    for (auto& Ai : A) {
      Ai = MatrixXd::NullaryExpr(n, n, [&] { return N01(rng); });
      Ai = 0.5 * (Ai + Ai.transpose());
    }
    MatrixXd F = MatrixXd::NullaryExpr(m, nf, [&] { return N01(rng); });
    MatrixXd R = MatrixXd::NullaryExpr(n, n, [&] { return N01(rng); });
    MatrixXd X0 = R * R.transpose() + MatrixXd::Identity(n, n);
    R = MatrixXd::NullaryExpr(n, n, [&] { return N01(rng); });
    MatrixXd S0 = R * R.transpose() + MatrixXd::Identity(n, n);
    VectorXd z0 = VectorXd::NullaryExpr(nf, [&] { return N01(rng); });
    VectorXd y0 = VectorXd::NullaryExpr(m, [&] { return N01(rng); });
    VectorXd b(m);
    MatrixXd C = S0;
    for (int i = 0; i < m; ++i) {
      b(i) = (A[i].array() * X0.array()).sum() + F.row(i).dot(z0);
      C += y0(i) * A[i];
    }
    VectorXd cf = F.transpose() * y0;

    auto psd_entries = [&](const MatrixXd& M) {
      std::vector<PsdEntry> out;
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.push_back({0, i, j, M(i, j)});
      return out;
    };

    SdpProblem full;
    full.psd_blocks = {{"X", n}};
    full.free_blocks = {{"z", nf}};
    for (int i = 0; i < m; ++i) {
      SdpRow r{psd_entries(A[i]), {}, b(i)};
      for (int j = 0; j < nf; ++j) r.free.push_back({0, j, F(i, j)});
      full.rows.push_back(r);
    }
    full.objective_psd = psd_entries(C);
    for (int j = 0; j < nf; ++j) full.objective_free.push_back({0, j, cf(j)});

    // Reduced: rows of N A(X) = N b with N F = 0; z = F^+ (b - A(X)).
    Eigen::JacobiSVD<MatrixXd> svd(F.transpose(), Eigen::ComputeFullV);
    const MatrixXd Nt = svd.matrixV().rightCols(m - nf).transpose();
    const MatrixXd Fp = (F.transpose() * F).inverse() * F.transpose();
    const VectorXd w = Fp.transpose() * cf;
    SdpProblem red;
    red.psd_blocks = {{"X", n}};
    for (int r = 0; r < m - nf; ++r) {
      MatrixXd Ar = MatrixXd::Zero(n, n);
      for (int i = 0; i < m; ++i) Ar += Nt(r, i) * A[i];
      red.rows.push_back({psd_entries(Ar), {}, Nt.row(r).dot(b)});
    }
    MatrixXd Cr = C;
    for (int i = 0; i < m; ++i) Cr -= w(i) * A[i];
    red.objective_psd = psd_entries(Cr);

    const auto sf = solve(full);
    const auto sr = solve(red);
    REQUIRE(sf.status == SdpStatus::optimal);
    REQUIRE(sr.status == SdpStatus::optimal);
    const double tol = 1e-8;
    CHECK(std::abs(sf.primal_objective - (sr.primal_objective + w.dot(b))) <=
          10 * tol * (1.0 + std::abs(sf.primal_objective)));
  }
}

TEST_CASE("solves are deterministic") {
  const auto P = unit_correlation();
  const auto a = solve(P), b = solve(P);
  CHECK(a.iterations == b.iterations);
  CHECK(a.primal_objective == b.primal_objective);
  CHECK(a.dual_objective == b.dual_objective);
}

TEST_CASE("export round trip") {
  const auto P = unit_correlation();
  std::stringstream ss;
  write_sdp(ss, P);
  const auto Q = read_sdp(ss);
  std::stringstream again;
  write_sdp(again, Q);
  std::stringstream first;
  write_sdp(first, P);
  CHECK(first.str() == again.str());
  CHECK(Q.rows.size() == 3);
  CHECK(Q.free_blocks.size() == 1);
}
