#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "pmi/errors.hpp"
#include "pmi/sdp.hpp"

namespace pmi {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Coef {
  int row;
  int k;
  int l;
  double a;       // SDPA-convention value
  double scaled;  // a * sqrt(2) off the diagonal, a / sqrt(2) on it
};

/// Per-block constraint data, entries grouped by row.
struct BlockData {
  int n = 0;
  std::vector<Coef> coefs;
  std::vector<int> rows;       // distinct rows touching the block
  std::vector<int> row_start;  // coefs[row_start[t] .. row_start[t+1]) belong to rows[t]
  MatrixXd C;
};

struct Data {
  int m = 0;
  int nf = 0;
  std::vector<BlockData> blocks;
  MatrixXd F;  // m x nf
  VectorXd b;
  VectorXd cf;
  double bnorm = 0.0;
  double cnorm = 0.0;
};

Data prepare(const SdpProblem& P) {
  P.validate();
  Data d;
  d.m = P.num_rows();
  std::vector<int> off;
  for (const auto& fb : P.free_blocks) {
    off.push_back(d.nf);
    d.nf += fb.size;
  }
  d.F = MatrixXd::Zero(d.m, d.nf);
  d.b = VectorXd::Zero(d.m);
  d.cf = VectorXd::Zero(d.nf);
  d.blocks.resize(P.psd_blocks.size());
  for (std::size_t k = 0; k < P.psd_blocks.size(); ++k) {
    d.blocks[k].n = P.psd_blocks[k].size;
    d.blocks[k].C = MatrixXd::Zero(d.blocks[k].n, d.blocks[k].n);
  }
  const double r2 = std::sqrt(2.0);
  for (int r = 0; r < d.m; ++r) {
    const auto& row = P.rows[static_cast<std::size_t>(r)];
    d.b(r) = row.rhs;
    for (const auto& e : row.psd) {
      if (e.value == 0.0) continue;
      auto& B = d.blocks[static_cast<std::size_t>(e.block)];
      B.coefs.push_back({r, e.i, e.j, e.value, e.i == e.j ? e.value / r2 : e.value * r2});
    }
    for (const auto& e : row.free) d.F(r, off[static_cast<std::size_t>(e.block)] + e.index) += e.value;
  }
  for (auto& B : d.blocks) {
    // Coefs were pushed in row order; merge duplicates of (row, k, l).
    std::stable_sort(B.coefs.begin(), B.coefs.end(), [](const Coef& x, const Coef& y) {
      return std::tie(x.row, x.k, x.l) < std::tie(y.row, y.k, y.l);
    });
    std::vector<Coef> merged;
    for (const auto& c : B.coefs) {
      if (!merged.empty() && merged.back().row == c.row && merged.back().k == c.k && merged.back().l == c.l) {
        merged.back().a += c.a;
        merged.back().scaled += c.scaled;
      } else {
        merged.push_back(c);
      }
    }
    B.coefs = std::move(merged);
    for (std::size_t t = 0; t < B.coefs.size(); ++t) {
      if (t == 0 || B.coefs[t].row != B.coefs[t - 1].row) {
        B.rows.push_back(B.coefs[t].row);
        B.row_start.push_back(static_cast<int>(t));
      }
    }
    B.row_start.push_back(static_cast<int>(B.coefs.size()));
  }
  for (const auto& e : P.objective_psd) {
    auto& C = d.blocks[static_cast<std::size_t>(e.block)].C;
    C(e.i, e.j) += e.value;
    if (e.i != e.j) C(e.j, e.i) += e.value;
  }
  for (const auto& e : P.objective_free) d.cf(off[static_cast<std::size_t>(e.block)] + e.index) += e.value;
  d.bnorm = d.b.norm();
  double c2 = d.cf.squaredNorm();
  for (const auto& B : d.blocks) c2 += B.C.squaredNorm();
  d.cnorm = std::sqrt(c2);
  return d;
}

/// y += A_b(Z)
void apply_A(const BlockData& B, const MatrixXd& Z, VectorXd& y) {
  for (const auto& c : B.coefs) y(c.row) += c.a * (c.k == c.l ? Z(c.k, c.k) : Z(c.k, c.l) + Z(c.l, c.k));
}

/// A_b^T(y)
MatrixXd apply_At(const BlockData& B, const VectorXd& y) {
  MatrixXd T = MatrixXd::Zero(B.n, B.n);
  for (const auto& c : B.coefs) {
    T(c.k, c.l) += c.a * y(c.row);
    if (c.k != c.l) T(c.l, c.k) += c.a * y(c.row);
  }
  return T;
}

/// Upper triangle of a symmetric matrix, off-diagonal entries times sqrt(2).
void svec(const MatrixXd& T, int off, VectorXd& out) {
  const double r2 = std::sqrt(2.0);
  const int n = static_cast<int>(T.rows());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) out(off++) = r2 * 0.5 * (T(i, j) + T(j, i));
    out(off++) = T(j, j);
  }
}

MatrixXd unsvec(const VectorXd& v, int off, int n) {
  const double r2 = std::sqrt(2.0);
  MatrixXd T(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) T(i, j) = T(j, i) = v(off++) / r2;
    T(j, j) = v(off++);
  }
  return T;
}

/// Columns svec(G^T A_i G) for the rows touching the block.
void add_scaled_columns(const BlockData& B, const MatrixXd& G, int off, MatrixXd& out) {
  const int n = B.n;
  MatrixXd T(n, n);
  VectorXd col(out.rows());
  for (std::size_t s = 0; s < B.rows.size(); ++s) {
    T.setZero();
    for (int u = B.row_start[s]; u < B.row_start[s + 1]; ++u) {
      const Coef& c = B.coefs[static_cast<std::size_t>(u)];
      if (c.k == c.l) {
        T.noalias() += c.a * G.row(c.k).transpose() * G.row(c.k);
      } else {
        T.noalias() += c.a * G.row(c.k).transpose() * G.row(c.l);
        T.noalias() += c.a * G.row(c.l).transpose() * G.row(c.k);
      }
    }
    const double r2 = std::sqrt(2.0);
    int o = off;
    auto dst = out.col(B.rows[s]);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < j; ++i) dst(o++) = r2 * T(i, j);
      dst(o++) = T(j, j);
    }
  }
}

/// Largest alpha with X + alpha dX PSD, given X = L L^T; infinity if unbounded.
double max_step(const MatrixXd& L, const MatrixXd& dX) {
  if (L.rows() == 0) return std::numeric_limits<double>::infinity();
  const auto tri = L.triangularView<Eigen::Lower>();
  MatrixXd T = tri.solve(dX);
  T = tri.solve(T.transpose()).transpose();
  T = 0.5 * (T + T.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(T, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

struct Scaling {
  MatrixXd L;     // chol(X)
  MatrixXd LS;    // chol(S)
  MatrixXd G;     // W = G G^T
  MatrixXd Ginv;
  MatrixXd W;
  VectorXd d;     // G^{-1} X G^{-T} = G^T S G = diag(d)
};

bool nt_scaling(const MatrixXd& X, const MatrixXd& S, Scaling& sc) {
  const int n = static_cast<int>(X.rows());
  Eigen::LLT<MatrixXd> lx(X), ls(S);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
  sc.L = lx.matrixL();
  sc.LS = ls.matrixL();
  // L^T S L = V diag(lambda) V^T with lambda = d^2.
  MatrixXd R = sc.LS.transpose() * sc.L;  // R^T R = L^T S L
  MatrixXd K = R.transpose() * R;
  K = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(K);
  if (es.info() != Eigen::Success) return false;
  VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() <= 0.0) return false;
  sc.d = lam.array().sqrt();
  const MatrixXd& V = es.eigenvectors();
  VectorXd dm12 = sc.d.array().rsqrt();
  sc.G = sc.L * V * dm12.asDiagonal();
  // G^{-1} = D^{1/2} V^T L^{-1}
  MatrixXd Linv = sc.L.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(n, n));
  sc.Ginv = sc.d.array().sqrt().matrix().asDiagonal() * V.transpose() * Linv;
  sc.W = sc.G * sc.G.transpose();
  sc.W = 0.5 * (sc.W + sc.W.transpose());
  return true;
}

double inner(const MatrixXd& A, const MatrixXd& B) { return (A.array() * B.array()).sum(); }

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& opt) {
  const Data D = prepare(problem);
  const std::size_t nb = D.blocks.size();
  const int m = D.m, nf = D.nf;
  std::ostream* log = opt.verbosity > 0 ? (opt.log ? opt.log : &std::clog) : nullptr;

  SdpSolution sol;
  sol.X.resize(nb);
  sol.S.resize(nb);

  // Starting point, scaled to the data as in common infeasible-start codes.
  int total_n = 0;
  for (std::size_t k = 0; k < nb; ++k) {
    const BlockData& B = D.blocks[k];
    total_n += B.n;
    std::vector<double> rownorm(static_cast<std::size_t>(m), 0.0);
    for (const auto& c : B.coefs) rownorm[static_cast<std::size_t>(c.row)] += (c.k == c.l ? 1.0 : 2.0) * c.a * c.a;
    double xi = std::max(10.0, std::sqrt(static_cast<double>(B.n)));
    double amax = 0.0;
    for (int r : B.rows) {
      const double an = std::sqrt(rownorm[static_cast<std::size_t>(r)]);
      amax = std::max(amax, an);
      xi = std::max(xi, B.n * (1.0 + std::abs(D.b(r))) / (1.0 + an));
    }
    const double eta = std::max({10.0, std::sqrt(static_cast<double>(B.n)),
                                 (1.0 + std::max(amax, B.C.norm())) / std::sqrt(static_cast<double>(std::max(B.n, 1)))});
    sol.X[k] = xi * MatrixXd::Identity(B.n, B.n);
    sol.S[k] = eta * MatrixXd::Identity(B.n, B.n);
  }
  VectorXd y = VectorXd::Zero(m);
  VectorXd z = VectorXd::Zero(nf);

  if (total_n == 0 && m > 0 && nf == 0) throw DimensionError("SDP has constraints but no variables");

  std::vector<int> svec_off(nb);
  int svec_total = 0;
  for (std::size_t k = 0; k < nb; ++k) {
    svec_off[k] = svec_total;
    svec_total += D.blocks[k].n * (D.blocks[k].n + 1) / 2;
  }
  // Free columns: F = QF [RF; 0].
  Eigen::HouseholderQR<MatrixXd> fqr;
  MatrixXd fRm;
  if (nf > 0) {
    if (nf > m) throw DimensionError("SDP has more free variables than equality rows");
    fqr.compute(D.F);
    fRm = fqr.matrixQR().topRows(nf).triangularView<Eigen::Upper>();
    // Linearly dependent free columns: regularize the tiny pivots.
    const double floor = 1e-12 * std::max(1.0, fRm.diagonal().cwiseAbs().maxCoeff());
    for (int i = 0; i < nf; ++i)
      if (!(std::abs(fRm(i, i)) > floor))
        fRm(i, i) = fRm(i, i) < 0 ? -std::sqrt(opt.free_regularization) : std::sqrt(opt.free_regularization);
  }
  const MatrixXd& fRc = fRm;
  const auto fR = fRc.triangularView<Eigen::Upper>();
  std::vector<Scaling> sc(nb);
  std::vector<MatrixXd> Rd(nb), dXa(nb), dSa(nb), dX(nb), dS(nb), Rc(nb);
  int small_steps = 0;
  SdpStatus status = SdpStatus::max_iter;
  int iter = 0;

  auto objectives = [&](double& pobj, double& dobj) {
    pobj = D.cf.dot(z);
    for (std::size_t k = 0; k < nb; ++k) pobj += inner(D.blocks[k].C, sol.X[k]);
    dobj = D.b.dot(y);
  };

  for (;; ++iter) {
    // Residuals.
    VectorXd rp = D.b - D.F * z;
    for (std::size_t k = 0; k < nb; ++k) {
      VectorXd ax = VectorXd::Zero(m);
      apply_A(D.blocks[k], sol.X[k], ax);
      rp -= ax;
    }
    double rd2 = 0.0;
    std::vector<MatrixXd> Aty(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      Aty[k] = apply_At(D.blocks[k], y);
      Rd[k] = D.blocks[k].C - Aty[k] - sol.S[k];
      rd2 += Rd[k].squaredNorm();
    }
    const VectorXd rf = D.cf - D.F.transpose() * y;
    rd2 += rf.squaredNorm();
    double pobj = 0.0, dobj = 0.0;
    objectives(pobj, dobj);
    double xs = 0.0;
    for (std::size_t k = 0; k < nb; ++k) xs += inner(sol.X[k], sol.S[k]);
    const double mu = total_n > 0 ? xs / total_n : 0.0;

    sol.residuals.primal = rp.norm() / (1.0 + D.bnorm);
    sol.residuals.dual = std::sqrt(rd2) / (1.0 + D.cnorm);
    sol.residuals.gap = std::max(std::abs(pobj - dobj), xs) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.iterations = iter;

    if (!std::isfinite(pobj) || !std::isfinite(dobj) || !std::isfinite(sol.residuals.primal) ||
        !std::isfinite(sol.residuals.dual)) {
      status = SdpStatus::numerical_failure;
      break;
    }
    if (sol.residuals.primal <= opt.tol && sol.residuals.dual <= opt.tol && sol.residuals.gap <= opt.tol) {
      status = SdpStatus::optimal;
      break;
    }

    // Infeasibility certificates: b^T y grows while A^T y + S stays bounded
    // (primal infeasible), or -<C, X> grows while A(X) stays bounded (dual
    // infeasible, primal unbounded).
    {
      double aty_s = (D.F.transpose() * y).squaredNorm();
      for (std::size_t k = 0; k < nb; ++k) aty_s += (Aty[k] + sol.S[k]).squaredNorm();
      const double ratio_p = dobj / (1.0 + std::sqrt(aty_s));
      const double ratio_d = -pobj / (1.0 + (D.b - rp).norm());
      if (ratio_p > opt.infeasibility_ratio * (1.0 + D.cnorm)) {
        status = SdpStatus::infeasible;
        break;
      }
      if (ratio_d > opt.infeasibility_ratio * (1.0 + D.bnorm)) {
        status = SdpStatus::unbounded;
        break;
      }
    }
    if (iter >= opt.max_iter) {
      status = SdpStatus::max_iter;
      break;
    }

    // Scaling and Schur complement.
    bool ok = true;
    for (std::size_t k = 0; k < nb && ok; ++k) ok = nt_scaling(sol.X[k], sol.S[k], sc[k]);
    if (!ok) {
      status = SdpStatus::numerical_failure;
      break;
    }
    // Scaled constraint matrix B: column i is svec(G^T A_i G) over all
    // blocks, so the Schur complement is B^T B. Working with a QR factor of
    // B instead of a Cholesky factor of B^T B keeps late iterations accurate.
    // With free variables, dy = QF [a; w] where F = QF [RF; 0]: a is fixed by
    // F^T dy = rf and w lives in the null space of F^T, so only B QF is
    // factored.
    MatrixXd Bm = MatrixXd::Zero(svec_total, m);
    for (std::size_t k = 0; k < nb; ++k) add_scaled_columns(D.blocks[k], sc[k].G, svec_off[k], Bm);
    if (nf > 0) Bm.applyOnTheRight(fqr.householderQ());
    const int mc = m - nf;
    Eigen::HouseholderQR<MatrixXd> qr;
    {
      bool ridge = svec_total < mc;
      double rmax = 0.0;
      if (mc > 0 && !ridge) {
        qr.compute(Bm.rightCols(mc));
        const VectorXd rdiag = qr.matrixQR().diagonal().cwiseAbs();
        rmax = rdiag.maxCoeff();
        ridge = !(rdiag.minCoeff() > 1e-13 * rmax);
      } else if (ridge) {
        rmax = Bm.rightCols(mc).colwise().norm().maxCoeff();
      }
      if (mc > 0 && ridge) {
        // Rank-deficient rows (e.g. rows without PSD entries): refactor with
        // a small ridge appended below.
        const double tau = 1e-10 * std::max(rmax, 1.0);
        MatrixXd Ba(svec_total + mc, mc);
        Ba.topRows(svec_total) = Bm.rightCols(mc);
        Ba.bottomRows(mc) = tau * MatrixXd::Identity(mc, mc);
        qr.compute(Ba);
      } else if (mc == 0) {
        qr.compute(MatrixXd::Zero(svec_total, 0));
      }
    }
    const int qrows = std::max<int>(static_cast<int>(qr.matrixQR().rows()), svec_total);
    const auto Rt = qr.matrixQR().topRows(mc).triangularView<Eigen::Upper>();
    VectorXd dy(m), dz(nf);
    // rc is the complementarity right-hand side in the scaled space.
    auto direction = [&](const std::vector<MatrixXd>& rc, std::vector<MatrixXd>& ox, std::vector<MatrixXd>& os) {
      VectorXd p = VectorXd::Zero(qrows);
      for (std::size_t k = 0; k < nb; ++k) {
        const MatrixXd T = rc[k] - sc[k].G.transpose() * Rd[k] * sc[k].G;
        svec(T, svec_off[k], p);
      }
      VectorXd rq = rp;
      VectorXd a(nf);
      if (nf > 0) {
        a = fR.transpose().solve(rf);
        p.head(svec_total) += Bm.leftCols(nf) * a;
        rq.applyOnTheLeft(fqr.householderQ().adjoint());
      }
      // Null-space part: R w = t - Q^T p, and the scaled primal step is
      // p + Q R w.
      VectorXd dxs(svec_total);
      VectorXd w(mc);
      if (mc > 0) {
        VectorXd q = qr.householderQ().adjoint() * p;
        const VectorXd t = Rt.transpose().solve(VectorXd(rq.tail(mc)));
        w = Rt.solve(VectorXd(t - q.head(mc)));
        q.head(mc) = t;
        dxs = (qr.householderQ() * q).head(svec_total);
      } else {
        dxs = p.head(svec_total);
      }
      if (nf > 0) {
        dz = fR.solve(VectorXd(rq.head(nf) - Bm.leftCols(nf).transpose() * dxs));
        dy << a, w;
        dy.applyOnTheLeft(fqr.householderQ());
      } else {
        dy = w;
      }
      for (std::size_t k = 0; k < nb; ++k) {
        const MatrixXd T = unsvec(dxs, svec_off[k], D.blocks[k].n);
        ox[k] = sc[k].G * T * sc[k].G.transpose();
        ox[k] = 0.5 * (ox[k] + ox[k].transpose());
        os[k] = Rd[k] - apply_At(D.blocks[k], dy);
        os[k] = 0.5 * (os[k] + os[k].transpose());
      }
    };
    auto steps = [&](const std::vector<MatrixXd>& ox, const std::vector<MatrixXd>& os, double& ap, double& ad) {
      ap = ad = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < nb; ++k) {
        ap = std::min(ap, max_step(sc[k].L, ox[k]));
        ad = std::min(ad, max_step(sc[k].LS, os[k]));
      }
    };

    // Predictor.
    for (std::size_t k = 0; k < nb; ++k) Rc[k] = MatrixXd((-sc[k].d).asDiagonal());
    direction(Rc, dXa, dSa);
    double ap = 0.0, ad = 0.0;
    steps(dXa, dSa, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double sigma = 0.0;
    if (total_n > 0) {
      double xs_aff = 0.0;
      for (std::size_t k = 0; k < nb; ++k) xs_aff += inner(sol.X[k] + ap * dXa[k], sol.S[k] + ad * dSa[k]);
      sigma = std::clamp(std::pow(std::max(xs_aff, 0.0) / total_n / mu, 3.0), 0.0, 1.0);
    }

    // Corrector in the scaled space.
    for (std::size_t k = 0; k < nb; ++k) {
      const Scaling& s = sc[k];
      const MatrixXd tx = s.Ginv * dXa[k] * s.Ginv.transpose();
      const MatrixXd ts = s.G.transpose() * dSa[k] * s.G;
      MatrixXd R = -0.5 * (tx * ts + ts * tx);
      R.diagonal().array() += sigma * mu;
      R.diagonal() -= s.d.cwiseProduct(s.d);
      const int n = D.blocks[k].n;
      MatrixXd Y(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Y(i, j) = 2.0 * R(i, j) / (s.d(i) + s.d(j));
      Rc[k] = 0.5 * (Y + Y.transpose());
    }
    direction(Rc, dX, dS);
    steps(dX, dS, ap, ad);
    ap = std::min(1.0, opt.step_fraction * ap);
    ad = std::min(1.0, opt.step_fraction * ad);
    if (nb == 0) ap = ad = 1.0;

    if (log)
      *log << "iter=" << iter << " pobj=" << pobj << " dobj=" << dobj << " gap=" << sol.residuals.gap
           << " pres=" << sol.residuals.primal << " dres=" << sol.residuals.dual << " mu=" << mu
           << " sigma=" << sigma << " ap=" << ap << " ad=" << ad << '\n';

    for (std::size_t k = 0; k < nb; ++k) {
      sol.X[k] += ap * dX[k];
      sol.S[k] += ad * dS[k];
      sol.X[k] = 0.5 * (sol.X[k] + sol.X[k].transpose());
      sol.S[k] = 0.5 * (sol.S[k] + sol.S[k].transpose());
    }
    z += ap * dz;
    y += ad * dy;

    if (std::max(ap, ad) < 1e-10) {
      if (++small_steps >= 5) {
        status = SdpStatus::numerical_failure;
        ++iter;
        break;
      }
    } else {
      small_steps = 0;
    }
  }

  sol.status = status;
  sol.iterations = iter;
  sol.y = y;
  sol.z.clear();
  int off = 0;
  for (const auto& fb : problem.free_blocks) {
    sol.z.push_back(z.segment(off, fb.size));
    off += fb.size;
  }
  return sol;
}

}  // namespace pmi
