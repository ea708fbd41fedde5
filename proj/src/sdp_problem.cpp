#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "pmi/errors.hpp"
#include "pmi/polyalg.hpp"
#include "pmi/sdp.hpp"

namespace pmi {

namespace {

double sym_dot(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) { return (A.array() * B.array()).sum(); }

}  // namespace

int SdpProblem::free_size() const {
  int n = 0;
  for (const auto& b : free_blocks) n += b.size;
  return n;
}

void SdpProblem::validate() const {
  auto check_psd = [&](const PsdEntry& e) {
    if (e.block < 0 || e.block >= static_cast<int>(psd_blocks.size()))
      throw DimensionError("PSD entry references undeclared block");
    const int n = psd_blocks[static_cast<std::size_t>(e.block)].size;
    if (e.i < 0 || e.j < e.i || e.j >= n) throw DimensionError("PSD entry outside upper triangle of its block");
  };
  auto check_free = [&](const FreeEntry& e) {
    if (e.block < 0 || e.block >= static_cast<int>(free_blocks.size()))
      throw DimensionError("free entry references undeclared block");
    if (e.index < 0 || e.index >= free_blocks[static_cast<std::size_t>(e.block)].size)
      throw DimensionError("free entry index out of range");
  };
  for (const auto& r : rows) {
    for (const auto& e : r.psd) check_psd(e);
    for (const auto& e : r.free) check_free(e);
  }
  for (const auto& e : objective_psd) check_psd(e);
  for (const auto& e : objective_free) check_free(e);
}

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::unbounded: return "unbounded";
    case SdpStatus::max_iter: return "max_iter";
    case SdpStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

CertificateReport check_certificate(const SdpProblem& P, const SdpSolution& sol) {
  P.validate();
  const std::size_t nb = P.psd_blocks.size();
  std::vector<int> free_offset;
  int nf = 0;
  for (const auto& b : P.free_blocks) {
    free_offset.push_back(nf);
    nf += b.size;
  }
  auto X_of = [&](std::size_t b) -> Eigen::MatrixXd {
    const int n = P.psd_blocks[b].size;
    if (b < sol.X.size() && sol.X[b].rows() == n) return sol.X[b];
    return Eigen::MatrixXd::Zero(n, n);
  };
  auto S_of = [&](std::size_t b) -> Eigen::MatrixXd {
    const int n = P.psd_blocks[b].size;
    if (b < sol.S.size() && sol.S[b].rows() == n) return sol.S[b];
    return Eigen::MatrixXd::Zero(n, n);
  };
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nf);
  for (std::size_t b = 0; b < P.free_blocks.size() && b < sol.z.size(); ++b)
    if (sol.z[b].size() == P.free_blocks[b].size) z.segment(free_offset[b], P.free_blocks[b].size) = sol.z[b];
  Eigen::VectorXd y = sol.y.size() == P.num_rows() ? sol.y : Eigen::VectorXd::Zero(P.num_rows());

  std::vector<Eigen::MatrixXd> X(nb), S(nb), C(nb), AtY(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const int n = P.psd_blocks[b].size;
    X[b] = X_of(b);
    S[b] = S_of(b);
    C[b] = Eigen::MatrixXd::Zero(n, n);
    AtY[b] = Eigen::MatrixXd::Zero(n, n);
  }
  for (const auto& e : P.objective_psd) {
    C[static_cast<std::size_t>(e.block)](e.i, e.j) += e.value;
    if (e.i != e.j) C[static_cast<std::size_t>(e.block)](e.j, e.i) += e.value;
  }
  Eigen::VectorXd cf = Eigen::VectorXd::Zero(nf);
  for (const auto& e : P.objective_free) cf(free_offset[static_cast<std::size_t>(e.block)] + e.index) += e.value;

  CertificateReport rep;
  double bnorm2 = 0.0, rp2 = 0.0;
  Eigen::VectorXd Fty = Eigen::VectorXd::Zero(nf);
  for (int r = 0; r < P.num_rows(); ++r) {
    const SdpRow& row = P.rows[static_cast<std::size_t>(r)];
    double ax = 0.0;
    for (const auto& e : row.psd) {
      const auto& Xb = X[static_cast<std::size_t>(e.block)];
      ax += e.value * (e.i == e.j ? Xb(e.i, e.i) : Xb(e.i, e.j) + Xb(e.j, e.i));
      auto& T = AtY[static_cast<std::size_t>(e.block)];
      T(e.i, e.j) += y(r) * e.value;
      if (e.i != e.j) T(e.j, e.i) += y(r) * e.value;
    }
    for (const auto& e : row.free) {
      const int idx = free_offset[static_cast<std::size_t>(e.block)] + e.index;
      ax += e.value * z(idx);
      Fty(idx) += e.value * y(r);
    }
    rp2 += (row.rhs - ax) * (row.rhs - ax);
    bnorm2 += row.rhs * row.rhs;
    rep.dual_objective += row.rhs * y(r);
  }
  double rd2 = (cf - Fty).squaredNorm(), cnorm2 = cf.squaredNorm();
  rep.primal_objective = cf.dot(z);
  double xs = 0.0;
  rep.min_eig_X = rep.min_eig_S = 0.0;
  bool first = true;
  for (std::size_t b = 0; b < nb; ++b) {
    rd2 += (C[b] - AtY[b] - S[b]).squaredNorm();
    cnorm2 += C[b].squaredNorm();
    rep.primal_objective += sym_dot(C[b], X[b]);
    xs += sym_dot(X[b], S[b]);
    if (X[b].rows() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(X[b], Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S[b], Eigen::EigenvaluesOnly);
      const double mx = ex.eigenvalues().minCoeff(), ms = es.eigenvalues().minCoeff();
      rep.min_eig_X = first ? mx : std::min(rep.min_eig_X, mx);
      rep.min_eig_S = first ? ms : std::min(rep.min_eig_S, ms);
      first = false;
    }
  }
  rep.primal_abs = std::sqrt(rp2);
  rep.dual_abs = std::sqrt(rd2);
  rep.gap_abs = std::abs(rep.primal_objective - rep.dual_objective);
  const double denom = 1.0 + std::abs(rep.primal_objective) + std::abs(rep.dual_objective);
  rep.relative.primal = rep.primal_abs / (1.0 + std::sqrt(bnorm2));
  rep.relative.dual = rep.dual_abs / (1.0 + std::sqrt(cnorm2));
  rep.relative.gap = std::max(rep.gap_abs, xs) / denom;
  return rep;
}

void write_sdp(std::ostream& out, const SdpProblem& P) {
  const int npsd = static_cast<int>(P.psd_blocks.size());
  out << "pmi-sdp 1\n";
  out << "blocks " << P.psd_blocks.size() + P.free_blocks.size() << '\n';
  for (const auto& b : P.psd_blocks) out << "psd " << b.size << ' ' << b.label << '\n';
  for (const auto& b : P.free_blocks) out << "free " << b.size << ' ' << b.label << '\n';
  out << "rows " << P.rows.size() << '\n';
  auto psd_line = [&](int row, const PsdEntry& e) {
    out << row << ' ' << e.block + 1 << ' ' << e.i + 1 << ' ' << e.j + 1 << ' ' << format_double(e.value) << '\n';
  };
  auto free_line = [&](int row, const FreeEntry& e) {
    out << row << ' ' << npsd + e.block + 1 << ' ' << e.index + 1 << ' ' << e.index + 1 << ' ' << format_double(e.value) << '\n';
  };
  for (std::size_t r = 0; r < P.rows.size(); ++r) {
    for (const auto& e : P.rows[r].psd) psd_line(static_cast<int>(r) + 1, e);
    for (const auto& e : P.rows[r].free) free_line(static_cast<int>(r) + 1, e);
  }
  out << "objective\n";
  for (const auto& e : P.objective_psd) psd_line(0, e);
  for (const auto& e : P.objective_free) free_line(0, e);
  out << "rhs\n";
  for (std::size_t r = 0; r < P.rows.size(); ++r) out << r + 1 << ' ' << format_double(P.rows[r].rhs) << '\n';
  out << "end\n";
}

SdpProblem read_sdp(std::istream& in) {
  SdpProblem P;
  std::string line, word;
  auto expect = [&](const std::string& key) {
    if (!std::getline(in, line)) throw ParseError("sdp file truncated, expected " + key);
    std::istringstream ss(line);
    ss >> word;
    if (word != key) throw ParseError("sdp file: expected '" + key + "', got '" + line + "'");
    return ss.str().substr(word.size());
  };
  auto parse_double = [](const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) throw ParseError("sdp file: bad number '" + s + "'");
    return v;
  };

  {
    std::istringstream ss(expect("pmi-sdp"));
    int version = 0;
    ss >> version;
    if (version != 1) throw ParseError("sdp file: unsupported version");
  }
  int nblocks = 0;
  std::istringstream(expect("blocks")) >> nblocks;
  std::vector<bool> is_free;
  for (int k = 0; k < nblocks; ++k) {
    if (!std::getline(in, line)) throw ParseError("sdp file truncated in block list");
    std::istringstream ss(line);
    std::string kind, label;
    int size = 0;
    ss >> kind >> size >> label;
    if (kind == "psd") {
      if (!P.free_blocks.empty()) throw ParseError("sdp file: PSD blocks must precede free blocks");
      P.psd_blocks.push_back({label, size});
    } else if (kind == "free") {
      P.free_blocks.push_back({label, size});
    } else {
      throw ParseError("sdp file: unknown block kind '" + kind + "'");
    }
  }
  const int npsd = static_cast<int>(P.psd_blocks.size());
  int nrows = 0;
  std::istringstream(expect("rows")) >> nrows;
  P.rows.resize(static_cast<std::size_t>(nrows));

  enum class Section { rows, objective, rhs } sec = Section::rows;
  while (std::getline(in, line)) {
    if (line == "end") {
      P.validate();
      return P;
    }
    if (line == "objective") {
      sec = Section::objective;
      continue;
    }
    if (line == "rhs") {
      sec = Section::rhs;
      continue;
    }
    std::istringstream ss(line);
    if (sec == Section::rhs) {
      int r = 0;
      std::string v;
      ss >> r >> v;
      if (r < 1 || r > nrows) throw ParseError("sdp file: rhs row out of range");
      P.rows[static_cast<std::size_t>(r - 1)].rhs = parse_double(v);
      continue;
    }
    int r = 0, blk = 0, i = 0, j = 0;
    std::string v;
    ss >> r >> blk >> i >> j >> v;
    if (!ss && v.empty()) throw ParseError("sdp file: malformed entry '" + line + "'");
    const double value = parse_double(v);
    if (blk < 1 || blk > nblocks) throw ParseError("sdp file: block out of range");
    if (sec == Section::rows && (r < 1 || r > nrows)) throw ParseError("sdp file: row out of range");
    if (blk <= npsd) {
      PsdEntry e{blk - 1, i - 1, j - 1, value};
      if (sec == Section::rows)
        P.rows[static_cast<std::size_t>(r - 1)].psd.push_back(e);
      else
        P.objective_psd.push_back(e);
    } else {
      FreeEntry e{blk - npsd - 1, i - 1, value};
      if (sec == Section::rows)
        P.rows[static_cast<std::size_t>(r - 1)].free.push_back(e);
      else
        P.objective_free.push_back(e);
    }
  }
  throw ParseError("sdp file: missing 'end'");
}

}  // namespace pmi
