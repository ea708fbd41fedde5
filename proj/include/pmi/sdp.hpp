#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pmi {

/// Entry (i, j), i <= j, of a symmetric coefficient matrix. The value sits
/// at both (i, j) and (j, i), so an off-diagonal entry contributes
/// 2 * value * X(i, j) to <A, X>.
struct PsdEntry {
  int block = 0;
  int i = 0;
  int j = 0;
  double value = 0.0;
};

struct FreeEntry {
  int block = 0;
  int index = 0;
  double value = 0.0;
};

struct BlockSpec {
  std::string label;
  int size = 0;
};

struct SdpRow {
  std::vector<PsdEntry> psd;
  std::vector<FreeEntry> free;
  double rhs = 0.0;
};

/// minimize   sum_b <C_b, X_b> + c_f^T z
/// subject to sum_b <A_ib, X_b> + f_i^T z = b_i,  X_b PSD,  z free.
struct SdpProblem {
  std::vector<BlockSpec> psd_blocks;
  std::vector<BlockSpec> free_blocks;
  std::vector<SdpRow> rows;
  std::vector<PsdEntry> objective_psd;
  std::vector<FreeEntry> objective_free;

  int num_rows() const { return static_cast<int>(rows.size()); }
  int free_size() const;
  /// Throws DimensionError on any entry outside the declared blocks.
  void validate() const;
};

enum class SdpStatus { optimal, infeasible, unbounded, max_iter, numerical_failure };

const char* to_string(SdpStatus s);

/// Relative residuals:
///   primal = ||b - A(X) - F z|| / (1 + ||b||)
///   dual   = ||(C - A^T y - S, c_f - F^T y)|| / (1 + ||(C, c_f)||)
///   gap    = max(|pobj - dobj|, <X, S>) / (1 + |pobj| + |dobj|)
struct SdpResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::numerical_failure;
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> S;
  std::vector<Eigen::VectorXd> z;
  Eigen::VectorXd y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  SdpResiduals residuals;
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  /// Pivot used when free columns are linearly dependent.
  double free_regularization = 1e-9;
  /// Threshold on the infeasibility certificate ratios.
  double infeasibility_ratio = 1e8;
  int verbosity = 0;
  /// Iteration log sink; std::clog when null and verbosity > 0.
  std::ostream* log = nullptr;
};

/// Primal-dual path following with Nesterov-Todd scaling and Mehrotra
/// predictor-corrector. Deterministic for identical inputs.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

struct CertificateReport {
  double primal_abs = 0.0;  ///< ||b - A(X) - F z||
  double dual_abs = 0.0;    ///< ||(C - A^T y - S, c_f - F^T y)||
  double gap_abs = 0.0;     ///< |pobj - dobj|
  SdpResiduals relative;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double min_eig_X = 0.0;
  double min_eig_S = 0.0;
};

/// Recomputes residuals from the problem data and the returned blocks only.
CertificateReport check_certificate(const SdpProblem& problem, const SdpSolution& solution);

/// Sparse text export:
///   pmi-sdp 1
///   blocks <count>             then one "psd|free <size> <label>" per block
///   rows <m>                   then "<row> <block> <i> <j> <value>" lines
///   objective                  then "0 <block> <i> <j> <value>" lines
///   rhs                        then "<row> <value>" lines
///   end
/// Rows and indices are 1-based, blocks are numbered PSD first then free,
/// free entries use i = j = index. Values are shortest round-trip decimals.
void write_sdp(std::ostream& out, const SdpProblem& problem);
SdpProblem read_sdp(std::istream& in);

}  // namespace pmi
