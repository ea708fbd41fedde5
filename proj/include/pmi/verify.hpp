#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pmi/errors.hpp"
#include "pmi/moments.hpp"
#include "pmi/sosbuild.hpp"

namespace pmi {

class VerifyError : public Error {
 public:
  using Error::Error;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, swept until
/// the off-diagonal Frobenius norm is <= 1e-12 (relative to the matrix norm
/// when that exceeds 1). Ascending. Throws DimensionError when M is not
/// square or |M - M^T| exceeds 1e-12.
std::vector<double> eig_sym(const Eigen::MatrixXd& M);

/// Points of U used to sample lambda(x): a tensor grid over the u box with
/// `grid` points per axis plus `random` rejection samples, both filtered by
/// a_i(u) >= 0. Without u variables the plan is the single empty point.
struct UPlan {
  std::vector<Point> points;
};

/// Throws VerifyError when no point survives the rejection test.
UPlan make_u_plan(const PmiProblem& problem, int grid = 33, int random = 1000, std::uint64_t seed = 1);

/// min over the plan of the smallest eigenvalue of P(x, u).
double lambda_min(const PmiProblem& problem, std::span<const double> x, const UPlan& plan);

/// lambda_min for many x. P(x, u) is split as sum_k M_k(x) u^beta_k once per
/// x; a u point only reaches eig_sym when P(x, u) - best*I fails a
/// Cholesky test, so the value is the same min as the plain scan.
class LambdaEvaluator {
 public:
  LambdaEvaluator(const PmiProblem& problem, const UPlan& plan);
  double operator()(std::span<const double> x) const;

 private:
  struct Term {
    int entry;     // index into the upper triangle
    double coeff;
    std::vector<std::pair<int, int>> x_pows;  // (slot, exponent)
    int u_mono;    // index into u_monos_
  };
  int size_ = 0;
  Universe universe_;
  std::vector<std::pair<int, int>> entries_;  // (i, j)
  std::vector<Term> terms_;
  std::vector<std::vector<std::pair<int, int>>> u_monos_;
  std::vector<std::vector<double>> u_values_;  // [point][u_mono]
};

struct Membership {
  bool inside = false;
  double margin = 0.0;  ///< lambda_min
};

/// inside iff lambda_min >= -1e-9.
Membership membership(const PmiProblem& problem, std::span<const double> x, const UPlan& plan);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long long samples = 0;
};

/// Samples are drawn in chunks of kChunk; chunk c uses an mt19937_64 seeded
/// with splitmix64(seed + c), and chunk results are reduced in chunk order,
/// so estimates do not depend on the number of threads.
inline constexpr long long kChunk = 1 << 14;
std::uint64_t splitmix64(std::uint64_t z);

using RegionPredicate = std::function<bool(std::span<const double>)>;

/// vol(B) * fraction of uniform samples of B satisfying `inside`.
/// std_error = vol(B) sqrt(p (1 - p) / N).
Estimate mc_volume(const RegionPredicate& inside, const MomentSource& B, long long N, std::uint64_t seed);
/// Region {g >= 0}; g is evaluated with x in its first n slots.
Estimate mc_volume(const Polynomial& g, const MomentSource& B, long long N, std::uint64_t seed);

struct GapEstimate {
  Estimate estimate;         ///< of int_B (lambda - g)
  long long violations = 0;  ///< samples with g > lambda + 1e-6
  double worst_margin = 0.0; ///< min over samples of lambda - g
};

/// Monte-Carlo estimate of int_B (lambda(x) - g(x)) dx with the std error
/// of the sample mean times vol(B). Violations are counted, not clipped.
GapEstimate l1_gap(const Polynomial& g, const PmiProblem& problem, const UPlan& plan, long long N,
                   std::uint64_t seed);

/// max_k g_k(x). Throws DimensionError on an empty list.
double eval_piecewise_max(std::span<const Polynomial> gs, std::span<const double> x);

/// Evaluates a polynomial whose x variables occupy its first slots; other
/// slots are set to zero.
double eval_x(const Polynomial& g, std::span<const double> x);

/// Axis-aligned box containing B.
std::vector<Interval> bounding_box(const MomentSource& B);

/// A planar section of R^n: coordinates `axes` vary over the grid, all
/// others are fixed to `fixed` (length n, entries on axes ignored).
struct Section {
  int axes[2] = {0, 1};
  std::vector<double> fixed;
};

/// res x res grid over the bounding box of B along the section axes,
/// row-major with x_axes[0] varying fastest. Points outside B are kept.
std::vector<Point> section_grid(const MomentSource& B, const Section& section, int res);
/// Grid points of the bounding box of B lying in B: res^n points for
/// n <= 3, otherwise the section grid.
std::vector<Point> grid_in_bounds(const MomentSource& B, int res);

struct SampleReport {
  long long samples = 0;     ///< points examined
  long long tested = 0;      ///< points where the tested condition applied
  long long violations = 0;
  double worst_margin = 0.0; ///< min of the tested quantity, +inf when none
  std::uint64_t seed = 0;
};

/// Soundness: every grid point of B with g(x) >= 1e-6 must satisfy
/// membership. worst_margin is the least lambda_min among those points.
SampleReport soundness_sweep(const PmiProblem& problem, const Polynomial& g, const UPlan& plan, int res,
                             std::uint64_t seed = 0);

/// min over points of the smallest eigenvalue of sign * hess g.
double min_hessian_eigenvalue(const Polynomial& g, std::span<const Point> points, double sign = 1.0);

}  // namespace pmi
