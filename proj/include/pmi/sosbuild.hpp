#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pmi/errors.hpp"
#include "pmi/moments.hpp"
#include "pmi/polyalg.hpp"
#include "pmi/sdp.hpp"

namespace pmi {

/// P(x, u) >= 0 over u in U = {a_i(u) >= 0}, restricted to B = {b_j(x) >= 0}.
struct PmiProblem {
  std::string name;
  Universe universe;  ///< (n, p, m); polynomials carry v slots even when unused
  MatrixPolynomial P;
  std::vector<Polynomial> a;  ///< a_0 = 1 is implicit
  std::vector<Polynomial> b;
  MomentSource moments;
  /// Sampling box for u, used by verification and residual checks.
  std::vector<Interval> u_box;
  bool archimedean_guard = true;

  /// Throws DimensionError on inconsistent dimensions.
  void validate() const;
};

/// Copy of `problem` with R^2 - x^T x appended to b and, when p > 0,
/// R_u^2 - u^T u appended to a. R is 1.05 times the outer radius of B and
/// R_u 1.05 times the outer radius of the u box. No-op when the guard is off.
PmiProblem with_guards(const PmiProblem& problem);

/// Gram-basis half degrees of the multipliers. `order` is the relaxation
/// order used for the multipliers (the relaxation degree d unless raised).
struct MultiplierDegrees {
  int d = 0;
  int order = 0;
  int d0 = 0;
  int r = 0;
  std::vector<int> s;  ///< s[0] for a_0 = 1, then one per a_i
  std::vector<int> t;  ///< one per b_j
};

/// Lowest degrees: d_r = D - 1, d_s = D - ceil(deg a / 2),
/// d_t = D - ceil(deg b / 2) with D = order or d. Throws DegreeError when
/// D < d0, where 2 d0 >= max(2 + deg P, deg a_i, deg b_j), or when d > D.
MultiplierDegrees multiplier_degrees(const PmiProblem& problem, int d, std::optional<int> order = {});

/// Reduction modulo 1 - v^T v: v_m^2 -> 1 - sum_{j<m} v_j^2 until every
/// term has v_m exponent <= 1. Universe must have m >= 1.
Polynomial sphere_reduce(const Polynomial& p);
/// p = reduced + (1 - v^T v) * quotient.
std::pair<Polynomial, Polynomial> sphere_reduce_with_quotient(const Polynomial& p);

enum class VariantKind { plain, nested, convex, concave };

const char* to_string(VariantKind v);
VariantKind parse_variant(const std::string& s);

/// plain: the base program. nested: also g - prev = c_0 + sum c_j b_j.
/// convex: also v^T (hess g) v = c_0 + sum c_j b_j + c_{nb+1} (1 - v^T v)
/// over (x, v) with v in R^n. concave: the same with -hess g.
struct Variant {
  VariantKind kind = VariantKind::plain;
  Polynomial prev;
};

struct BuildOptions {
  std::optional<int> order;
  bool row_scaling = true;
  /// The nested identity certifies g >= prev - nested_slack on B. Without
  /// it an optimal prev touches lambda and the program has no interior.
  double nested_slack = 1e-8;
};

/// One PSD block: the Gram matrix of part of a multiplier. Multipliers are
/// split by parity of their v-degree, so one multiplier may own two blocks.
struct GramBlock {
  std::string multiplier;  ///< "s0", "s1", "t2", "c0", ...
  int group = 0;           ///< 0 main identity, 1 nested, 2 convex/concave
  Universe universe;
  Polynomial weight;       ///< a_i, b_j, 1 - v^T v or 1
  std::vector<Monomial> basis;
};

struct InnerSdp {
  SdpProblem sdp;
  PmiProblem problem;  ///< guarded copy
  MultiplierDegrees degrees;
  Variant variant;
  std::vector<Monomial> g_basis;  ///< x monomials of degree <= 2d; free block 0
  std::vector<GramBlock> blocks;  ///< parallel to sdp.psd_blocks
  std::vector<std::pair<int, Monomial>> row_keys;  ///< (group, monomial) per row
  std::vector<double> row_scale;  ///< scaled row = row_scale * original row
  std::vector<std::unordered_map<Monomial, int, MonomialHash>> row_index;  ///< per group
  int row_of(int group, const Monomial& m) const;  ///< -1 if absent
};

InnerSdp build_inner_sdp(const PmiProblem& problem, int d, const Variant& variant = {}, const BuildOptions& options = {});

struct Multiplier {
  std::string name;
  int group = 0;
  Universe universe;
  Polynomial weight;
  Polynomial value;  ///< sum over its blocks of z^T Q z
  std::vector<int> blocks;
};

struct InnerApprox {
  Polynomial g;
  int d = 0;
  int order = 0;
  VariantKind variant = VariantKind::plain;
  double objective_value = 0.0;  ///< int_B g dx
  std::vector<Multiplier> multipliers;
  std::vector<Eigen::MatrixXd> gram;  ///< parallel to InnerSdp::blocks
  Polynomial r;                       ///< reconstructed sphere multiplier
  SdpStatus status = SdpStatus::optimal;
  SdpResiduals residuals;
  int iterations = 0;
  double identity_residual = 0.0;  ///< max |LHS - RHS| over the samples
  double identity_scale = 1.0;     ///< 1 + max coefficient magnitude
  double min_gram_eigenvalue = 0.0;
};

class SolveFailure : public SolverError {
 public:
  explicit SolveFailure(SdpStatus s)
      : SolverError(std::string("SDP solve ended with status ") + to_string(s)), status(s) {}
  SdpStatus status;
};

/// Throws SolveFailure when the solve was not optimal.
/// Identity residual uses `samples` random (x, u, v) in B x U x unit ball.
InnerApprox extract_solution(const InnerSdp& built, const SdpSolution& solution, unsigned long long seed = 1,
                             int samples = 200);

/// Dual moment program of a built SOS program: pseudo-moments y over the
/// rows, localizing blocks sum_a y_a A_a PSD, L_y(x^b) fixed to the moments
/// of B for every g monomial, minimize L_y(v^T P v). Its optimum equals
/// int_B g_d when there is no duality gap.
SdpProblem build_moment_sdp(const InnerSdp& built);

/// Convenience: build, solve, extract.
InnerApprox solve_inner(const PmiProblem& problem, int d, const Variant& variant = {},
                        const BuildOptions& options = {}, const SolverOptions& solver = {});

}  // namespace pmi
