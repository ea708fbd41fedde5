#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmi/moments.hpp"
#include "pmi/sosbuild.hpp"

namespace pmi {

/// Bounding set as written in a problem file.
struct BoundsSpec {
  BoundKind kind = BoundKind::box;
  std::vector<Interval> box;       ///< box
  std::vector<double> center;      ///< ball
  double radius = 1.0;             ///< ball
  std::vector<Point> vertices;     ///< simplex
  int stability_degree = 0;        ///< pushforward
};

struct ProblemOptions {
  std::vector<int> degrees;  ///< displayed relaxation degrees d
  VariantKind variant = VariantKind::plain;
  double tol = 1e-8;
  unsigned long long seed = 1;
  int ugrid = 33;
  bool guard = true;
  std::optional<int> multiplier_order;
};

/// Text format, one statement per line, '#' starts a comment:
///
///   pmi-problem 1
///   name <identifier>
///   dims <n> <p> <m>
///   entry <i> <j> <polynomial>          1-based, i <= j, omitted entries are 0
///   uconstraint <polynomial>            a_i(u) >= 0
///   ubounds <lo_1> <hi_1> ...           sampling box for u
///   bounds box <lo_1> <hi_1> ...
///   bounds ball <radius> <c_1> ... <c_n>
///   bounds simplex <v_11> ... <v_1n> <v_21> ...  (n + 1 vertices)
///   bounds stability <n>                pushforward of [-1, 1]^n
///   bconstraint <polynomial>            extra b_j(x) >= 0
///   option degrees <d> ...
///   option variant plain|nested|convex|concave
///   option tol <real>
///   option seed <integer>
///   option ugrid <integer>
///   option guard on|off
///   option multiplier-order <integer>
///   end
///
/// print_problem writes this canonical order with canonical polynomials and
/// shortest round-trip numbers, so parse followed by print is a fixed point.
struct ProblemFile {
  std::string name;
  Universe universe;
  MatrixPolynomial P;
  std::vector<Polynomial> u_constraints;
  std::vector<Interval> u_box;
  BoundsSpec bounds;
  std::vector<Polynomial> b_extra;
  ProblemOptions options;
};

ProblemFile parse_problem(std::string_view text);
std::string print_problem(const ProblemFile& file);
ProblemFile read_problem_file(const std::string& path);

MomentSource make_moment_source(const BoundsSpec& bounds);
/// Bounding-set constraints followed by the extra b constraints.
PmiProblem to_pmi_problem(const ProblemFile& file);

/// Built-in examples: planar-box, planar-disk, hermite3, hermite4,
/// hermite4-robust.
std::vector<std::string> example_names();
/// Throws Error for unknown names.
ProblemFile example_problem(const std::string& name);

}  // namespace pmi
