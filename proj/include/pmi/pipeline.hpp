#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmi/problem_file.hpp"
#include "pmi/sosbuild.hpp"
#include "pmi/verify.hpp"

namespace pmi {

struct RunOptions {
  std::optional<double> tol;           ///< overrides the file option
  std::optional<std::uint64_t> seed;   ///< overrides the file option
  std::optional<int> multiplier_order; ///< overrides the file option
  /// Raise the multiplier order to d0 for degrees below it instead of
  /// failing. Used by sweeps.
  bool lift_order = false;
  int grid_res = 100;
  long long samples = 100000;  ///< Monte-Carlo sample count
  bool verify = true;
  int verbosity = 0;
};

/// Result of one solve plus its verification, as stored on disk.
///
///   pmi-artifact 1
///   degree <d>
///   order <D>
///   variant <name>
///   status <status>
///   iterations <k>
///   objective <int_B g>
///   residuals <primal> <dual> <gap>
///   identity-residual <max abs> <scale>
///   min-gram-eigenvalue <value>
///   soundness <samples> <tested> <violations> <worst margin>   (optional)
///   hessian-min <value>                                     (optional)
///   g <polynomial>
///   problem
///   <problem file, through its end line>
struct Artifact {
  ProblemFile problem;
  int degree = 0;
  int order = 0;
  VariantKind variant = VariantKind::plain;
  SdpStatus status = SdpStatus::optimal;
  int iterations = 0;
  double objective = 0.0;
  SdpResiduals residuals;
  double identity_residual = 0.0;
  double identity_scale = 1.0;
  double min_gram_eigenvalue = 0.0;
  std::optional<SampleReport> soundness;
  std::optional<double> hessian_min;
  Polynomial g;

  /// False when soundness found violations or the Hessian check failed.
  bool verified() const;
};

std::string write_artifact(const Artifact& a);
Artifact parse_artifact(std::string_view text);
Artifact read_artifact_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Multiplier order used for degree d, or nullopt for the default.
std::optional<int> effective_order(const ProblemFile& file, int d, const RunOptions& opts);

/// Builds, solves and (unless disabled) verifies. `prev` is required for
/// the nested variant. Throws DegreeError, SolveFailure and the like.
Artifact run_solve(const ProblemFile& file, int d, VariantKind variant, const Polynomial* prev,
                   const RunOptions& opts);

/// Soundness on the grid of B and, for convex and concave variants, the
/// Hessian sign check, both at opts.grid_res.
void verify_artifact(Artifact& a, const RunOptions& opts);

struct SweepRow {
  int d = 0;
  int order = 0;
  std::string status;  ///< solver status, or the error message class
  std::string error;
  double objective = 0.0;
  Estimate rho;          ///< int_B (lambda - g_d)
  Estimate volume;       ///< vol {x in B : g_d(x) >= 0}
  long long violations = 0;
  std::optional<double> nested_min;  ///< min over the grid of g_d - g_{d-1}
  std::optional<Artifact> artifact;
};

/// Degrees d_min..d_max; the nested variant threads g_{d-1} into degree d
/// and starts plain. Failures are recorded per row and the sweep continues.
/// Throws Error on an empty range.
std::vector<SweepRow> run_sweep(const ProblemFile& file, int d_min, int d_max, VariantKind variant,
                                const RunOptions& opts);

/// d,order,status,objective,rho,rho_se,volume,volume_se,violations[,nested_min]
std::string sweep_csv(const std::vector<SweepRow>& rows, bool nested);

/// Parses "x3=0,x4=0.5": the two coordinates not fixed are the grid axes.
/// For n = 2 an empty spec selects (x1, x2).
Section parse_section(std::string_view spec, int n);

/// Header "x<a>,x<b>,g,lambda", then res*res rows (x_a fastest).
std::string grid_csv(const Artifact& a, int res, const Section& section);

/// JSON report: soundness, L1 gap and volume estimates. `verified`
/// receives the overall verdict when not null.
std::string verify_report(const Artifact& a, const RunOptions& opts, bool* verified = nullptr);

/// CSV "a1,...,an,moment" with one row per x monomial of degree <= max_degree, graded-lex.
std::string moments_table(const ProblemFile& file, int max_degree);

/// Built SOS program in the text SDP format.
std::string export_sdp_text(const ProblemFile& file, int d, VariantKind variant, const Polynomial* prev,
                            const RunOptions& opts);

}  // namespace pmi
