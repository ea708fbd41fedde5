#include "pmi/sosbuild.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

namespace pmi {

namespace {

int half_up(int k) { return (k + 1) / 2; }

bool only_x(const Polynomial& p, const Universe& U) { return p.supported_in(0, U.n); }

Polynomial sphere(const Universe& U) {
  Polynomial s = Polynomial::constant(U, 1.0);
  for (int j = 0; j < U.m; ++j) s.add_term(Monomial::variable(U.v(j), 2), -1.0);
  return s;
}

int v_degree(const Monomial& m, const Universe& U) { return m.degree_in(U.v(0), U.v(0) + U.m); }

/// Reduced image of a single monomial, memoized.
class MonomialReducer {
 public:
  explicit MonomialReducer(Universe U) : U_(U) {}

  const std::vector<std::pair<Monomial, double>>& operator()(const Monomial& m) {
    if (auto it = cache_.find(m); it != cache_.end()) return it->second;
    std::vector<std::pair<Monomial, double>> out;
    if (U_.m == 0 || m[U_.v(U_.m - 1)] < 2) {
      out.emplace_back(m, 1.0);
    } else {
      const Polynomial red = sphere_reduce(Polynomial::term(U_, m));
      for (const auto& [t, c] : red.terms()) out.emplace_back(t, c);
    }
    return cache_.emplace(m, std::move(out)).first->second;
  }

 private:
  Universe U_;
  std::unordered_map<Monomial, std::vector<std::pair<Monomial, double>>, MonomialHash> cache_;
};

struct Assembler {
  InnerSdp& out;
  std::vector<SdpRow> rows;
  std::vector<int> row_group;

  int row(int group, const Monomial& m) {
    auto& idx = out.row_index[static_cast<std::size_t>(group)];
    auto [it, fresh] = idx.emplace(m, static_cast<int>(rows.size()));
    if (fresh) {
      rows.emplace_back();
      out.row_keys.emplace_back(group, m);
    }
    return it->second;
  }

  /// Adds a Gram multiplier sign * (z^T Q z) * weight to `group`, split into
  /// blocks by v-degree parity when `parity` is set.
  void gram(const std::string& name, int group, const Universe& U, const Polynomial& weight,
            const std::vector<Monomial>& basis, double sign, bool parity, MonomialReducer* reducer) {
    for (int cls = 0; cls < (parity ? 2 : 1); ++cls) {
      GramBlock blk{name, group, U, weight, {}};
      for (const auto& z : basis)
        if (!parity || v_degree(z, U) % 2 == cls) blk.basis.push_back(z);
      if (blk.basis.empty()) continue;
      const int b = static_cast<int>(out.blocks.size());
      const int nb = static_cast<int>(blk.basis.size());
      std::unordered_map<int, double> acc;
      for (int k = 0; k < nb; ++k)
        for (int l = k; l < nb; ++l) {
          acc.clear();
          const Monomial prod = blk.basis[static_cast<std::size_t>(k)] * blk.basis[static_cast<std::size_t>(l)];
          auto add = [&](const Monomial& m, double c) {
            for (const auto& [wm, wc] : weight.terms()) acc[row(group, wm * m)] += sign * wc * c;
          };
          if (reducer)
            for (const auto& [m, c] : (*reducer)(prod)) add(m, c);
          else
            add(prod, 1.0);
          std::vector<std::pair<int, double>> sorted(acc.begin(), acc.end());
          std::sort(sorted.begin(), sorted.end());
          for (const auto& [r, v] : sorted)
            if (v != 0.0) rows[static_cast<std::size_t>(r)].psd.push_back({b, k, l, v});
        }
      std::string label = name;
      if (parity) label += cls == 0 ? ".even" : ".odd";
      out.sdp.psd_blocks.push_back({label, nb});
      out.blocks.push_back(std::move(blk));
    }
  }
};

std::vector<Monomial> reduced_basis(const Universe& U, int degree) {
  std::vector<int> slots(static_cast<std::size_t>(U.size()));
  for (int i = 0; i < U.size(); ++i) slots[static_cast<std::size_t>(i)] = i;
  std::vector<Monomial> out;
  if (degree < 0) return out;
  for (const auto& m : enum_monomials(slots, degree))
    if (U.m == 0 || m[U.v(U.m - 1)] <= 1) out.push_back(m);
  return out;
}

std::vector<Monomial> full_basis(const Universe& U, int degree) {
  std::vector<int> slots(static_cast<std::size_t>(U.size()));
  for (int i = 0; i < U.size(); ++i) slots[static_cast<std::size_t>(i)] = i;
  return degree < 0 ? std::vector<Monomial>{} : enum_monomials(slots, degree);
}

std::vector<Monomial> x_basis(const Universe& U, int degree) {
  std::vector<int> slots(static_cast<std::size_t>(U.n));
  for (int i = 0; i < U.n; ++i) slots[static_cast<std::size_t>(i)] = i;
  return degree < 0 ? std::vector<Monomial>{} : enum_monomials(slots, degree);
}

Polynomial to_convex_universe(const Polynomial& p, const Universe& CU) {
  const Universe& U = p.universe();
  std::vector<int> map(static_cast<std::size_t>(U.size()), -1);
  for (int i = 0; i < U.n; ++i) map[static_cast<std::size_t>(i)] = CU.x(i);
  return p.remap(CU, map);
}

}  // namespace

// ------------------------------------------------------------- PmiProblem

void PmiProblem::validate() const {
  const Universe& U = universe;
  if (U.n < 1 || U.m < 1) throw DimensionError("problem needs n >= 1 and m >= 1");
  if (U.size() > kMaxVars) throw DimensionError("too many variables for the monomial representation");
  if (P.size() != U.m) throw DimensionError("matrix size must equal m");
  if (!(P.universe() == U)) throw DimensionError("matrix polynomial universe differs from the problem universe");
  for (int i = 0; i < U.m; ++i)
    for (int j = i; j < U.m; ++j)
      if (!P.entry(i, j).supported_in(0, U.n + U.p)) throw DimensionError("P may depend on x and u only");
  for (const auto& ai : a) {
    if (!(ai.universe() == U)) throw DimensionError("U constraint universe mismatch");
    if (!ai.supported_in(U.n, U.n + U.p)) throw DimensionError("U constraints may depend on u only");
  }
  for (const auto& bj : b) {
    if (!(bj.universe() == U)) throw DimensionError("B constraint universe mismatch");
    if (!only_x(bj, U)) throw DimensionError("B constraints may depend on x only");
  }
  if (!moments.valid()) throw DimensionError("problem has no bounding set");
  if (moments.dimension() != U.n) throw DimensionError("bounding set dimension differs from n");
  if (U.p > 0 && static_cast<int>(u_box.size()) != U.p) throw DimensionError("u sampling box needs one interval per u");
}

PmiProblem with_guards(const PmiProblem& problem) {
  PmiProblem g = problem;
  if (!problem.archimedean_guard) return g;
  const Universe& U = problem.universe;
  const double R = 1.05 * problem.moments.outer_radius();
  Polynomial bx = Polynomial::constant(U, R * R);
  for (int i = 0; i < U.n; ++i) bx.add_term(Monomial::variable(U.x(i), 2), -1.0);
  g.b.push_back(std::move(bx));
  if (U.p > 0) {
    double r2 = 0.0;
    for (const auto& iv : problem.u_box) r2 += std::max(iv.lo * iv.lo, iv.hi * iv.hi);
    const double Ru = 1.05 * std::sqrt(r2);
    Polynomial au = Polynomial::constant(U, Ru * Ru);
    for (int i = 0; i < U.p; ++i) au.add_term(Monomial::variable(U.u(i), 2), -1.0);
    g.a.push_back(std::move(au));
  }
  return g;
}

MultiplierDegrees multiplier_degrees(const PmiProblem& problem, int d, std::optional<int> order) {
  if (d < 1) throw DegreeError("relaxation degree must be at least 1");
  int top = 2 + std::max(problem.P.degree(), 0);
  for (const auto& ai : problem.a) top = std::max(top, ai.degree());
  for (const auto& bj : problem.b) top = std::max(top, bj.degree());
  MultiplierDegrees md;
  md.d = d;
  md.d0 = half_up(top);
  md.order = order.value_or(d);
  if (md.order < md.d0)
    throw DegreeError("relaxation order " + std::to_string(md.order) + " is below the minimum " + std::to_string(md.d0));
  if (d > md.order) throw DegreeError("multiplier order must be at least the relaxation degree");
  md.r = md.order - 1;
  md.s.push_back(md.order);
  for (const auto& ai : problem.a) md.s.push_back(md.order - half_up(ai.degree()));
  for (const auto& bj : problem.b) md.t.push_back(md.order - half_up(bj.degree()));
  for (int k : md.s)
    if (k < 0) throw DegreeError("negative multiplier degree");
  for (int k : md.t)
    if (k < 0) throw DegreeError("negative multiplier degree");
  return md;
}

// ------------------------------------------------------ sphere reduction

std::pair<Polynomial, Polynomial> sphere_reduce_with_quotient(const Polynomial& p) {
  const Universe& U = p.universe();
  if (U.m < 1) throw DimensionError("sphere_reduce needs at least one v variable");
  const int vm = U.v(U.m - 1);
  Polynomial reduced(U), quotient(U);
  std::vector<std::pair<Monomial, double>> work(p.terms().begin(), p.terms().end());
  while (!work.empty()) {
    auto [mono, c] = work.back();
    work.pop_back();
    if (mono[vm] < 2) {
      reduced.add_term(mono, c);
      continue;
    }
    // c v_m^2 rest = c rest (1 - sum_{j<m} v_j^2) - c rest (1 - v^T v)
    Monomial rest = mono;
    rest.set(vm, mono[vm] - 2);
    quotient.add_term(rest, -c);
    work.emplace_back(rest, c);
    for (int j = 0; j + 1 < U.m; ++j) work.emplace_back(rest * Monomial::variable(U.v(j), 2), -c);
  }
  return {std::move(reduced), std::move(quotient)};
}

Polynomial sphere_reduce(const Polynomial& p) { return sphere_reduce_with_quotient(p).first; }

const char* to_string(VariantKind v) {
  switch (v) {
    case VariantKind::plain: return "plain";
    case VariantKind::nested: return "nested";
    case VariantKind::convex: return "convex";
    case VariantKind::concave: return "concave";
  }
  return "plain";
}

VariantKind parse_variant(const std::string& s) {
  if (s == "plain") return VariantKind::plain;
  if (s == "nested") return VariantKind::nested;
  if (s == "convex") return VariantKind::convex;
  if (s == "concave") return VariantKind::concave;
  throw ParseError("unknown variant '" + s + "'");
}

int InnerSdp::row_of(int group, const Monomial& m) const {
  if (group < 0 || group >= static_cast<int>(row_index.size())) return -1;
  const auto& idx = row_index[static_cast<std::size_t>(group)];
  auto it = idx.find(m);
  return it == idx.end() ? -1 : it->second;
}

// ---------------------------------------------------------------- builder

InnerSdp build_inner_sdp(const PmiProblem& problem_in, int d, const Variant& variant, const BuildOptions& options) {
  problem_in.validate();
  InnerSdp out;
  out.problem = with_guards(problem_in);
  const PmiProblem& pb = out.problem;
  const Universe U = pb.universe;
  out.degrees = multiplier_degrees(pb, d, options.order);
  out.variant = variant;
  out.row_index.resize(3);
  const int D = out.degrees.order;

  if (variant.kind == VariantKind::nested) {
    if (!(variant.prev.universe() == U) || !only_x(variant.prev, U))
      throw DimensionError("nested variant needs the previous g over the problem's x variables");
    if (variant.prev.degree() > 2 * d - 2) throw DegreeError("previous g must have degree at most 2d - 2");
  }

  Assembler as{out, {}, {}};
  MonomialReducer reducer(U);

  // Free block 0: coefficients of g.
  out.g_basis = x_basis(U, 2 * d);
  out.sdp.free_blocks.push_back({"g", static_cast<int>(out.g_basis.size())});

  // Group 0: reduce(v^T P v) = g + sum s_i a_i + sum t_j b_j, reduced.
  const Polynomial qhat = sphere_reduce(quad_form(pb.P));
  for (const auto& [m, c] : qhat.terms()) as.row(0, m);
  for (std::size_t k = 0; k < out.g_basis.size(); ++k)
    as.rows[static_cast<std::size_t>(as.row(0, out.g_basis[k]))].free.push_back({0, static_cast<int>(k), 1.0});

  as.gram("s0", 0, U, Polynomial::constant(U, 1.0), reduced_basis(U, out.degrees.s[0]), 1.0, true, &reducer);
  for (std::size_t i = 0; i < pb.a.size(); ++i)
    as.gram("s" + std::to_string(i + 1), 0, U, pb.a[i], reduced_basis(U, out.degrees.s[i + 1]), 1.0, true, &reducer);
  for (std::size_t j = 0; j < pb.b.size(); ++j)
    as.gram("t" + std::to_string(j + 1), 0, U, pb.b[j], reduced_basis(U, out.degrees.t[j]), 1.0, true, &reducer);
  for (const auto& [m, c] : qhat.terms()) as.rows[static_cast<std::size_t>(as.row(0, m))].rhs = c;

  if (variant.kind == VariantKind::nested) {
    // g - c0 - sum c_j b_j = prev - slack over x monomials.
    const auto gb = out.g_basis;
    for (std::size_t k = 0; k < gb.size(); ++k)
      as.rows[static_cast<std::size_t>(as.row(1, gb[k]))].free.push_back({0, static_cast<int>(k), 1.0});
    as.gram("c0", 1, U, Polynomial::constant(U, 1.0), x_basis(U, D), -1.0, false, nullptr);
    for (std::size_t j = 0; j < pb.b.size(); ++j) {
      const int dj = D - half_up(pb.b[j].degree());
      if (dj < 0) throw DegreeError("negative nested multiplier degree");
      as.gram("c" + std::to_string(j + 1), 1, U, pb.b[j], x_basis(U, dj), -1.0, false, nullptr);
    }
    for (const auto& [m, c] : variant.prev.terms()) as.rows[static_cast<std::size_t>(as.row(1, m))].rhs = c;
    as.rows[static_cast<std::size_t>(as.row(1, Monomial{}))].rhs -= options.nested_slack;
  } else if (variant.kind == VariantKind::convex || variant.kind == VariantKind::concave) {
    const Universe CU{U.n, 0, U.n};
    const double sgn = variant.kind == VariantKind::convex ? 1.0 : -1.0;
    // sgn v^T hess(g) v - c0 - sum c_j b_j - c_{nb+1} (1 - v^T v) = 0.
    for (std::size_t k = 0; k < out.g_basis.size(); ++k) {
      const Polynomial xb = Polynomial::term(CU, out.g_basis[k]);
      for (int i = 0; i < U.n; ++i) {
        const Polynomial di = xb.derivative(CU.x(i));
        for (int j = 0; j < U.n; ++j) {
          const Polynomial dij = di.derivative(CU.x(j));
          for (const auto& [m, c] : dij.terms()) {
            const Monomial mv = m * Monomial::variable(CU.v(i)) * Monomial::variable(CU.v(j));
            as.rows[static_cast<std::size_t>(as.row(2, mv))].free.push_back({0, static_cast<int>(k), sgn * c});
          }
        }
      }
    }
    as.gram("c0", 2, CU, Polynomial::constant(CU, 1.0), full_basis(CU, D), -1.0, true, nullptr);
    for (std::size_t j = 0; j < pb.b.size(); ++j) {
      const int dj = D - half_up(pb.b[j].degree());
      if (dj < 0) throw DegreeError("negative convexity multiplier degree");
      as.gram("c" + std::to_string(j + 1), 2, CU, to_convex_universe(pb.b[j], CU), full_basis(CU, dj), -1.0, true,
              nullptr);
    }
    as.gram("c" + std::to_string(pb.b.size() + 1), 2, CU, sphere(CU), full_basis(CU, D - 1), -1.0, true, nullptr);
  }

  // Merge duplicate free entries (the Hessian loop visits (i, j) and (j, i)).
  for (auto& r : as.rows) {
    std::sort(r.free.begin(), r.free.end(),
              [](const FreeEntry& x, const FreeEntry& y) { return std::tie(x.block, x.index) < std::tie(y.block, y.index); });
    std::vector<FreeEntry> merged;
    for (const auto& e : r.free) {
      if (!merged.empty() && merged.back().block == e.block && merged.back().index == e.index)
        merged.back().value += e.value;
      else
        merged.push_back(e);
    }
    std::erase_if(merged, [](const FreeEntry& e) { return e.value == 0.0; });
    r.free = std::move(merged);
  }

  // Drop empty 0 = 0 rows, scale the rest to unit infinity norm.
  std::vector<SdpRow> rows;
  std::vector<std::pair<int, Monomial>> keys;
  for (std::size_t r = 0; r < as.rows.size(); ++r) {
    SdpRow& row = as.rows[r];
    double norm = 0.0;
    for (const auto& e : row.psd) norm = std::max(norm, std::abs(e.value));
    for (const auto& e : row.free) norm = std::max(norm, std::abs(e.value));
    if (norm == 0.0 && row.rhs == 0.0) continue;
    const double s = options.row_scaling && norm > 0.0 ? 1.0 / norm : 1.0;
    if (s != 1.0) {
      for (auto& e : row.psd) e.value *= s;
      for (auto& e : row.free) e.value *= s;
      row.rhs *= s;
    }
    out.row_scale.push_back(s);
    rows.push_back(std::move(row));
    keys.push_back(out.row_keys[r]);
  }
  out.sdp.rows = std::move(rows);
  out.row_keys = std::move(keys);
  for (auto& idx : out.row_index) idx.clear();
  for (std::size_t r = 0; r < out.row_keys.size(); ++r)
    out.row_index[static_cast<std::size_t>(out.row_keys[r].first)].emplace(out.row_keys[r].second, static_cast<int>(r));

  // minimize -int_B g
  for (std::size_t k = 0; k < out.g_basis.size(); ++k) {
    const double y = pb.moments.get(out.g_basis[k]);
    if (y != 0.0) out.sdp.objective_free.push_back({0, static_cast<int>(k), -y});
  }
  return out;
}

// ------------------------------------------------------------- extraction

InnerApprox extract_solution(const InnerSdp& built, const SdpSolution& sol, unsigned long long seed, int samples) {
  if (sol.status != SdpStatus::optimal) throw SolveFailure(sol.status);
  const PmiProblem& pb = built.problem;
  const Universe U = pb.universe;

  InnerApprox ia;
  ia.d = built.degrees.d;
  ia.order = built.degrees.order;
  ia.variant = built.variant.kind;
  ia.status = sol.status;
  ia.residuals = sol.residuals;
  ia.iterations = sol.iterations;
  ia.g = Polynomial(U);
  for (std::size_t k = 0; k < built.g_basis.size(); ++k) ia.g.add_term(built.g_basis[k], sol.z[0](static_cast<Eigen::Index>(k)));
  for (const auto& [m, c] : ia.g.terms()) ia.objective_value += c * pb.moments.get(m);

  ia.gram = sol.X;
  ia.min_gram_eigenvalue = 0.0;
  for (std::size_t b = 0; b < built.blocks.size(); ++b) {
    const GramBlock& blk = built.blocks[b];
    const Eigen::MatrixXd& Q = sol.X[b];
    const double e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    ia.min_gram_eigenvalue = b == 0 ? e : std::min(ia.min_gram_eigenvalue, e);
    auto it = std::find_if(ia.multipliers.begin(), ia.multipliers.end(),
                           [&](const Multiplier& m) { return m.name == blk.multiplier && m.group == blk.group; });
    if (it == ia.multipliers.end()) {
      ia.multipliers.push_back({blk.multiplier, blk.group, blk.universe, blk.weight, Polynomial(blk.universe), {}});
      it = ia.multipliers.end() - 1;
    }
    it->blocks.push_back(static_cast<int>(b));
    const int n = static_cast<int>(blk.basis.size());
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        it->value.add_term(blk.basis[static_cast<std::size_t>(k)] * blk.basis[static_cast<std::size_t>(l)], Q(k, l));
  }

  // r from the reduction quotients of both sides.
  const Polynomial lhs = quad_form(pb.P) - ia.g;
  Polynomial rhs(U);
  for (const auto& m : ia.multipliers)
    if (m.group == 0) rhs += m.value * m.weight;
  ia.r = sphere_reduce_with_quotient(lhs).second - sphere_reduce_with_quotient(rhs).second;
  const Polynomial sph = sphere(U);

  ia.identity_scale = 1.0 + std::max(lhs.max_abs_coeff(), 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U01(0.0, 1.0);
  std::normal_distribution<double> N01;
  std::vector<double> pt(static_cast<std::size_t>(U.size()));
  ia.identity_residual = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Point x = pb.moments.sample(rng);
    std::copy(x.begin(), x.end(), pt.begin());
    for (int tries = 0; tries < 10000; ++tries) {
      for (int i = 0; i < U.p; ++i) {
        const auto [lo, hi] = pb.u_box[static_cast<std::size_t>(i)];
        pt[static_cast<std::size_t>(U.u(i))] = lo + (hi - lo) * U01(rng);
      }
      bool inside = true;
      for (const auto& ai : pb.a) inside = inside && ai.eval(pt) >= 0.0;
      if (inside) break;
    }
    double nrm = 0.0;
    for (int j = 0; j < U.m; ++j) {
      const double g = N01(rng);
      pt[static_cast<std::size_t>(U.v(j))] = g;
      nrm += g * g;
    }
    const double rad = std::pow(U01(rng), 1.0 / U.m) / std::sqrt(nrm);
    for (int j = 0; j < U.m; ++j) pt[static_cast<std::size_t>(U.v(j))] *= rad;
    const double diff = lhs.eval(pt) - rhs.eval(pt) - ia.r.eval(pt) * sph.eval(pt);
    ia.identity_residual = std::max(ia.identity_residual, std::abs(diff));
  }
  return ia;
}

SdpProblem build_moment_sdp(const InnerSdp& built) {
  const SdpProblem& S = built.sdp;
  if (!S.objective_psd.empty()) throw DimensionError("moment form expects an objective on free variables only");
  SdpProblem M;
  M.psd_blocks = S.psd_blocks;
  const int nrows = S.num_rows();
  M.free_blocks.push_back({"y", nrows});

  // X_b[k, l] = sum_a y_a A_a,b[k, l]
  std::vector<std::map<std::pair<int, int>, std::vector<std::pair<int, double>>>> buckets(S.psd_blocks.size());
  for (int r = 0; r < nrows; ++r)
    for (const auto& e : S.rows[static_cast<std::size_t>(r)].psd)
      buckets[static_cast<std::size_t>(e.block)][{e.i, e.j}].emplace_back(r, e.value);
  for (std::size_t b = 0; b < S.psd_blocks.size(); ++b) {
    const int n = S.psd_blocks[b].size;
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) {
        SdpRow row;
        row.psd.push_back({static_cast<int>(b), k, l, k == l ? 1.0 : 0.5});
        if (auto it = buckets[b].find({k, l}); it != buckets[b].end())
          for (const auto& [r, v] : it->second) row.free.push_back({0, r, -v});
        M.rows.push_back(std::move(row));
      }
  }
  // F^T y = -c: for g this fixes L_y(x^b) to the moments of B.
  const int nf = S.free_size();
  std::vector<double> c(static_cast<std::size_t>(nf), 0.0);
  for (const auto& e : S.objective_free) c[static_cast<std::size_t>(e.index)] += e.value;
  std::vector<SdpRow> fix(static_cast<std::size_t>(nf));
  for (int r = 0; r < nrows; ++r)
    for (const auto& e : S.rows[static_cast<std::size_t>(r)].free) fix[static_cast<std::size_t>(e.index)].free.push_back({0, r, e.value});
  for (int j = 0; j < nf; ++j) {
    fix[static_cast<std::size_t>(j)].rhs = -c[static_cast<std::size_t>(j)];
    M.rows.push_back(std::move(fix[static_cast<std::size_t>(j)]));
  }
  for (int r = 0; r < nrows; ++r) {
    const double v = S.rows[static_cast<std::size_t>(r)].rhs;
    if (v != 0.0) M.objective_free.push_back({0, r, v});
  }
  return M;
}

InnerApprox solve_inner(const PmiProblem& problem, int d, const Variant& variant, const BuildOptions& options,
                        const SolverOptions& solver) {
  const InnerSdp built = build_inner_sdp(problem, d, variant, options);
  return extract_solution(built, solve(built.sdp, solver));
}

}  // namespace pmi
