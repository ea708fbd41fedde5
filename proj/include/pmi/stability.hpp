#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pmi/polyalg.hpp"

namespace pmi {

using Point = std::vector<double>;

/// Hermite matrix of the monic polynomial z^n + x1 z^(n-1) + ... + xn. It is
/// positive definite exactly when all roots lie in the open unit disk.
struct HermiteInstance {
  int n = 0;
  MatrixPolynomial P;
};

/// P = T1^T T1 - T2^T T2 with T1, T2 the upper triangular Toeplitz matrices
/// with first rows (1, x1, ..., x_{n-1}) and (xn, ..., x1). Coefficient xi
/// lives in slot i-1 of `universe` (default: x1..xn alone).
HermiteInstance hermite_matrix(int n);
HermiteInstance hermite_matrix(int n, Universe universe);

/// Multiaffine map from reflection coefficients k in [-1,1]^n onto the
/// closure of the Schur stability region.
struct ReflectionMap {
  int n = 0;
  std::vector<Polynomial> components;  // polynomials in k over Universe{n,0,0}
  Polynomial jacobian_det;

  Point operator()(std::span<const double> k) const;
};

/// Built by the Levinson-style cascade c <- [c, 0] + k_j * reverse([c, 0]),
/// starting from c = (1); x is the trailing n entries of the final c.
ReflectionMap reflection_map(int n);

/// Coefficient vectors (x1..xn) of (z-1)^j (z+1)^(n-j), listed j = n..0.
std::vector<Point> stable_simplex_vertices(int n);

/// Vertices of {x : A x + b in conv(stable_simplex_vertices(n))}, where A is
/// n-by-k with full column rank. For k = 2 the vertices are returned
/// counter-clockwise. Throws GeometryError when the section is empty.
std::vector<Point> section_bounding_simplex(int n, const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Images of the design variables under x_full = A x + b, as polynomials over
/// `design` (slots 0..k-1 of it are the design variables).
std::vector<Polynomial> affine_images(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, Universe design);

}  // namespace pmi
