#pragma once

#include <cstdint>
#include <functional>

#include "sketchuq/types.hpp"

namespace sketchuq::linalg {

// Absolute singular-value cutoff used by every rank decision in the library:
// max(rows, cols) * machine epsilon * sigma_max, scaled by tol_factor.
double rank_tolerance(Index rows, Index cols, double sigma_max, double tol_factor = 1.0);

// Thin SVD A = U diag(sigma) V^T with the rank cutoff attached.
struct Svd {
  Matrix u;         // rows x k, orthonormal columns, k = min(rows, cols)
  Vector sigma;     // non-increasing, non-negative
  Matrix v;         // cols x k, orthonormal columns
  double rank_tol;  // absolute cutoff

  Index rank() const;
  Matrix pinv() const;
  Vector pinv_apply(const Vector& b) const;
  Matrix pinv_apply(const Matrix& b) const;
  Matrix range_basis() const;  // first rank() columns of u
};

Svd decompose(const Matrix& a, double tol_factor = 1.0);

// Moore-Penrose pseudoinverse via SVD truncation.
Matrix pinv(const Matrix& a, double tol_factor = 1.0);

Index numerical_rank(const Matrix& a, double tol_factor = 1.0);

// Two-norm condition number sigma_max / sigma_min; +infinity when the matrix
// is numerically rank deficient. The zero matrix is rejected.
double cond2(const Matrix& a, double tol_factor = 1.0);

// Squared row norms of an orthonormal range basis of x; requires full column
// rank. Sums to cols(x).
Vector leverage_scores(const Matrix& x, double tol_factor = 1.0);

double spectral_norm(const Matrix& a);

struct PowerIterOptions {
  double tol = 1e-6;
  int max_iter = 500;
};

struct PowerIterResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value of the operator given by apply / apply_adjoint,
// via power iteration on A^T A with a deterministic seeded start vector.
PowerIterResult operator_norm(const std::function<Vector(const Vector&)>& apply,
                              const std::function<Vector(const Vector&)>& apply_adjoint,
                              Index domain_dim, PowerIterOptions opts = {},
                              std::uint64_t seed = 0x5eedULL);

}  // namespace sketchuq::linalg
