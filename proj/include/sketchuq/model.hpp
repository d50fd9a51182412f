#pragma once

#include <cstdint>
#include <optional>

#include "sketchuq/linalg.hpp"
#include "sketchuq/types.hpp"

namespace sketchuq {

// Gaussian linear model y = X beta0 + eps, eps ~ N(0, sigma2 I).
struct ModelSpec {
  Vector beta0;
  double sigma2 = 1.0;
};

void validate(const ModelSpec& spec);

// Observed (X, y) pair with the design's thin SVD cached. Construction
// enforces n >= p >= 1, finite entries, and rank(X) = p.
class DesignData {
 public:
  DesignData(Matrix x, Vector y, double rank_tol_factor = 1.0);

  const Matrix& x() const { return x_; }
  const Vector& y() const { return y_; }
  Index n() const { return x_.rows(); }
  Index p() const { return x_.cols(); }
  const linalg::Svd& svd() const { return svd_; }
  double kappa_x() const { return kappa_; }
  const Vector& leverage() const { return leverage_; }
  double rank_tol_factor() const { return tol_factor_; }

  Matrix xtx_inverse() const;            // (X^T X)^{-1}
  Vector pinv_apply(const Vector& v) const { return svd_.pinv_apply(v); }
  Matrix pinv_apply(const Matrix& m) const { return svd_.pinv_apply(m); }
  Vector hat_apply(const Vector& v) const;  // Px v = U U^T v

 private:
  Matrix x_;
  Vector y_;
  linalg::Svd svd_;
  Vector leverage_;
  double kappa_ = 1.0;
  double tol_factor_ = 1.0;
};

struct ExactFit {
  Vector beta_hat;
  Vector y_hat;
  Vector residual;
  std::optional<Matrix> hat_matrix;  // materialized when n <= cap
  double cos_theta = 1.0;            // ||y_hat|| / ||y||; 1 for y = 0
  double kappa_x = 1.0;
};

// y = X beta0 + eps with eps iid N(0, sigma2), deterministic given seed.
Vector simulate_response(const Matrix& x, const ModelSpec& spec, std::uint64_t seed);

ExactFit exact_solve(const DesignData& data, Index hat_matrix_cap = kDefaultMaterializeCap);

// sigma^2 (X^T X)^{-1}, the covariance of the exact solution under the model.
Matrix model_variance(const DesignData& data, const ModelSpec& spec);

}  // namespace sketchuq
