#include "sketchuq/model.hpp"

#include <cmath>
#include <utility>

#include "sketchuq/rng.hpp"

namespace sketchuq {

void validate(const ModelSpec& spec) {
  require(spec.beta0.size() >= 1, errc::invalid_input, "beta0 is empty");
  require(spec.beta0.allFinite(), errc::invalid_input, "beta0 has non-finite entries");
  require(std::isfinite(spec.sigma2) && spec.sigma2 > 0.0, errc::invalid_input,
          "sigma2 must be positive");
}

DesignData::DesignData(Matrix x, Vector y, double rank_tol_factor)
    : x_(std::move(x)), y_(std::move(y)), tol_factor_(rank_tol_factor) {
  require(x_.rows() >= 1 && x_.cols() >= 1, errc::invalid_input, "empty design matrix");
  require(x_.rows() >= x_.cols(), errc::invalid_input, "design requires n >= p");
  require(y_.size() == x_.rows(), errc::dimension_mismatch,
          "response length does not match the number of rows");
  require(x_.allFinite() && y_.allFinite(), errc::invalid_input,
          "design or response has non-finite entries");
  svd_ = linalg::decompose(x_, tol_factor_);
  require(svd_.rank() == x_.cols(), errc::rank_deficient_design,
          "design matrix is numerically rank deficient");
  leverage_ = svd_.u.rowwise().squaredNorm();
  kappa_ = svd_.sigma(0) / svd_.sigma(x_.cols() - 1);
}

Matrix DesignData::xtx_inverse() const {
  const Index p = x_.cols();
  return svd_.v.leftCols(p) * svd_.sigma.head(p).array().square().inverse().matrix().asDiagonal() *
         svd_.v.leftCols(p).transpose();
}

Vector DesignData::hat_apply(const Vector& v) const {
  return svd_.u * (svd_.u.transpose() * v);
}

Vector simulate_response(const Matrix& x, const ModelSpec& spec, std::uint64_t seed) {
  validate(spec);
  require(x.cols() == spec.beta0.size(), errc::dimension_mismatch,
          "beta0 length does not match the number of columns");
  rng::Stream stream(seed);
  const double sigma = std::sqrt(spec.sigma2);
  Vector y = x * spec.beta0;
  for (Index i = 0; i < y.size(); ++i) y(i) += sigma * stream.normal();
  return y;
}

ExactFit exact_solve(const DesignData& data, Index hat_matrix_cap) {
  ExactFit fit;
  fit.beta_hat = data.pinv_apply(data.y());
  fit.y_hat = data.x() * fit.beta_hat;
  fit.residual = data.y() - fit.y_hat;
  fit.kappa_x = data.kappa_x();
  const double ynorm = data.y().norm();
  fit.cos_theta = ynorm > 0.0 ? fit.y_hat.norm() / ynorm : 1.0;
  if (data.n() <= hat_matrix_cap) {
    const Matrix& u = data.svd().u;
    fit.hat_matrix = u * u.transpose();
  }
  return fit;
}

Matrix model_variance(const DesignData& data, const ModelSpec& spec) {
  validate(spec);
  require(spec.beta0.size() == data.p(), errc::dimension_mismatch,
          "beta0 length does not match the design");
  return spec.sigma2 * data.xtx_inverse();
}

}  // namespace sketchuq
