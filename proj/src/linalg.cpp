#include "sketchuq/linalg.hpp"

#include <cmath>
#include <limits>

#include "sketchuq/rng.hpp"

namespace sketchuq::linalg {

double rank_tolerance(Index rows, Index cols, double sigma_max, double tol_factor) {
  const double dim = static_cast<double>(std::max(rows, cols));
  return tol_factor * dim * std::numeric_limits<double>::epsilon() * sigma_max;
}

Index Svd::rank() const {
  Index r = 0;
  while (r < sigma.size() && sigma(r) > rank_tol) ++r;
  return r;
}

Matrix Svd::pinv() const {
  const Index r = rank();
  if (r == 0) return Matrix::Zero(v.rows(), u.rows());
  return v.leftCols(r) * sigma.head(r).cwiseInverse().asDiagonal() *
         u.leftCols(r).transpose();
}

Vector Svd::pinv_apply(const Vector& b) const {
  const Index r = rank();
  if (r == 0) return Vector::Zero(v.rows());
  return v.leftCols(r) *
         (sigma.head(r).cwiseInverse().asDiagonal() * (u.leftCols(r).transpose() * b));
}

Matrix Svd::pinv_apply(const Matrix& b) const {
  const Index r = rank();
  if (r == 0) return Matrix::Zero(v.rows(), b.cols());
  return v.leftCols(r) *
         (sigma.head(r).cwiseInverse().asDiagonal() * (u.leftCols(r).transpose() * b));
}

Matrix Svd::range_basis() const { return u.leftCols(rank()); }

Svd decompose(const Matrix& a, double tol_factor) {
  require(a.rows() >= 1 && a.cols() >= 1, errc::invalid_input, "empty matrix");
  require(a.allFinite(), errc::invalid_input, "matrix has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out;
  out.u = svd.matrixU();
  out.sigma = svd.singularValues();
  out.v = svd.matrixV();
  const double smax = out.sigma.size() > 0 ? out.sigma(0) : 0.0;
  out.rank_tol = rank_tolerance(a.rows(), a.cols(), smax, tol_factor);
  return out;
}

Matrix pinv(const Matrix& a, double tol_factor) { return decompose(a, tol_factor).pinv(); }

Index numerical_rank(const Matrix& a, double tol_factor) {
  return decompose(a, tol_factor).rank();
}

double cond2(const Matrix& a, double tol_factor) {
  const Svd svd = decompose(a, tol_factor);
  require(svd.sigma(0) > 0.0, errc::invalid_input, "cond2 of the zero matrix");
  const Index k = std::min(a.rows(), a.cols());
  if (svd.rank() < k) return std::numeric_limits<double>::infinity();
  return svd.sigma(0) / svd.sigma(k - 1);
}

Vector leverage_scores(const Matrix& x, double tol_factor) {
  const Svd svd = decompose(x, tol_factor);
  require(svd.rank() == x.cols(), errc::rank_deficient_design,
          "leverage scores require a full column rank design");
  return svd.u.rowwise().squaredNorm();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

PowerIterResult operator_norm(const std::function<Vector(const Vector&)>& apply,
                              const std::function<Vector(const Vector&)>& apply_adjoint,
                              Index domain_dim, PowerIterOptions opts, std::uint64_t seed) {
  rng::Stream stream(seed);
  Vector v(domain_dim);
  for (Index i = 0; i < domain_dim; ++i) v(i) = stream.normal();
  v.normalize();

  PowerIterResult res;
  double prev = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    Vector w = apply_adjoint(apply(v));
    const double lambda = w.norm();  // estimate of sigma^2
    res.iterations = it;
    if (lambda == 0.0) {
      res.value = 0.0;
      res.converged = true;
      return res;
    }
    v = w / lambda;
    const double sigma = std::sqrt(lambda);
    if (std::abs(sigma - prev) <= opts.tol * std::max(1.0, sigma)) {
      res.value = sigma;
      res.converged = true;
      return res;
    }
    prev = sigma;
  }
  res.value = prev;
  res.converged = false;
  return res;
}

}  // namespace sketchuq::linalg
