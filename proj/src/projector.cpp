#include "sketchuq/projector.hpp"

#include <cmath>

namespace sketchuq {

namespace {

// G = (SX)† S as a p x n matrix, the shared factor of P = X G.
Matrix sketched_pinv_factor(const DesignData& data, const SketchDraw& draw,
                            const linalg::Svd& sx_svd) {
  const Matrix sx_pinv = sx_svd.pinv();  // p x r
  return apply_sketch_transpose(draw, sx_pinv.transpose()).transpose();
}

}  // namespace

ProjectorSet build_projectors(const DesignData& data, const SketchDraw& draw,
                              Index materialize_cap, linalg::PowerIterOptions opts) {
  const Matrix sx = apply_sketch(draw, data.x());
  const linalg::Svd sx_svd = linalg::decompose(sx, data.rank_tol_factor());

  ProjectorSet set;
  set.rank_sx = sx_svd.rank();
  const Matrix sx_pinv = sx_svd.pinv();
  set.p0 = sx_pinv * sx;
  set.dev_p0 = linalg::spectral_norm(Matrix::Identity(data.p(), data.p()) - set.p0);
  set.xdag_p = apply_sketch_transpose(draw, sx_pinv.transpose()).transpose();

  const Matrix& u = data.svd().u;  // orthonormal basis of range(X)
  if (data.n() <= materialize_cap) {
    Matrix p = data.x() * set.xdag_p;
    const Matrix px = u * u.transpose();
    set.dev_p_px = linalg::spectral_norm(p - px);
    set.dev_ppt_px = linalg::spectral_norm(p * p.transpose() - px);
    set.p = std::move(p);
  } else {
    const Matrix& x = data.x();
    const Matrix& g = set.xdag_p;
    auto apply_diff = [&](const Vector& v) -> Vector {
      return x * (g * v) - u * (u.transpose() * v);
    };
    auto apply_diff_adj = [&](const Vector& v) -> Vector {
      return g.transpose() * (x.transpose() * v) - u * (u.transpose() * v);
    };
    auto apply_sym = [&](const Vector& v) -> Vector {
      return x * (g * (g.transpose() * (x.transpose() * v))) - u * (u.transpose() * v);
    };
    const auto r1 = linalg::operator_norm(apply_diff, apply_diff_adj, data.n(), opts);
    const auto r2 = linalg::operator_norm(apply_sym, apply_sym, data.n(), opts);
    set.dev_p_px = r1.value;
    set.dev_ppt_px = r2.value;
    set.power_iter = PowerIterMeta{opts.tol, opts.max_iter, r1.converged && r2.converged};
  }
  return set;
}

SketchedFit sketched_solve(const DesignData& data, const SketchDraw& draw) {
  const Matrix sx = apply_sketch(draw, data.x());
  const Vector sy = apply_sketch(draw, data.y());
  const linalg::Svd sx_svd = linalg::decompose(sx, data.rank_tol_factor());

  SketchedFit fit;
  fit.beta_tilde = sx_svd.pinv_apply(sy);
  fit.y_tilde = data.x() * fit.beta_tilde;
  fit.residual_tilde = data.y() - fit.y_tilde;

  // P y = X beta_tilde, so X† P y and beta_hat + X†(P - Px) y are independent
  // float routes to the same vector.
  const Vector via_projector = data.pinv_apply(fit.y_tilde);
  const Vector beta_hat = data.pinv_apply(data.y());
  const Vector y_hat = data.x() * beta_hat;
  const Vector deviation = fit.y_tilde - y_hat;
  const Vector via_update = beta_hat + data.pinv_apply(deviation);
  const double scale = 1.0 + fit.beta_tilde.norm() + beta_hat.norm();
  require((via_projector - fit.beta_tilde).norm() <= 1e-8 * scale &&
              (via_update - fit.beta_tilde).norm() <= 1e-8 * scale,
          errc::numerical_failure, "sketched solution failed the projector identity check");
  return fit;
}

bool null_space_check(const DesignData& data, const SketchDraw& draw, double tol) {
  const Index n = data.n();
  const Matrix sx = apply_sketch(draw, data.x());  // r x p
  const Matrix a = apply_sketch_transpose(draw, sx).transpose();  // X^T S^T S, p x n

  Eigen::JacobiSVD<Matrix> a_svd(a, Eigen::ComputeFullV);
  const double a_max = a_svd.singularValues().size() > 0 ? a_svd.singularValues()(0) : 0.0;
  const double a_tol = linalg::rank_tolerance(a.rows(), a.cols(), a_max, data.rank_tol_factor());
  Index a_rank = 0;
  while (a_rank < a_svd.singularValues().size() && a_svd.singularValues()(a_rank) > a_tol)
    ++a_rank;

  const linalg::Svd sx_svd = linalg::decompose(sx, data.rank_tol_factor());
  const Matrix g = sketched_pinv_factor(data, draw, sx_svd);
  const Matrix p = data.x() * g;

  Eigen::JacobiSVD<Matrix> p_svd(p, Eigen::ComputeFullV);
  const double p_max = p_svd.singularValues().size() > 0 ? p_svd.singularValues()(0) : 0.0;
  const double p_tol = linalg::rank_tolerance(n, n, p_max, data.rank_tol_factor());
  Index p_rank = 0;
  while (p_rank < p_svd.singularValues().size() && p_svd.singularValues()(p_rank) > p_tol)
    ++p_rank;

  const double p_scale = std::max(1.0, p_max);
  const double a_scale = std::max(1.0, a_max);

  // null(X^T S^T S) must be annihilated by P ...
  if (a_rank < n) {
    const Matrix null_a = a_svd.matrixV().rightCols(n - a_rank);
    if (linalg::spectral_norm(p * null_a) > tol * p_scale) return false;
  }
  // ... and null(P) by X^T S^T S.
  if (p_rank < n) {
    const Matrix null_p = p_svd.matrixV().rightCols(n - p_rank);
    if (linalg::spectral_norm(a * null_p) > tol * a_scale) return false;
  }
  return true;
}

}  // namespace sketchuq
