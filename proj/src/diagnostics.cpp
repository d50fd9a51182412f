#include "sketchuq/diagnostics.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <vector>

#include "sketchuq/linalg.hpp"
#include "sketchuq/parallel.hpp"
#include "sketchuq/rng.hpp"

namespace sketchuq {

DiagnosticRecord diagnose(const DesignData& data, const SketchDraw& draw, const ExactFit& fit) {
  const Matrix sx = apply_sketch(draw, data.x());
  const Vector sy = apply_sketch(draw, data.y());
  const linalg::Svd sx_svd = linalg::decompose(sx, data.rank_tol_factor());

  DiagnosticRecord rec;
  rec.scheme = draw.scheme.kind;
  rec.r = draw.r();
  rec.replicate_seed = draw.seed;
  rec.rank_sx = sx_svd.rank();
  rec.rank_preserved = rec.rank_sx == data.p();
  // The nonzero singular values of an orthogonal projector are all 1, so the
  // condition number of P0 is the binary event: 1 exactly when rank(SX) = p.
  rec.kappa_p0 = rec.rank_preserved ? 1.0 : std::numeric_limits<double>::infinity();

  const Matrix p0 = sx_svd.pinv() * sx;
  Eigen::BDCSVD<Matrix> p0_svd(p0);
  rec.sigma_min_p0 = p0_svd.singularValues()(p0_svd.singularValues().size() - 1);

  const Vector beta_tilde = sx_svd.pinv_apply(sy);
  const Vector y_tilde = data.x() * beta_tilde;
  const double beta_ref = fit.beta_hat.norm();
  const double pred_ref = fit.y_hat.norm();
  if (beta_ref > 0.0) {
    rec.rel_err_beta = (beta_tilde - fit.beta_hat).norm() / beta_ref;
  } else {
    rec.rel_err_beta = (beta_tilde - fit.beta_hat).norm();
    rec.abs_err_fallback = true;
  }
  if (pred_ref > 0.0) {
    rec.rel_err_pred = (y_tilde - fit.y_hat).norm() / pred_ref;
  } else {
    rec.rel_err_pred = (y_tilde - fit.y_hat).norm();
    rec.abs_err_fallback = true;
  }
  return rec;
}

RankPreservationEstimate rank_preservation_probability(const DesignData& data,
                                                       const SketchScheme& scheme,
                                                       Index n_replicates, std::uint64_t seed,
                                                       int threads) {
  require(n_replicates >= 1, errc::insufficient_draws, "at least 1 replicate is required");
  std::vector<char> preserved(static_cast<std::size_t>(n_replicates), 0);
  parallel_for(n_replicates, threads, [&](Index i) {
    const std::uint64_t s = rng::derive(seed, {static_cast<std::uint64_t>(scheme.kind),
                                               static_cast<std::uint64_t>(i)});
    const SketchDraw draw = draw_sketch(scheme, data, s);
    const Matrix sx = apply_sketch(draw, data.x());
    preserved[static_cast<std::size_t>(i)] =
        linalg::numerical_rank(sx, data.rank_tol_factor()) == data.p() ? 1 : 0;
  });
  Index hits = 0;
  for (char c : preserved) hits += c;
  RankPreservationEstimate est;
  est.n_replicates = n_replicates;
  est.p_hat = static_cast<double>(hits) / static_cast<double>(n_replicates);
  est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(n_replicates));
  return est;
}

}  // namespace sketchuq
