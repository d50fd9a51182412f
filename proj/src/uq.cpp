#include "sketchuq/uq.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sketchuq/parallel.hpp"
#include "sketchuq/rng.hpp"

namespace sketchuq {

namespace {

// Sufficient statistics of one draw. Everything downstream assembles from
// p x p objects: with G = X†P = (SX)†S we have P = X G, so
// (X†P)(X†P)^T = G G^T and E[P P^T] = X E[G G^T] X^T.
struct DrawSummary {
  Matrix p0;       // (SX)†(SX)
  Vector p0_beta;  // P0 beta0
  Matrix gg;       // G G^T
  double dist_xb0 = 0.0;  // ||X (I - P0) beta0||^2
  bool rank_preserved = false;
};

struct ModelContext {
  Index n = 0;
  Index p = 0;
  double sigma2 = 1.0;
  Vector beta0;
  Matrix xtx;        // X^T X
  Matrix xtx_inv;    // (X^T X)^{-1}
  Matrix model_var;  // sigma^2 (X^T X)^{-1}
};

ModelContext make_context(const DesignData& data, const ModelSpec& spec) {
  validate(spec);
  require(spec.beta0.size() == data.p(), errc::dimension_mismatch,
          "beta0 length does not match the design");
  ModelContext ctx;
  ctx.n = data.n();
  ctx.p = data.p();
  ctx.sigma2 = spec.sigma2;
  ctx.beta0 = spec.beta0;
  ctx.xtx = data.x().transpose() * data.x();
  ctx.xtx_inv = data.xtx_inverse();
  ctx.model_var = spec.sigma2 * ctx.xtx_inv;
  return ctx;
}

// G G^T without forming G when the draw is a row sampler: group the columns
// of B = (SX)† by sampled row, G G^T = sum_i c_i c_i^T over distinct rows.
Matrix gram_of_factor(const SketchDraw& draw, const Matrix& sx_pinv) {
  const Index p = sx_pinv.rows();
  if (draw.is_sampling()) {
    std::vector<std::pair<Index, Index>> order(draw.row_indices.size());
    for (std::size_t k = 0; k < draw.row_indices.size(); ++k)
      order[k] = {draw.row_indices[k], static_cast<Index>(k)};
    std::sort(order.begin(), order.end());
    Matrix gg = Matrix::Zero(p, p);
    std::size_t k = 0;
    while (k < order.size()) {
      Vector c = sx_pinv.col(order[k].second);
      std::size_t j = k + 1;
      while (j < order.size() && order[j].first == order[k].first) {
        c += sx_pinv.col(order[j].second);
        ++j;
      }
      gg.noalias() += c * c.transpose();
      k = j;
    }
    return gg;
  }
  const Matrix g = sx_pinv * draw.dense;  // p x n
  return g * g.transpose();
}

DrawSummary summarize_draw(const DesignData& data, const ModelContext& ctx,
                           const SketchDraw& draw) {
  const Matrix sx = apply_sketch(draw, data.x());
  const linalg::Svd sx_svd = linalg::decompose(sx, data.rank_tol_factor());
  const Matrix sx_pinv = sx_svd.pinv();

  DrawSummary s;
  s.p0 = sx_pinv * sx;
  s.p0_beta = s.p0 * ctx.beta0;
  s.gg = gram_of_factor(draw, sx_pinv);
  const Vector w = ctx.beta0 - s.p0_beta;
  s.dist_xb0 = w.dot(ctx.xtx * w);
  s.rank_preserved = sx_svd.rank() == ctx.p;
  return s;
}

struct GroupSums {
  Matrix p0;
  Matrix gg;
  Matrix outer;  // sum of (P0 beta0)(P0 beta0)^T
  Vector p0_beta;
  double dist = 0.0;
  Index count = 0;

  explicit GroupSums(Index p)
      : p0(Matrix::Zero(p, p)),
        gg(Matrix::Zero(p, p)),
        outer(Matrix::Zero(p, p)),
        p0_beta(Vector::Zero(p)) {}

  void add(const DrawSummary& s) {
    p0 += s.p0;
    gg += s.gg;
    outer.noalias() += s.p0_beta * s.p0_beta.transpose();
    p0_beta += s.p0_beta;
    dist += s.dist_xb0;
    ++count;
  }

  void merge(const GroupSums& g) {
    p0 += g.p0;
    gg += g.gg;
    outer += g.outer;
    p0_beta += g.p0_beta;
    dist += g.dist;
    count += g.count;
  }

  void subtract(const GroupSums& g) {
    p0 -= g.p0;
    gg -= g.gg;
    outer -= g.outer;
    p0_beta -= g.p0_beta;
    dist -= g.dist;
    count -= g.count;
  }
};

struct Assembled {
  Matrix mean_p0;
  Matrix mean_gg;
  Matrix var_p0_beta;
  Vector total_mean;
  Vector excess_bias;
  Matrix excess_var_proj;
  Matrix total_var;
  double mse_total = 0.0;
  double mse_model = 0.0;
  double mse_excess = 0.0;
  double risk_total = 0.0;
  double risk_model = 0.0;
  double risk_excess_var = 0.0;
  double risk_excess_bias = 0.0;
  double trace_excess = 0.0;
};

Assembled assemble(const GroupSums& sums, const ModelContext& ctx, bool rank_conditioned) {
  const double nd = static_cast<double>(sums.count);
  Assembled a;
  a.mean_p0 = sums.p0 / nd;
  a.mean_gg = sums.gg / nd;
  const Vector mean_p0_beta = sums.p0_beta / nd;
  if (sums.count >= 2) {
    a.var_p0_beta =
        (sums.outer - nd * mean_p0_beta * mean_p0_beta.transpose()) / (nd - 1.0);
  } else {
    a.var_p0_beta = Matrix::Zero(ctx.p, ctx.p);
  }

  const Matrix eye = Matrix::Identity(ctx.p, ctx.p);
  a.total_mean = ctx.beta0 - (eye - a.mean_p0) * ctx.beta0;
  a.excess_bias = (a.mean_p0 - eye) * ctx.beta0;
  a.excess_var_proj = ctx.sigma2 * (a.mean_gg - ctx.xtx_inv);
  a.trace_excess = a.excess_var_proj.trace();

  a.mse_model = ctx.sigma2 * ctx.xtx_inv.trace();
  a.risk_model = ctx.sigma2 * static_cast<double>(ctx.p);
  a.risk_excess_var = ctx.sigma2 * ((a.mean_gg * ctx.xtx).trace() - static_cast<double>(ctx.p));
  a.risk_excess_bias = sums.dist / nd;

  if (rank_conditioned) {
    // Rank-preserving draws have P0 = I, so the rank terms are identically
    // zero up to roundoff; totals use the simplified forms.
    a.total_var = ctx.model_var + a.excess_var_proj;
    a.mse_excess = a.trace_excess;
    a.mse_total = a.mse_model + a.mse_excess;
    a.risk_total = a.risk_model + a.risk_excess_var;
  } else {
    a.total_var = ctx.model_var + a.excess_var_proj + a.var_p0_beta;
    a.mse_excess =
        a.trace_excess + a.var_p0_beta.trace() + a.excess_bias.squaredNorm();
    a.mse_total = a.mse_model + a.mse_excess;
    a.risk_total = a.risk_model + a.risk_excess_var + a.risk_excess_bias;
  }
  return a;
}

double jackknife_scale(std::size_t groups) {
  const double b = static_cast<double>(groups);
  return (b - 1.0) / b;
}

constexpr std::size_t kMaxJackknifeGroups = 256;
constexpr std::uint64_t kDrawStream = 0xD12Au;
constexpr std::uint64_t kNoiseStream = 0x0E15u;

}  // namespace

ConditionalMoments conditional_moments(const DesignData& data, const ModelSpec& spec,
                                       const SketchDraw& draw) {
  const ModelContext ctx = make_context(data, spec);
  const DrawSummary s = summarize_draw(data, ctx, draw);
  ConditionalMoments cm;
  cm.cond_mean = s.p0_beta;
  cm.cond_var = ctx.sigma2 * s.gg;
  cm.cond_var_excess = ctx.sigma2 * (s.gg - ctx.xtx_inv);
  return cm;
}

DrawProvider scheme_draw_provider(const SketchScheme& scheme, const DesignData& data,
                                  std::uint64_t seed) {
  return [scheme, &data, seed](Index replicate) {
    const std::uint64_t s = rng::derive(
        seed, {kDrawStream, static_cast<std::uint64_t>(scheme.kind),
               static_cast<std::uint64_t>(replicate)});
    return draw_sketch(scheme, data, s);
  };
}

UqResult run_uq(const DesignData& data, const ModelSpec& spec, const DrawProvider& provider,
                Index n_draws, bool rank_conditioned, Index materialize_cap, int threads) {
  require(n_draws >= 2, errc::insufficient_draws, "at least 2 draws are required");
  const ModelContext ctx = make_context(data, spec);

  std::vector<DrawSummary> summaries(static_cast<std::size_t>(n_draws));
  parallel_for(n_draws, threads, [&](Index i) {
    summaries[static_cast<std::size_t>(i)] = summarize_draw(data, ctx, provider(i));
  });

  std::vector<const DrawSummary*> used;
  used.reserve(summaries.size());
  for (const auto& s : summaries)
    if (!rank_conditioned || s.rank_preserved) used.push_back(&s);

  if (rank_conditioned) {
    require(!used.empty(), errc::all_draws_rank_deficient,
            "every draw produced a rank-deficient sketch");
    require(used.size() >= 2, errc::insufficient_draws,
            "fewer than 2 rank-preserving draws survived the conditioning");
  }

  const std::size_t n_used = used.size();
  const std::size_t n_groups = std::min(n_used, kMaxJackknifeGroups);
  std::vector<GroupSums> groups(n_groups, GroupSums(ctx.p));
  for (std::size_t i = 0; i < n_used; ++i) groups[i * n_groups / n_used].add(*used[i]);

  GroupSums total(ctx.p);
  for (const auto& g : groups) total.merge(g);
  const Assembled full = assemble(total, ctx, rank_conditioned);

  // Delete-a-group jackknife over the surviving draws.
  std::vector<Assembled> leave_out;
  leave_out.reserve(n_groups);
  if (n_groups >= 2) {
    for (const auto& g : groups) {
      GroupSums rest = total;
      rest.subtract(g);
      if (rest.count >= 2) leave_out.push_back(assemble(rest, ctx, rank_conditioned));
    }
  }

  UqResult out;
  TotalMoments& tm = out.moments;
  DecompositionReport& dr = out.report;

  tm.mean_p0 = full.mean_p0;
  tm.var_p0_beta = full.var_p0_beta;
  tm.total_mean = full.total_mean;
  tm.total_var = full.total_var;
  tm.n_draws = static_cast<Index>(n_used);
  if (ctx.n <= materialize_cap) tm.mean_ppt = data.x() * full.mean_gg * data.x().transpose();

  dr.excess_bias = full.excess_bias;
  dr.excess_var_proj = full.excess_var_proj;
  dr.excess_var_rank = full.var_p0_beta;
  dr.mse_total = full.mse_total;
  dr.mse_model = full.mse_model;
  dr.mse_excess = full.mse_excess;
  dr.risk_total = full.risk_total;
  dr.risk_model = full.risk_model;
  dr.risk_excess_var = full.risk_excess_var;
  dr.risk_excess_bias = full.risk_excess_bias;
  dr.rank_conditioned = rank_conditioned;
  dr.rejection_rate =
      1.0 - static_cast<double>(n_used) / static_cast<double>(summaries.size());
  dr.n_draws_used = static_cast<Index>(n_used);

  tm.se_total_mean = Vector::Zero(ctx.p);
  dr.se_total_mean = Vector::Zero(ctx.p);
  if (leave_out.size() >= 2) {
    const double scale = jackknife_scale(leave_out.size());
    const double inv_b = 1.0 / static_cast<double>(leave_out.size());

    Vector mean_tm = Vector::Zero(ctx.p);
    Matrix mean_tv = Matrix::Zero(ctx.p, ctx.p);
    Matrix mean_p0m = Matrix::Zero(ctx.p, ctx.p);
    double mean_mse = 0.0, mean_risk = 0.0, mean_tr = 0.0, mean_rx = 0.0;
    for (const auto& lo : leave_out) {
      mean_tm += lo.total_mean;
      mean_tv += lo.total_var;
      mean_p0m += lo.mean_p0;
      mean_mse += lo.mse_total;
      mean_risk += lo.risk_total;
      mean_tr += lo.trace_excess;
      mean_rx += lo.risk_excess_var + lo.risk_excess_bias;
    }
    mean_tm *= inv_b;
    mean_tv *= inv_b;
    mean_p0m *= inv_b;
    mean_mse *= inv_b;
    mean_risk *= inv_b;
    mean_tr *= inv_b;
    mean_rx *= inv_b;

    Vector ss_tm = Vector::Zero(ctx.p);
    double ss_tv = 0.0, ss_p0 = 0.0, ss_mse = 0.0, ss_risk = 0.0, ss_tr = 0.0, ss_rx = 0.0;
    for (const auto& lo : leave_out) {
      ss_tm += (lo.total_mean - mean_tm).cwiseAbs2();
      ss_tv += std::pow(linalg::spectral_norm(lo.total_var - mean_tv), 2);
      ss_p0 += std::pow(linalg::spectral_norm(lo.mean_p0 - mean_p0m), 2);
      ss_mse += std::pow(lo.mse_total - mean_mse, 2);
      ss_risk += std::pow(lo.risk_total - mean_risk, 2);
      ss_tr += std::pow(lo.trace_excess - mean_tr, 2);
      ss_rx += std::pow(lo.risk_excess_var + lo.risk_excess_bias - mean_rx, 2);
    }
    tm.se_total_mean = (scale * ss_tm).cwiseSqrt();
    tm.mc_std_err = std::sqrt(scale * ss_tv);
    tm.se_mean_p0 = std::sqrt(scale * ss_p0);
    dr.se_total_mean = tm.se_total_mean;
    dr.mc_std_err = tm.mc_std_err;
    dr.se_mse = std::sqrt(scale * ss_mse);
    dr.se_risk = std::sqrt(scale * ss_risk);
    dr.se_trace_excess = std::sqrt(scale * ss_tr);
    dr.se_risk_excess = std::sqrt(scale * ss_rx);
  }
  return out;
}

TotalMoments total_moments(const DesignData& data, const ModelSpec& spec,
                           const SketchScheme& scheme, Index n_draws, std::uint64_t seed,
                           int threads) {
  return run_uq(data, spec, scheme_draw_provider(scheme, data, seed), n_draws,
                /*rank_conditioned=*/false, kDefaultMaterializeCap, threads)
      .moments;
}

DecompositionReport decompose(const DesignData& data, const ModelSpec& spec,
                              const SketchScheme& scheme, Index n_draws, std::uint64_t seed,
                              bool rank_conditioned, int threads) {
  return run_uq(data, spec, scheme_draw_provider(scheme, data, seed), n_draws,
                rank_conditioned, kDefaultMaterializeCap, threads)
      .report;
}

OracleReport empirical_oracle(const DesignData& data, const ModelSpec& spec,
                              const SketchScheme& scheme, Index n_noise, Index n_draws,
                              std::uint64_t seed, int threads) {
  return empirical_oracle(data, spec, scheme_draw_provider(scheme, data, seed), n_noise,
                          n_draws, seed, threads);
}

OracleReport empirical_oracle(const DesignData& data, const ModelSpec& spec,
                              const DrawProvider& provider, Index n_noise, Index n_draws,
                              std::uint64_t seed, int threads) {
  require(n_draws >= 2 && n_noise >= 2, errc::insufficient_draws,
          "the oracle requires at least 2 sketch draws and 2 noise draws");
  const ModelContext ctx = make_context(data, spec);
  const double sigma = std::sqrt(ctx.sigma2);
  const Vector signal = data.x() * ctx.beta0;

  struct DrawSums {
    Vector beta;
    Matrix outer;
    double mse = 0.0;
    double risk = 0.0;
  };
  std::vector<DrawSums> per_draw(static_cast<std::size_t>(n_draws));

  parallel_for(n_draws, threads, [&](Index d) {
    const SketchDraw draw = provider(d);
    const Matrix sx = apply_sketch(draw, data.x());
    const linalg::Svd sx_svd = linalg::decompose(sx, data.rank_tol_factor());
    const Matrix sx_pinv = sx_svd.pinv();

    rng::Stream noise(rng::derive(seed, {kNoiseStream, static_cast<std::uint64_t>(d)}));
    DrawSums sums{Vector::Zero(ctx.p), Matrix::Zero(ctx.p, ctx.p), 0.0, 0.0};
    Vector y(ctx.n);
    for (Index i = 0; i < n_noise; ++i) {
      for (Index k = 0; k < ctx.n; ++k) y(k) = signal(k) + sigma * noise.normal();
      const Vector beta = sx_pinv * apply_sketch(draw, y);
      sums.beta += beta;
      sums.outer.noalias() += beta * beta.transpose();
      const Vector dlt = beta - ctx.beta0;
      sums.mse += dlt.squaredNorm();
      sums.risk += dlt.dot(ctx.xtx * dlt);
    }
    per_draw[static_cast<std::size_t>(d)] = std::move(sums);
  });

  const double n_total = static_cast<double>(n_draws) * static_cast<double>(n_noise);
  auto reduce = [&](const std::vector<const DrawSums*>& xs, double count) {
    OracleReport r;
    Vector beta = Vector::Zero(ctx.p);
    Matrix outer = Matrix::Zero(ctx.p, ctx.p);
    double mse = 0.0, risk = 0.0;
    for (const auto* x : xs) {
      beta += x->beta;
      outer += x->outer;
      mse += x->mse;
      risk += x->risk;
    }
    r.mean_beta = beta / count;
    r.cov_beta = (outer - count * r.mean_beta * r.mean_beta.transpose()) / (count - 1.0);
    r.mse = mse / count;
    r.risk = risk / count;
    return r;
  };

  std::vector<const DrawSums*> all;
  all.reserve(per_draw.size());
  for (const auto& s : per_draw) all.push_back(&s);
  OracleReport full = reduce(all, n_total);
  full.n_draws = n_draws;
  full.n_noise = n_noise;

  // Cluster jackknife over the sketch draws (samples within a draw are
  // dependent through S).
  const std::size_t n_groups =
      std::min(static_cast<std::size_t>(n_draws), kMaxJackknifeGroups);
  std::vector<OracleReport> leave_out;
  leave_out.reserve(n_groups);
  for (std::size_t g = 0; g < n_groups; ++g) {
    std::vector<const DrawSums*> rest;
    rest.reserve(all.size());
    double count = 0.0;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (i * n_groups / all.size() == g) continue;
      rest.push_back(all[i]);
      count += static_cast<double>(n_noise);
    }
    if (!rest.empty() && count >= 2.0) leave_out.push_back(reduce(rest, count));
  }

  full.se_mean_beta = Vector::Zero(ctx.p);
  if (leave_out.size() >= 2) {
    const double scale = jackknife_scale(leave_out.size());
    const double inv_b = 1.0 / static_cast<double>(leave_out.size());
    Vector mean_beta = Vector::Zero(ctx.p);
    Matrix mean_cov = Matrix::Zero(ctx.p, ctx.p);
    double mean_mse = 0.0, mean_risk = 0.0;
    for (const auto& lo : leave_out) {
      mean_beta += lo.mean_beta;
      mean_cov += lo.cov_beta;
      mean_mse += lo.mse;
      mean_risk += lo.risk;
    }
    mean_beta *= inv_b;
    mean_cov *= inv_b;
    mean_mse *= inv_b;
    mean_risk *= inv_b;
    Vector ss_beta = Vector::Zero(ctx.p);
    double ss_cov = 0.0, ss_mse = 0.0, ss_risk = 0.0;
    for (const auto& lo : leave_out) {
      ss_beta += (lo.mean_beta - mean_beta).cwiseAbs2();
      ss_cov += std::pow(linalg::spectral_norm(lo.cov_beta - mean_cov), 2);
      ss_mse += std::pow(lo.mse - mean_mse, 2);
      ss_risk += std::pow(lo.risk - mean_risk, 2);
    }
    full.se_mean_beta = (scale * ss_beta).cwiseSqrt();
    full.se_cov = std::sqrt(scale * ss_cov);
    full.se_mse = std::sqrt(scale * ss_mse);
    full.se_risk = std::sqrt(scale * ss_risk);
  }
  return full;
}

BoundReport structural_bounds(const DesignData& data, const ExactFit& fit,
                              const SketchedFit& sfit, const ProjectorSet& proj) {
  BoundReport b;
  const double slack = 1e-9;
  const double y_norm = (fit.y_hat + fit.residual).norm();
  const double beta_norm = fit.beta_hat.norm();
  const double yhat_norm = fit.y_hat.norm();
  const double sigma_max = data.svd().sigma(0);
  const double dev = proj.dev_p_px;
  b.cos_theta = fit.cos_theta;

  if (beta_norm > 0.0) {
    b.solution_applicable = true;
    b.lhs_solution = (sfit.beta_tilde - fit.beta_hat).norm() / beta_norm;
    b.rhs_solution_tight = fit.kappa_x * y_norm / (sigma_max * beta_norm) * dev;
    b.solution_holds = b.lhs_solution <= b.rhs_solution_tight * (1.0 + slack) + 1e-12;
    if (b.cos_theta > 0.0 && b.cos_theta < 1.0) {
      b.rhs_solution_cos = fit.kappa_x * dev / b.cos_theta;
      b.solution_holds =
          b.solution_holds && b.lhs_solution <= b.rhs_solution_cos * (1.0 + slack) + 1e-12;
    }
  }

  if (yhat_norm > 0.0) {
    b.prediction_applicable = true;
    b.lhs_prediction = (sfit.y_tilde - fit.y_hat).norm() / yhat_norm;
    b.rhs_prediction = dev / b.cos_theta;  // cos_theta = 1 when y lies in range(X)
    b.prediction_holds = b.lhs_prediction <= b.rhs_prediction * (1.0 + slack) + 1e-12;
  }

  const double res_norm = fit.residual.norm();
  if (y_norm > 0.0 && res_norm > 0.0 && beta_norm > 0.0) {
    b.gamma = yhat_norm / y_norm;
    b.eta = sfit.residual_tilde.norm() / res_norm - 1.0;
    if (b.gamma > 0.0 && b.eta >= 0.0) {
      b.comparison_applicable = true;
      b.comparison_rhs =
          fit.kappa_x * std::sqrt(1.0 / (b.gamma * b.gamma) - 1.0) * std::sqrt(b.eta);
      b.comparison_holds = b.lhs_solution <= b.comparison_rhs * (1.0 + slack) + 1e-12;
    }
  }
  return b;
}

}  // namespace sketchuq
