#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "sketchuq/model.hpp"
#include "sketchuq/projector.hpp"
#include "sketchuq/sketch.hpp"
#include "sketchuq/types.hpp"

namespace sketchuq {

// Moments of the sketched solution conditioned on one realized S.
struct ConditionalMoments {
  Vector cond_mean;        // P0 beta0
  Matrix cond_var;         // sigma^2 (X†P)(X†P)^T
  Matrix cond_var_excess;  // sigma^2 X†(PP^T - Px)(X†)^T
};

ConditionalMoments conditional_moments(const DesignData& data, const ModelSpec& spec,
                                       const SketchDraw& draw);

// Monte-Carlo estimates of the total (noise + sketch) moments. Standard
// errors are delete-a-group jackknife estimates over the sketch draws;
// matrix-valued quantities are measured in the spectral norm.
struct TotalMoments {
  Matrix mean_p0;                  // estimate of E_S[P0]
  std::optional<Matrix> mean_ppt;  // estimate of E_S[P P^T], formed for n <= cap
  Matrix var_p0_beta;              // unbiased sample covariance of P0 beta0
  Vector total_mean;
  Matrix total_var;
  Index n_draws = 0;
  double mc_std_err = 0.0;  // jackknife se of total_var (spectral norm)
  Vector se_total_mean;     // per-coordinate jackknife se
  double se_mean_p0 = 0.0;  // jackknife se of mean_p0 (spectral norm)
};

// Bias/variance/MSE/predictive-risk decomposition of the total uncertainty.
// When rank_conditioned, draws with rank(SX) < p are rejected and the
// simplified rank-preserving forms are assembled.
struct DecompositionReport {
  Vector excess_bias;      // (E[P0] - I) beta0
  Matrix excess_var_proj;  // sigma^2 X†(E[PP^T] - Px)(X†)^T
  Matrix excess_var_rank;  // Var_S[P0 beta0]
  double mse_total = 0.0;
  double mse_model = 0.0;
  double mse_excess = 0.0;
  double risk_total = 0.0;
  double risk_model = 0.0;
  double risk_excess_var = 0.0;
  double risk_excess_bias = 0.0;  // E_S ||X (I - P0) beta0||^2
  bool rank_conditioned = false;
  double rejection_rate = 0.0;
  Index n_draws_used = 0;
  // jackknife standard errors for the statistical assertions downstream
  double mc_std_err = 0.0;  // se of total_var (spectral norm)
  double se_mse = 0.0;
  double se_risk = 0.0;
  double se_trace_excess = 0.0;
  double se_risk_excess = 0.0;
  Vector se_total_mean;
};

struct UqResult {
  TotalMoments moments;
  DecompositionReport report;
};

// Supplies the sketch for each Monte-Carlo replicate.
using DrawProvider = std::function<SketchDraw(Index replicate)>;

DrawProvider scheme_draw_provider(const SketchScheme& scheme, const DesignData& data,
                                  std::uint64_t seed);

UqResult run_uq(const DesignData& data, const ModelSpec& spec, const DrawProvider& provider,
                Index n_draws, bool rank_conditioned,
                Index materialize_cap = kDefaultMaterializeCap, int threads = 1);

TotalMoments total_moments(const DesignData& data, const ModelSpec& spec,
                           const SketchScheme& scheme, Index n_draws, std::uint64_t seed,
                           int threads = 1);

DecompositionReport decompose(const DesignData& data, const ModelSpec& spec,
                              const SketchScheme& scheme, Index n_draws, std::uint64_t seed,
                              bool rank_conditioned, int threads = 1);

// Brute-force verification path: estimates every moment by the double loop
// over sketches and noise realizations, using only beta_tilde = (SX)† S y.
// Standard errors are cluster jackknife estimates over the sketch draws.
struct OracleReport {
  Vector mean_beta;
  Matrix cov_beta;  // unbiased over all draw x noise samples
  double mse = 0.0;
  double risk = 0.0;
  Index n_draws = 0;
  Index n_noise = 0;
  Vector se_mean_beta;
  double se_cov = 0.0;  // spectral norm
  double se_mse = 0.0;
  double se_risk = 0.0;
};

OracleReport empirical_oracle(const DesignData& data, const ModelSpec& spec,
                              const SketchScheme& scheme, Index n_noise, Index n_draws,
                              std::uint64_t seed, int threads = 1);
OracleReport empirical_oracle(const DesignData& data, const ModelSpec& spec,
                              const DrawProvider& provider, Index n_noise, Index n_draws,
                              std::uint64_t seed, int threads = 1);

// Structural relative-error bounds for one draw: the projector-deviation
// bounds on the solution and prediction, plus the gamma/eta comparison bound
// evaluated from the realized quantities when its hypotheses hold.
struct BoundReport {
  double cos_theta = 1.0;
  double lhs_solution = 0.0;
  double rhs_solution_tight = 0.0;  // kappa * (||y|| / (||X|| ||beta_hat||)) * ||P-Px||
  double rhs_solution_cos = 0.0;    // kappa * ||P-Px|| / cos(theta)
  bool solution_applicable = false;
  bool solution_holds = false;
  double lhs_prediction = 0.0;
  double rhs_prediction = 0.0;  // ||P-Px|| / cos(theta)
  bool prediction_applicable = false;
  bool prediction_holds = false;
  double gamma = 0.0;  // ||Px y|| / ||y||
  double eta = 0.0;    // ||residual_tilde|| / ||residual|| - 1
  double comparison_rhs = 0.0;  // kappa * sqrt(gamma^-2 - 1) * sqrt(eta)
  bool comparison_applicable = false;
  bool comparison_holds = false;
};

BoundReport structural_bounds(const DesignData& data, const ExactFit& fit,
                              const SketchedFit& sfit, const ProjectorSet& proj);

}  // namespace sketchuq
