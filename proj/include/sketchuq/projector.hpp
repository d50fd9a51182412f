#pragma once

#include <optional>

#include "sketchuq/linalg.hpp"
#include "sketchuq/model.hpp"
#include "sketchuq/sketch.hpp"
#include "sketchuq/types.hpp"

namespace sketchuq {

struct PowerIterMeta {
  double tol = 1e-6;
  int max_iter = 500;
  bool converged = true;
};

// Projector family for one draw:
//   P  = X (SX)† S   oblique projector of the sketched problem (n x n),
//   P0 = (SX)† (SX)  orthogonal bias projector (p x p),
// plus the deviation norms that drive the structural and moment bounds.
// P factors as X * xdag_p with xdag_p = X† P = (SX)† S; the full n x n matrix
// is formed only when n <= materialize_cap, otherwise the deviation norms are
// estimated by power iteration on the implicit operators.
struct ProjectorSet {
  Matrix p0;              // p x p
  Matrix xdag_p;          // p x n
  Index rank_sx = 0;
  double dev_p_px = 0.0;    // ||P - Px||_2
  double dev_ppt_px = 0.0;  // ||P P^T - Px||_2
  double dev_p0 = 0.0;      // ||I - P0||_2
  std::optional<Matrix> p;  // n x n, when materialized
  std::optional<PowerIterMeta> power_iter;  // set when the norms were iterative
};

ProjectorSet build_projectors(const DesignData& data, const SketchDraw& draw,
                              Index materialize_cap = kDefaultMaterializeCap,
                              linalg::PowerIterOptions opts = {});

// Minimum-norm sketched solution and its prediction/residual on the original
// problem. Solving verifies the identity (SX)† S y = X† P y = beta_hat +
// X†(P - Px) y across independent evaluation routes.
struct SketchedFit {
  Vector beta_tilde;
  Vector y_tilde;
  Vector residual_tilde;
};

SketchedFit sketched_solve(const DesignData& data, const SketchDraw& draw);

// Verifies null(P) = null(X^T S^T S) both ways via SVD null-space bases.
// Dense check, intended for moderate n.
bool null_space_check(const DesignData& data, const SketchDraw& draw, double tol = 1e-8);

}  // namespace sketchuq
