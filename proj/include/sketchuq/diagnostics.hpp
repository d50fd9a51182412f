#pragma once

#include <cstdint>

#include "sketchuq/model.hpp"
#include "sketchuq/sketch.hpp"
#include "sketchuq/types.hpp"

namespace sketchuq {

// Per-draw sketching diagnostic: the rank-preservation indicator via the
// condition number of the bias projector, and the relative errors of the
// sketched solution/prediction against the exact fit on the same data.
struct DiagnosticRecord {
  double kappa_p0 = 1.0;      // 1 when rank(SX) = p, +infinity otherwise
  double sigma_min_p0 = 0.0;  // raw smallest singular value of P0
  bool rank_preserved = false;
  Index rank_sx = 0;
  double rel_err_beta = 0.0;
  double rel_err_pred = 0.0;
  bool abs_err_fallback = false;  // reference norm was zero; absolute errors reported
  SchemeKind scheme = SchemeKind::uniform_sampling;
  Index r = 0;
  std::uint64_t replicate_seed = 0;
};

DiagnosticRecord diagnose(const DesignData& data, const SketchDraw& draw, const ExactFit& fit);

struct RankPreservationEstimate {
  double p_hat = 0.0;
  double std_err = 0.0;  // binomial sqrt(p(1-p)/N)
  Index n_replicates = 0;
};

RankPreservationEstimate rank_preservation_probability(const DesignData& data,
                                                       const SketchScheme& scheme,
                                                       Index n_replicates, std::uint64_t seed,
                                                       int threads = 1);

}  // namespace sketchuq
