#pragma once

#include <json.hpp>

#include "sketchuq/diagnostics.hpp"
#include "sketchuq/experiment.hpp"
#include "sketchuq/model.hpp"
#include "sketchuq/uq.hpp"

namespace sketchuq {

using json = nlohmann::json;

// Matrices serialize as {"shape": [rows, cols], "data": [[...], ...]};
// vectors as {"shape": [n], "data": [...]}. Non-finite scalars render as the
// strings "inf" / "-inf" / "nan" since JSON has no literals for them.
json matrix_json(const Matrix& m);
json vector_json(const Vector& v);
json scalar_json(double v);

json solve_json(const ExactFit& fit);
json diagnostic_json(const DiagnosticRecord& rec);
json bound_json(const BoundReport& rep);

struct UqMetadata {
  SchemeKind scheme = SchemeKind::uniform_sampling;
  Index r = 0;
  std::uint64_t seed = 0;
  Index n_draws = 0;
  double sigma2 = 0.0;
  double rank_tol_factor = 1.0;
};

json total_moments_json(const TotalMoments& tm);
json decomposition_json(const DecompositionReport& dr);
json oracle_json(const OracleReport& oracle);
json uq_json(const UqMetadata& meta, const TotalMoments& tm, const DecompositionReport& dr,
             const OracleReport* oracle = nullptr);

// Parses the experiment config schema documented in the README.
ExperimentConfig experiment_config_from_json(const json& j);

}  // namespace sketchuq
