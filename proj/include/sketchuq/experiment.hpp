#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sketchuq/diagnostics.hpp"
#include "sketchuq/model.hpp"
#include "sketchuq/sketch.hpp"
#include "sketchuq/types.hpp"

namespace sketchuq {

// Synthetic Gaussian-model regression data with a leverage-coherence knob.
// coherence = 0 gives an iid Gaussian design with near-uniform leverage;
// coherence -> 1 plants large-magnitude outlier rows (which concentrate the
// leverage mass) and sparse-support columns (which uniform row sampling can
// only capture by hitting their few carrier rows).
struct SyntheticConfig {
  Index n = 2000;
  Index p = 21;
  double coherence = 0.0;       // in [0, 1]
  double sigma2 = 1e-12;
  double beta_sparsity = 0.5;   // fraction of dense coordinates of beta0 zeroed
};

struct GeneratedModel {
  DesignData data;
  ModelSpec spec;
};

GeneratedModel generate_synthetic_design(const SyntheticConfig& config, std::uint64_t seed);

struct ExperimentConfig {
  std::vector<SchemeKind> schemes = {SchemeKind::uniform_sampling,
                                     SchemeKind::leverage_sampling,
                                     SchemeKind::gaussian_projection};
  std::vector<Index> r_grid;
  Index n_replicates = 100;
  std::uint64_t master_seed = 0;
  std::optional<SyntheticConfig> synthetic;  // exactly one of synthetic / csv
  std::string x_csv;
  std::string y_csv;
  bool csv_header = false;
  std::string out_raw = "experiment_raw.csv";
  std::string out_summary = "experiment_summary.csv";
  int threads = 1;
  bool deterministic = false;  // zero the wall-time column for byte-stable reruns
  double rank_tol_factor = 1.0;
};

void validate(const ExperimentConfig& config);

struct CellSummary {
  SchemeKind scheme;
  Index r = 0;
  double pr_rank_preserved = 0.0;
  double pr_std_err = 0.0;
  double median_log10_rel_err = 0.0;
};

struct SweepResult {
  std::vector<DiagnosticRecord> records;  // scheme-major, then r, then replicate
  std::vector<std::int64_t> wall_time_us;
  std::vector<CellSummary> summary;
};

// Runs the full schemes x r-grid x replicates sweep and writes the raw and
// summary CSVs atomically. Fully deterministic given the master seed.
SweepResult run_sweep(const ExperimentConfig& config);

// Smallest grid r whose estimated rank-preservation probability exceeds the
// threshold.
std::optional<Index> first_r_above(const std::vector<CellSummary>& summary, SchemeKind scheme,
                                   double threshold);

// Smallest grid r whose median log10 relative error sits at least `decades`
// below the scheme's maximum over the grid.
std::optional<Index> first_r_error_drop(const std::vector<CellSummary>& summary,
                                        SchemeKind scheme, double decades);

}  // namespace sketchuq
