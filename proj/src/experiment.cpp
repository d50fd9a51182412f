#include "sketchuq/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "sketchuq/csv.hpp"
#include "sketchuq/parallel.hpp"
#include "sketchuq/rng.hpp"

namespace sketchuq {

namespace {

// Generator constants. The coherence knob interpolates between an iid
// Gaussian design and one where a handful of scaled-up rows carry most of the
// leverage mass while a few sparse-support columns are observable only on a
// small fraction of rows.
constexpr double kRareColsPerUnitCoherence = 2.0;
constexpr double kSupportFracLow = 0.5;     // support fraction at coherence 0
constexpr double kSupportFracHigh = 0.012;  // support fraction at coherence 1
constexpr double kOutlierRowsPerCoord = 0.7;
constexpr Index kMaxOutlierRows = 8;
constexpr double kOutlierGain = 65.0;

std::vector<Index> sample_distinct(rng::Stream& stream, Index n, Index k,
                                   const std::unordered_set<Index>& exclude) {
  std::vector<Index> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    if (exclude.find(i) == exclude.end()) pool.push_back(i);
  require(static_cast<Index>(pool.size()) >= k, errc::invalid_config,
          "not enough rows available for the synthetic construction");
  for (Index i = 0; i < k; ++i) {
    const Index j = i + static_cast<Index>(stream.below(static_cast<std::uint64_t>(
                            static_cast<std::uint64_t>(pool.size()) - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

Matrix build_design(const SyntheticConfig& cfg, rng::Stream& stream, Index& n_rare_out) {
  const Index n = cfg.n;
  const Index p = cfg.p;
  const double coh = cfg.coherence;

  Matrix x(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) x(i, j) = stream.normal();
  n_rare_out = 0;
  if (coh <= 0.0) return x;

  const Index n_rare = std::min<Index>(
      std::max<Index>(1, static_cast<Index>(std::lround(kRareColsPerUnitCoherence * coh))),
      std::max<Index>(0, p - 2));
  n_rare_out = n_rare;

  const double frac =
      std::pow(kSupportFracLow, 1.0 - coh) * std::pow(kSupportFracHigh, coh);
  const Index support = std::clamp<Index>(
      static_cast<Index>(std::lround(frac * static_cast<double>(n))), 1, n / 4);

  std::unordered_set<Index> carriers;
  for (Index j = p - n_rare; j < p; ++j) {
    x.col(j).setZero();
    const auto rows = sample_distinct(stream, n, support, {});
    for (Index i : rows) {
      const double sign = stream.uniform01() < 0.5 ? -1.0 : 1.0;
      x(i, j) = sign * (0.5 + std::abs(stream.normal()));
      carriers.insert(i);
    }
  }

  const Index n_outliers = std::min<Index>(
      std::min<Index>(kMaxOutlierRows,
                      static_cast<Index>(std::lround(kOutlierRowsPerCoord * coh *
                                                     static_cast<double>(p)))),
      n / 10);
  if (n_outliers > 0) {
    const double scale = 1.0 + coh * kOutlierGain;
    for (Index i : sample_distinct(stream, n, n_outliers, carriers)) x.row(i) *= scale;
  }
  return x;
}

Vector build_beta0(const SyntheticConfig& cfg, Index n_rare, rng::Stream& stream) {
  const Index p = cfg.p;
  const Index n_dense = p - n_rare;
  Vector beta0(p);
  for (Index j = 0; j < n_dense; ++j) beta0(j) = stream.normal();

  // Hard-threshold the dense block to the configured sparsity.
  const Index n_zero = std::min<Index>(
      n_dense - (n_rare == 0 ? 1 : 0),
      static_cast<Index>(std::floor(cfg.beta_sparsity * static_cast<double>(n_dense))));
  if (n_zero > 0) {
    std::vector<Index> idx(static_cast<std::size_t>(n_dense));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::sort(idx.begin(), idx.end(),
              [&](Index a, Index b) { return std::abs(beta0(a)) < std::abs(beta0(b)); });
    for (Index k = 0; k < n_zero; ++k) beta0(idx[static_cast<std::size_t>(k)]) = 0.0;
  }

  // Sparse-support coordinates keep O(1) magnitude so that losing them under
  // a rank-deficient sketch is visible in the solution error.
  for (Index j = n_dense; j < p; ++j) {
    const double sign = stream.uniform01() < 0.5 ? -1.0 : 1.0;
    beta0(j) = sign * (0.75 + 0.5 * std::abs(stream.normal()));
  }
  return beta0;
}

const char* kRawHeader =
    "scheme,r,replicate,seed,rank_preserved,kappa_p0,rel_err_beta,rel_err_pred,wall_time_us";
const char* kSummaryHeader = "scheme,r,pr_rank_preserved,pr_stderr,median_log10_rel_err";

}  // namespace

GeneratedModel generate_synthetic_design(const SyntheticConfig& cfg, std::uint64_t seed) {
  require(cfg.n > cfg.p && cfg.p >= 1, errc::invalid_config,
          "synthetic design requires n > p >= 1");
  require(cfg.coherence >= 0.0 && cfg.coherence <= 1.0, errc::invalid_config,
          "coherence must lie in [0, 1]");
  require(cfg.sigma2 > 0.0, errc::invalid_config, "sigma2 must be positive");
  require(cfg.beta_sparsity >= 0.0 && cfg.beta_sparsity <= 1.0, errc::invalid_config,
          "beta_sparsity must lie in [0, 1]");

  for (int attempt = 0; attempt < 5; ++attempt) {
    rng::Stream stream(rng::derive(seed, {0xDE51u, static_cast<std::uint64_t>(attempt)}));
    Index n_rare = 0;
    Matrix x = build_design(cfg, stream, n_rare);
    ModelSpec spec;
    spec.beta0 = build_beta0(cfg, n_rare, stream);
    spec.sigma2 = cfg.sigma2;
    Vector y = x * spec.beta0;
    const double sigma = std::sqrt(cfg.sigma2);
    for (Index i = 0; i < y.size(); ++i) y(i) += sigma * stream.normal();
    try {
      return GeneratedModel{DesignData(std::move(x), std::move(y)), std::move(spec)};
    } catch (const error& e) {
      if (e.code() != errc::rank_deficient_design || attempt == 4) throw;
    }
  }
  fail(errc::numerical_failure, "unreachable");
}

void validate(const ExperimentConfig& cfg) {
  require(!cfg.schemes.empty(), errc::invalid_config, "no sketching schemes configured");
  require(!cfg.r_grid.empty(), errc::invalid_config, "empty r grid");
  require(std::is_sorted(cfg.r_grid.begin(), cfg.r_grid.end()), errc::invalid_config,
          "r grid must be sorted ascending");
  require(cfg.r_grid.front() >= 1, errc::invalid_config, "r grid entries must be >= 1");
  require(cfg.n_replicates >= 1, errc::invalid_config, "n_replicates must be >= 1");
  const bool has_csv = !cfg.x_csv.empty() || !cfg.y_csv.empty();
  require(cfg.synthetic.has_value() != has_csv, errc::invalid_config,
          "configure exactly one data source (synthetic or csv)");
  if (has_csv)
    require(!cfg.x_csv.empty() && !cfg.y_csv.empty(), errc::invalid_config,
            "both --x and --y are required for csv input");
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  validate(cfg);

  std::optional<GeneratedModel> generated;
  std::optional<DesignData> loaded;
  if (cfg.synthetic) {
    generated = generate_synthetic_design(*cfg.synthetic, cfg.master_seed);
  } else {
    loaded.emplace(read_matrix_csv(cfg.x_csv, cfg.csv_header),
                   read_vector_csv(cfg.y_csv, cfg.csv_header), cfg.rank_tol_factor);
  }
  const DesignData& data = generated ? generated->data : *loaded;
  require(cfg.r_grid.back() <= data.n(), errc::invalid_config,
          "r grid exceeds the number of observations");

  const ExactFit fit = exact_solve(data, /*hat_matrix_cap=*/0);

  const Index n_schemes = static_cast<Index>(cfg.schemes.size());
  const Index n_r = static_cast<Index>(cfg.r_grid.size());
  const Index total = n_schemes * n_r * cfg.n_replicates;

  SweepResult result;
  result.records.resize(static_cast<std::size_t>(total));
  result.wall_time_us.assign(static_cast<std::size_t>(total), 0);

  parallel_for(total, resolve_threads(cfg.threads), [&](Index flat) {
    const Index si = flat / (n_r * cfg.n_replicates);
    const Index ri = (flat / cfg.n_replicates) % n_r;
    const Index rep = flat % cfg.n_replicates;
    const std::uint64_t seed =
        rng::derive(cfg.master_seed, {static_cast<std::uint64_t>(si),
                                      static_cast<std::uint64_t>(ri),
                                      static_cast<std::uint64_t>(rep)});
    const auto t0 = std::chrono::steady_clock::now();
    const SketchScheme scheme{cfg.schemes[static_cast<std::size_t>(si)],
                              cfg.r_grid[static_cast<std::size_t>(ri)]};
    const SketchDraw draw = draw_sketch(scheme, data, seed);
    result.records[static_cast<std::size_t>(flat)] = diagnose(data, draw, fit);
    const auto t1 = std::chrono::steady_clock::now();
    result.wall_time_us[static_cast<std::size_t>(flat)] =
        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
  });

  result.summary.reserve(static_cast<std::size_t>(n_schemes * n_r));
  for (Index si = 0; si < n_schemes; ++si) {
    for (Index ri = 0; ri < n_r; ++ri) {
      CellSummary cell;
      cell.scheme = cfg.schemes[static_cast<std::size_t>(si)];
      cell.r = cfg.r_grid[static_cast<std::size_t>(ri)];
      std::vector<double> logs;
      logs.reserve(static_cast<std::size_t>(cfg.n_replicates));
      Index hits = 0;
      for (Index rep = 0; rep < cfg.n_replicates; ++rep) {
        const auto& rec =
            result.records[static_cast<std::size_t>((si * n_r + ri) * cfg.n_replicates + rep)];
        if (rec.rank_preserved) ++hits;
        logs.push_back(std::log10(std::max(rec.rel_err_beta, 1e-300)));
      }
      const double n_rep = static_cast<double>(cfg.n_replicates);
      cell.pr_rank_preserved = static_cast<double>(hits) / n_rep;
      cell.pr_std_err =
          std::sqrt(cell.pr_rank_preserved * (1.0 - cell.pr_rank_preserved) / n_rep);
      std::sort(logs.begin(), logs.end());
      const std::size_t m = logs.size();
      cell.median_log10_rel_err =
          (m % 2 == 1) ? logs[m / 2] : 0.5 * (logs[m / 2 - 1] + logs[m / 2]);
      result.summary.push_back(cell);
    }
  }

  std::ostringstream raw;
  raw << kRawHeader << '\n';
  for (Index flat = 0; flat < total; ++flat) {
    const auto& rec = result.records[static_cast<std::size_t>(flat)];
    const Index rep = flat % cfg.n_replicates;
    raw << to_string(rec.scheme) << ',' << rec.r << ',' << rep << ',' << rec.replicate_seed
        << ',' << (rec.rank_preserved ? 1 : 0) << ','
        << (rec.rank_preserved ? "1" : "inf") << ',' << format_double(rec.rel_err_beta)
        << ',' << format_double(rec.rel_err_pred) << ','
        << (cfg.deterministic ? 0 : result.wall_time_us[static_cast<std::size_t>(flat)])
        << '\n';
  }
  write_file_atomic(cfg.out_raw, raw.str());

  std::ostringstream sum;
  sum << kSummaryHeader << '\n';
  for (const auto& cell : result.summary) {
    sum << to_string(cell.scheme) << ',' << cell.r << ','
        << format_double(cell.pr_rank_preserved) << ',' << format_double(cell.pr_std_err)
        << ',' << format_double(cell.median_log10_rel_err) << '\n';
  }
  write_file_atomic(cfg.out_summary, sum.str());
  return result;
}

std::optional<Index> first_r_above(const std::vector<CellSummary>& summary, SchemeKind scheme,
                                   double threshold) {
  for (const auto& cell : summary)
    if (cell.scheme == scheme && cell.pr_rank_preserved > threshold) return cell.r;
  return std::nullopt;
}

std::optional<Index> first_r_error_drop(const std::vector<CellSummary>& summary,
                                        SchemeKind scheme, double decades) {
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& cell : summary)
    if (cell.scheme == scheme) peak = std::max(peak, cell.median_log10_rel_err);
  for (const auto& cell : summary)
    if (cell.scheme == scheme && cell.median_log10_rel_err <= peak - decades) return cell.r;
  return std::nullopt;
}

}  // namespace sketchuq
