// sketchuq command-line front end.
//
// Subcommands: solve, sketch, diagnose, uq, experiment. JSON goes to stdout,
// CSV outputs to files, logs to stderr. Exit codes: 0 success, 2 precondition
// violation, 3 input parse error, 4 internal/numerical failure.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "sketchuq/rng.hpp"

#include "sketchuq/csv.hpp"
#include "sketchuq/diagnostics.hpp"
#include "sketchuq/experiment.hpp"
#include "sketchuq/json_io.hpp"
#include "sketchuq/model.hpp"
#include "sketchuq/parallel.hpp"
#include "sketchuq/projector.hpp"
#include "sketchuq/sketch.hpp"
#include "sketchuq/uq.hpp"

namespace {

using namespace sketchuq;

struct SeedOptions {
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool from_entropy = false;
};

void add_seed_options(CLI::App* cmd, SeedOptions& opts) {
  cmd->add_option("--seed", opts.seed, "master seed (64-bit unsigned)")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_flag("--seed-from-entropy", opts.from_entropy,
                "draw the master seed from the OS entropy source");
}

std::uint64_t resolve_seed(const SeedOptions& opts) {
  if (opts.seed_set) return opts.seed;
  require(opts.from_entropy, errc::invalid_input,
          "--seed is required (or pass --seed-from-entropy)");
  std::random_device rd;
  const std::uint64_t hi = rd();
  const std::uint64_t lo = rd();
  const std::uint64_t seed = (hi << 32) ^ lo;
  std::cerr << "seed-from-entropy: " << seed << "\n";
  return seed;
}

SchemeKind parse_scheme(const std::string& name) {
  const auto kind = scheme_from_string(name);
  require(kind.has_value(), errc::invalid_input,
          "unknown scheme '" + name + "' (expected unif, lev, norm, or identity)");
  return *kind;
}

DesignData load_design(const std::string& x_path, const std::string& y_path, bool header,
                       double rank_tol_factor) {
  Matrix x = read_matrix_csv(x_path, header);
  Vector y = read_vector_csv(y_path, header);
  return DesignData(std::move(x), std::move(y), rank_tol_factor);
}

int run(int argc, char** argv) {
  CLI::App app{"sketched linear regression: solvers, projector diagnostics, and "
               "uncertainty quantification"};
  app.require_subcommand(1);

  // ---- solve ----
  std::string x_path, y_path;
  bool header = false;
  double rank_tol_factor = 1.0;
  auto* solve = app.add_subcommand("solve", "exact least-squares fit from CSV data");
  solve->add_option("--x", x_path, "design matrix CSV")->required();
  solve->add_option("--y", y_path, "response CSV (single column)")->required();
  solve->add_flag("--header", header, "skip the first CSV line");
  solve->add_option("--rank-tol-factor", rank_tol_factor,
                    "scale on the SVD rank cutoff (default 1.0)");

  // ---- sketch / diagnose ----
  std::string scheme_name = "unif";
  Index r = 0;
  SeedOptions sketch_seed;
  auto* sketch_cmd =
      app.add_subcommand("sketch", "sketched solve plus diagnostics for one draw");
  auto* diagnose_cmd =
      app.add_subcommand("diagnose", "rank-preservation diagnostic for one draw");
  for (CLI::App* cmd : {sketch_cmd, diagnose_cmd}) {
    cmd->add_option("--x", x_path, "design matrix CSV")->required();
    cmd->add_option("--y", y_path, "response CSV (single column)")->required();
    cmd->add_flag("--header", header, "skip the first CSV line");
    cmd->add_option("--scheme", scheme_name, "sketching scheme: unif, lev, norm")
        ->required();
    cmd->add_option("--r", r, "sketch dimension")->required();
    cmd->add_option("--rank-tol-factor", rank_tol_factor, "scale on the SVD rank cutoff");
    add_seed_options(cmd, sketch_seed);
  }

  // ---- uq ----
  // Total-uncertainty reports need the ground truth (beta0, sigma2); this is
  // a simulation-grade subcommand.
  std::string beta0_path;
  double sigma2 = 1.0;
  Index n_draws = 1000;
  bool rank_conditioned = false;
  Index oracle_noise = 0;
  int threads = 0;
  bool deterministic = false;
  auto* uq_cmd = app.add_subcommand(
      "uq", "Monte-Carlo total uncertainty decomposition (simulation-grade: "
            "requires the true beta0 and sigma2)");
  uq_cmd->add_option("--x", x_path, "design matrix CSV")->required();
  uq_cmd->add_option("--y", y_path, "response CSV (single column)")->required();
  uq_cmd->add_flag("--header", header, "skip the first CSV line");
  uq_cmd->add_option("--beta0", beta0_path, "true coefficients CSV (single column)")
      ->required();
  uq_cmd->add_option("--sigma2", sigma2, "noise variance")->required();
  uq_cmd->add_option("--scheme", scheme_name, "sketching scheme: unif, lev, norm, identity")
      ->required();
  uq_cmd->add_option("--r", r, "sketch dimension");
  uq_cmd->add_option("--draws", n_draws, "number of Monte-Carlo sketch draws");
  uq_cmd->add_flag("--rank-conditioned", rank_conditioned,
                   "condition on rank preservation (rejection sampling)");
  uq_cmd->add_option("--oracle", oracle_noise,
                     "also run the brute-force oracle with this many noise draws per sketch");
  uq_cmd->add_option("--threads", threads, "worker threads (0 = auto, env SKETCHUQ_THREADS)");
  uq_cmd->add_flag("--deterministic", deterministic, "bit-stable output mode");
  uq_cmd->add_option("--rank-tol-factor", rank_tol_factor, "scale on the SVD rank cutoff");
  add_seed_options(uq_cmd, sketch_seed);

  // ---- experiment ----
  std::string config_path, out_raw, out_summary, schemes_csv = "unif,lev,norm";
  SyntheticConfig syn;
  Index r_min = 20, r_max = 100, r_step = 5;
  bool use_csv_data = false;
  auto* exp_cmd = app.add_subcommand(
      "experiment", "schemes x r x replicates sweep; writes raw and summary CSVs");
  exp_cmd->add_option("--config", config_path, "JSON config file (overrides other flags)");
  exp_cmd->add_option("--x", x_path, "design matrix CSV (instead of synthetic data)");
  exp_cmd->add_option("--y", y_path, "response CSV");
  exp_cmd->add_flag("--header", header, "skip the first CSV line");
  exp_cmd->add_option("--n", syn.n, "synthetic observations");
  exp_cmd->add_option("--p", syn.p, "synthetic variables");
  exp_cmd->add_option("--coherence", syn.coherence, "leverage coherence knob in [0,1]");
  exp_cmd->add_option("--sigma2", syn.sigma2, "synthetic noise variance");
  exp_cmd->add_option("--beta-sparsity", syn.beta_sparsity,
                      "fraction of dense beta0 coordinates zeroed");
  exp_cmd->add_option("--schemes", schemes_csv, "comma-separated scheme list");
  exp_cmd->add_option("--r-min", r_min, "grid start");
  exp_cmd->add_option("--r-max", r_max, "grid end (inclusive)");
  exp_cmd->add_option("--r-step", r_step, "grid step");
  Index n_replicates = 100;
  exp_cmd->add_option("--replicates", n_replicates, "replicates per grid cell");
  exp_cmd->add_option("--out-raw", out_raw, "raw records CSV path");
  exp_cmd->add_option("--out-summary", out_summary, "per-cell summary CSV path");
  exp_cmd->add_option("--threads", threads, "worker threads (0 = auto)");
  exp_cmd->add_flag("--deterministic", deterministic, "bit-stable output mode");
  exp_cmd->add_option("--rank-tol-factor", rank_tol_factor, "scale on the SVD rank cutoff");
  add_seed_options(exp_cmd, sketch_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      return app.exit(e);
    }
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (solve->parsed()) {
    const DesignData data = load_design(x_path, y_path, header, rank_tol_factor);
    const ExactFit fit = exact_solve(data);
    std::cout << solve_json(fit).dump(2) << "\n";
    return 0;
  }

  if (sketch_cmd->parsed() || diagnose_cmd->parsed()) {
    const DesignData data = load_design(x_path, y_path, header, rank_tol_factor);
    const SketchScheme scheme{parse_scheme(scheme_name), r};
    const SketchDraw draw = draw_sketch(scheme, data, resolve_seed(sketch_seed));
    const ExactFit fit = exact_solve(data);
    const DiagnosticRecord rec = diagnose(data, draw, fit);
    if (diagnose_cmd->parsed()) {
      std::cout << diagnostic_json(rec).dump(2) << "\n";
      return 0;
    }
    const SketchedFit sfit = sketched_solve(data, draw);
    json out;
    out["betaTilde"] = vector_json(sfit.beta_tilde);
    out["residualNorm"] = scalar_json(sfit.residual_tilde.norm());
    out["diagnostics"] = diagnostic_json(rec);
    std::cout << out.dump(2) << "\n";
    return 0;
  }

  if (uq_cmd->parsed()) {
    const DesignData data = load_design(x_path, y_path, header, rank_tol_factor);
    ModelSpec spec;
    spec.beta0 = read_vector_csv(beta0_path, header);
    spec.sigma2 = sigma2;
    const SchemeKind kind = parse_scheme(scheme_name);
    const SketchScheme scheme{kind, kind == SchemeKind::identity_test ? data.n() : r};
    const std::uint64_t seed = resolve_seed(sketch_seed);
    const int workers = deterministic ? 1 : resolve_threads(threads);

    const UqResult res = run_uq(data, spec, scheme_draw_provider(scheme, data, seed), n_draws,
                                rank_conditioned, kDefaultMaterializeCap, workers);
    UqMetadata meta{scheme.kind, scheme.r, seed, n_draws, sigma2, rank_tol_factor};
    if (oracle_noise > 0) {
      const OracleReport oracle = empirical_oracle(
          data, spec, scheme, oracle_noise, n_draws,
          rng::derive(seed, {0x0BACu}), workers);
      std::cout << uq_json(meta, res.moments, res.report, &oracle).dump(2) << "\n";
    } else {
      std::cout << uq_json(meta, res.moments, res.report).dump(2) << "\n";
    }
    return 0;
  }

  // experiment
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    require(in.good(), errc::io_failure, "cannot open '" + config_path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      fail(errc::parse_error, std::string("config: ") + e.what());
    }
    cfg = experiment_config_from_json(j);
    if (sketch_seed.seed_set || sketch_seed.from_entropy) cfg.master_seed = resolve_seed(sketch_seed);
  } else {
    cfg.schemes.clear();
    std::stringstream ss(schemes_csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.schemes.push_back(parse_scheme(tok));
    cfg.r_grid.clear();
    require(r_step >= 1, errc::invalid_config, "--r-step must be >= 1");
    for (Index rr = r_min; rr <= r_max; rr += r_step) cfg.r_grid.push_back(rr);
    cfg.n_replicates = n_replicates;
    cfg.master_seed = resolve_seed(sketch_seed);
    use_csv_data = !x_path.empty() || !y_path.empty();
    if (use_csv_data) {
      cfg.x_csv = x_path;
      cfg.y_csv = y_path;
      cfg.csv_header = header;
    } else {
      cfg.synthetic = syn;
    }
    if (!out_raw.empty()) cfg.out_raw = out_raw;
    if (!out_summary.empty()) cfg.out_summary = out_summary;
    cfg.threads = threads;
    cfg.deterministic = deterministic;
    cfg.rank_tol_factor = rank_tol_factor;
  }
  if (deterministic) cfg.threads = 1;

  const SweepResult result = run_sweep(cfg);

  json manifest;
  manifest["records"] = result.records.size();
  manifest["outputs"] = {{"raw", cfg.out_raw}, {"summary", cfg.out_summary}};
  json transitions = json::array();
  for (SchemeKind kind : cfg.schemes) {
    json t;
    t["scheme"] = to_string(kind);
    const auto above = first_r_above(result.summary, kind, 0.5);
    const auto drop = first_r_error_drop(result.summary, kind, 3.0);
    t["firstRAboveHalf"] = above ? json(*above) : json(nullptr);
    t["firstRErrorDrop3"] = drop ? json(*drop) : json(nullptr);
    transitions.push_back(std::move(t));
  }
  manifest["transitions"] = std::move(transitions);
  std::cout << manifest.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const sketchuq::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
