#include "sketchuq/json_io.hpp"

#include <cmath>

namespace sketchuq {

json scalar_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json matrix_json(const Matrix& m) {
  json data = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(scalar_json(m(i, j)));
    data.push_back(std::move(row));
  }
  return json{{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

json vector_json(const Vector& v) {
  json data = json::array();
  for (Index i = 0; i < v.size(); ++i) data.push_back(scalar_json(v(i)));
  return json{{"shape", {v.size()}}, {"data", std::move(data)}};
}

json solve_json(const ExactFit& fit) {
  json out;
  out["betaHat"] = vector_json(fit.beta_hat);
  out["residualNorm"] = scalar_json(fit.residual.norm());
  out["cosTheta"] = scalar_json(fit.cos_theta);
  out["kappaX"] = scalar_json(fit.kappa_x);
  return out;
}

json diagnostic_json(const DiagnosticRecord& rec) {
  json out;
  out["scheme"] = to_string(rec.scheme);
  out["r"] = rec.r;
  out["seed"] = rec.replicate_seed;
  out["kappaP0"] = scalar_json(rec.kappa_p0);
  out["sigmaMinP0"] = scalar_json(rec.sigma_min_p0);
  out["rankPreserved"] = rec.rank_preserved;
  out["rankSX"] = rec.rank_sx;
  out["relErrBeta"] = scalar_json(rec.rel_err_beta);
  out["relErrPred"] = scalar_json(rec.rel_err_pred);
  out["absErrFallback"] = rec.abs_err_fallback;
  return out;
}

json bound_json(const BoundReport& rep) {
  json out;
  out["cosTheta"] = scalar_json(rep.cos_theta);
  out["solution"] = {{"applicable", rep.solution_applicable},
                     {"holds", rep.solution_holds},
                     {"lhs", scalar_json(rep.lhs_solution)},
                     {"rhsTight", scalar_json(rep.rhs_solution_tight)},
                     {"rhsCos", scalar_json(rep.rhs_solution_cos)}};
  out["prediction"] = {{"applicable", rep.prediction_applicable},
                       {"holds", rep.prediction_holds},
                       {"lhs", scalar_json(rep.lhs_prediction)},
                       {"rhs", scalar_json(rep.rhs_prediction)}};
  out["comparison"] = {{"applicable", rep.comparison_applicable},
                       {"holds", rep.comparison_holds},
                       {"gamma", scalar_json(rep.gamma)},
                       {"eta", scalar_json(rep.eta)},
                       {"rhs", scalar_json(rep.comparison_rhs)}};
  return out;
}

json total_moments_json(const TotalMoments& tm) {
  json out;
  out["meanP0"] = matrix_json(tm.mean_p0);
  if (tm.mean_ppt) out["meanPPt"] = matrix_json(*tm.mean_ppt);
  out["varP0Beta"] = matrix_json(tm.var_p0_beta);
  out["totalMean"] = vector_json(tm.total_mean);
  out["totalVar"] = matrix_json(tm.total_var);
  out["nDraws"] = tm.n_draws;
  out["mcStdErr"] = scalar_json(tm.mc_std_err);
  out["seTotalMean"] = vector_json(tm.se_total_mean);
  out["seMeanP0"] = scalar_json(tm.se_mean_p0);
  return out;
}

json decomposition_json(const DecompositionReport& dr) {
  json out;
  out["excessBias"] = vector_json(dr.excess_bias);
  out["excessVarProj"] = matrix_json(dr.excess_var_proj);
  out["excessVarRank"] = matrix_json(dr.excess_var_rank);
  out["mseTotal"] = scalar_json(dr.mse_total);
  out["mseModel"] = scalar_json(dr.mse_model);
  out["mseExcess"] = scalar_json(dr.mse_excess);
  out["riskTotal"] = scalar_json(dr.risk_total);
  out["riskModel"] = scalar_json(dr.risk_model);
  out["riskExcessVar"] = scalar_json(dr.risk_excess_var);
  out["riskExcessBias"] = scalar_json(dr.risk_excess_bias);
  out["rankConditioned"] = dr.rank_conditioned;
  out["rejectionRate"] = scalar_json(dr.rejection_rate);
  out["nDrawsUsed"] = dr.n_draws_used;
  out["mcStdErr"] = scalar_json(dr.mc_std_err);
  out["seMse"] = scalar_json(dr.se_mse);
  out["seRisk"] = scalar_json(dr.se_risk);
  out["seTraceExcess"] = scalar_json(dr.se_trace_excess);
  out["seRiskExcess"] = scalar_json(dr.se_risk_excess);
  out["seTotalMean"] = vector_json(dr.se_total_mean);
  return out;
}

json oracle_json(const OracleReport& oracle) {
  json out;
  out["meanBeta"] = vector_json(oracle.mean_beta);
  out["covBeta"] = matrix_json(oracle.cov_beta);
  out["mse"] = scalar_json(oracle.mse);
  out["risk"] = scalar_json(oracle.risk);
  out["nDraws"] = oracle.n_draws;
  out["nNoise"] = oracle.n_noise;
  out["seMeanBeta"] = vector_json(oracle.se_mean_beta);
  out["seCov"] = scalar_json(oracle.se_cov);
  out["seMse"] = scalar_json(oracle.se_mse);
  out["seRisk"] = scalar_json(oracle.se_risk);
  return out;
}

json uq_json(const UqMetadata& meta, const TotalMoments& tm, const DecompositionReport& dr,
             const OracleReport* oracle) {
  json out;
  out["scheme"] = to_string(meta.scheme);
  out["r"] = meta.r;
  out["seed"] = meta.seed;
  out["nDraws"] = meta.n_draws;
  out["sigma2"] = scalar_json(meta.sigma2);
  out["rankTolFactor"] = scalar_json(meta.rank_tol_factor);
  out["totalMoments"] = total_moments_json(tm);
  out["decomposition"] = decomposition_json(dr);
  if (oracle) {
    out["oracle"] = oracle_json(*oracle);
    json agree;
    agree["mseDiff"] = scalar_json(oracle->mse - dr.mse_total);
    agree["mseCombinedSe"] =
        scalar_json(std::sqrt(oracle->se_mse * oracle->se_mse + dr.se_mse * dr.se_mse));
    agree["riskDiff"] = scalar_json(oracle->risk - dr.risk_total);
    agree["riskCombinedSe"] =
        scalar_json(std::sqrt(oracle->se_risk * oracle->se_risk + dr.se_risk * dr.se_risk));
    out["agreement"] = std::move(agree);
  }
  return out;
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;
  try {
    if (j.contains("schemes")) {
      cfg.schemes.clear();
      for (const auto& s : j.at("schemes")) {
        const auto kind = scheme_from_string(s.get<std::string>());
        require(kind.has_value(), errc::invalid_config,
                "unknown scheme '" + s.get<std::string>() + "'");
        cfg.schemes.push_back(*kind);
      }
    }
    if (j.contains("r_grid")) {
      const auto& rg = j.at("r_grid");
      cfg.r_grid.clear();
      if (rg.is_array()) {
        for (const auto& v : rg) cfg.r_grid.push_back(v.get<Index>());
      } else {
        const Index lo = rg.at("min").get<Index>();
        const Index hi = rg.at("max").get<Index>();
        const Index step = get_or<Index>(rg, "step", 5);
        require(step >= 1, errc::invalid_config, "r_grid step must be >= 1");
        for (Index r = lo; r <= hi; r += step) cfg.r_grid.push_back(r);
      }
    }
    cfg.n_replicates = get_or<Index>(j, "replicates", cfg.n_replicates);
    cfg.master_seed = get_or<std::uint64_t>(j, "seed", cfg.master_seed);
    if (j.contains("synthetic")) {
      const auto& s = j.at("synthetic");
      SyntheticConfig syn;
      syn.n = get_or<Index>(s, "n", syn.n);
      syn.p = get_or<Index>(s, "p", syn.p);
      syn.coherence = get_or<double>(s, "coherence", syn.coherence);
      syn.sigma2 = get_or<double>(s, "sigma2", syn.sigma2);
      syn.beta_sparsity = get_or<double>(s, "beta_sparsity", syn.beta_sparsity);
      cfg.synthetic = syn;
    }
    if (j.contains("csv")) {
      const auto& c = j.at("csv");
      cfg.x_csv = c.at("x").get<std::string>();
      cfg.y_csv = c.at("y").get<std::string>();
      cfg.csv_header = get_or<bool>(c, "header", false);
    }
    if (j.contains("output")) {
      const auto& o = j.at("output");
      cfg.out_raw = get_or<std::string>(o, "raw", cfg.out_raw);
      cfg.out_summary = get_or<std::string>(o, "summary", cfg.out_summary);
    }
    cfg.threads = get_or<int>(j, "threads", cfg.threads);
    cfg.deterministic = get_or<bool>(j, "deterministic", cfg.deterministic);
    cfg.rank_tol_factor = get_or<double>(j, "rank_tol_factor", cfg.rank_tol_factor);
  } catch (const json::exception& e) {
    fail(errc::parse_error, std::string("experiment config: ") + e.what());
  }
  return cfg;
}

}  // namespace sketchuq
