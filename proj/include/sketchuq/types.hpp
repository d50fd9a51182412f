#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sketchuq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// n x n projector-like matrices are only formed explicitly below this size;
// above it, operators are applied through their factors.
inline constexpr Index kDefaultMaterializeCap = 5000;

enum class errc {
  invalid_input,
  dimension_mismatch,
  rank_deficient_design,
  invalid_sketch_dim,
  insufficient_draws,
  all_draws_rank_deficient,
  invalid_config,
  parse_error,
  numerical_failure,
  io_failure,
};

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

  // Process exit code contract: 2 precondition violation, 3 input parse
  // error, 4 internal/numerical failure.
  int exit_code() const noexcept {
    switch (code_) {
      case errc::parse_error:
        return 3;
      case errc::numerical_failure:
      case errc::io_failure:
        return 4;
      default:
        return 2;
    }
  }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace sketchuq
