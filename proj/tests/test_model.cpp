#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sketchuq/model.hpp"

using namespace sketchuq;
using namespace sketchuq::testing;

TEST_CASE("design construction enforces its invariants") {
  Matrix deficient(3, 2);
  deficient << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(DesignData(deficient, Vector::Ones(3)), error);

  Matrix wide(2, 3);
  wide << 1, 0, 0, 0, 1, 0;
  CHECK_THROWS_AS(DesignData(wide, Vector::Ones(2)), error);

  Matrix ok(3, 2);
  ok << 1, 0, 0, 1, 0, 0;
  CHECK_THROWS_AS(DesignData(ok, Vector::Ones(2)), error);  // length mismatch

  Matrix bad = ok;
  bad(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(DesignData(bad, Vector::Ones(3)), error);
}

TEST_CASE("simulate_response is deterministic and near-exact at vanishing noise") {
  Matrix x(4, 2);
  x << 1, 0, 0, 1, 1, 1, 2, -1;
  ModelSpec spec;
  spec.beta0 = canonical_beta0();
  spec.sigma2 = 1e-30;
  const Vector y1 = simulate_response(x, spec, 99);
  const Vector y2 = simulate_response(x, spec, 99);
  CHECK(y1 == y2);
  CHECK((y1 - x * spec.beta0).cwiseAbs().maxCoeff() < 1e-10);

  spec.sigma2 = 1.0;
  CHECK(simulate_response(x, spec, 1) != simulate_response(x, spec, 2));

  ModelSpec mismatched;
  mismatched.beta0 = Vector::Ones(3);
  mismatched.sigma2 = 1.0;
  CHECK_THROWS_AS(simulate_response(x, mismatched, 0), error);
}

TEST_CASE("simulated noise has the right first two moments") {
  const Index n_draws = 100000;
  const Matrix x = Matrix::Identity(2, 2);
  ModelSpec spec;
  spec.beta0 = canonical_beta0();
  spec.sigma2 = 0.49;
  const double sigma = std::sqrt(spec.sigma2);

  Vector mean = Vector::Zero(2);
  double sumsq = 0.0;
  for (Index d = 0; d < n_draws; ++d) {
    const Vector eps = simulate_response(x, spec, 1000 + static_cast<std::uint64_t>(d)) -
                       x * spec.beta0;
    mean += eps;
    sumsq += eps.squaredNorm();
  }
  mean /= static_cast<double>(n_draws);
  const double var = sumsq / static_cast<double>(2 * n_draws);

  const double mean_tol = 4.0 * sigma / std::sqrt(static_cast<double>(n_draws));
  CHECK(std::abs(mean(0)) <= mean_tol);
  CHECK(std::abs(mean(1)) <= mean_tol);
  CHECK(var == doctest::Approx(spec.sigma2).epsilon(0.05));
}

TEST_CASE("exact solve on the canonical fixture") {
  const DesignData data = canonical_fixture();
  const ExactFit fit = exact_solve(data);
  CHECK(fit.beta_hat.isApprox(canonical_beta0(), 1e-14));
  Vector yhat(3);
  yhat << 1, 2, 0;
  CHECK(fit.y_hat.isApprox(yhat, 1e-14));
  CHECK((fit.y_hat + fit.residual) == data.y());
  CHECK(fit.residual(2) == doctest::Approx(3.0));
  CHECK(fit.cos_theta == doctest::Approx(std::sqrt(5.0 / 14.0)));
  CHECK(fit.kappa_x == doctest::Approx(1.0));
}

TEST_CASE("response in the column space leaves no residual") {
  Matrix x(3, 2);
  x << 1, 0, 0, 1, 0, 0;
  Vector y(3);
  y << 1, 2, 0;
  const DesignData data(x, y);
  const ExactFit fit = exact_solve(data);
  CHECK(fit.residual.norm() <= 1e-12);
  CHECK(fit.cos_theta == doctest::Approx(1.0));
}

TEST_CASE("hat matrix is an orthogonal projector and residuals are orthogonal") {
  rng::Stream stream(7);
  const DesignData data = random_design(stream, 40, 6);
  const ExactFit fit = exact_solve(data);
  REQUIRE(fit.hat_matrix.has_value());
  const Matrix& px = *fit.hat_matrix;
  CHECK(oracle_spectral_norm(px * px - px) <= 1e-10);
  CHECK(oracle_spectral_norm(px - px.transpose()) <= 1e-10);
  CHECK(oracle_spectral_norm(px) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK((data.x().transpose() * fit.residual).norm() <=
        1e-8 * oracle_spectral_norm(data.x()) * data.y().norm());
}

TEST_CASE("hat matrix is not materialized above the cap") {
  rng::Stream stream(8);
  const DesignData data = random_design(stream, 30, 3);
  const ExactFit fit = exact_solve(data, /*hat_matrix_cap=*/10);
  CHECK(!fit.hat_matrix.has_value());
  // operator application still available through the design
  const Vector hv = data.hat_apply(data.y());
  CHECK((hv - fit.y_hat).norm() <= 1e-10);
}

TEST_CASE("model variance on stated examples") {
  ModelSpec spec;
  spec.beta0 = canonical_beta0();
  spec.sigma2 = 1.0;
  const DesignData eye(Matrix::Identity(2, 2), Vector::Zero(2));
  CHECK(model_variance(eye, spec).isApprox(Matrix::Identity(2, 2), 1e-12));

  spec.sigma2 = 4.0;
  const DesignData fix = canonical_fixture();
  CHECK(model_variance(fix, spec).isApprox(4.0 * Matrix::Identity(2, 2), 1e-12));
}

TEST_CASE("model variance matches the Monte-Carlo covariance of the solution") {
  Matrix x(3, 2);
  x << 1, 1, 1, 2, 1, 3;
  ModelSpec spec;
  spec.beta0 = canonical_beta0();
  spec.sigma2 = 1.0;
  const DesignData data(x, Vector::Zero(3));
  const Matrix truth = model_variance(data, spec);

  const Index n_draws = 100000;
  Vector sum = Vector::Zero(2);
  Matrix outer = Matrix::Zero(2, 2);
  for (Index d = 0; d < n_draws; ++d) {
    const Vector y = simulate_response(x, spec, 555 + static_cast<std::uint64_t>(d));
    const Vector beta = data.pinv_apply(y);
    sum += beta;
    outer.noalias() += beta * beta.transpose();
  }
  const Vector mean = sum / static_cast<double>(n_draws);
  const Matrix cov =
      (outer - static_cast<double>(n_draws) * mean * mean.transpose()) /
      static_cast<double>(n_draws - 1);
  CHECK(oracle_spectral_norm(cov - truth) <= 0.03 * oracle_spectral_norm(truth));

  // unbiasedness, per coordinate
  const double tol = 5.0 * std::sqrt(spec.sigma2) *
                     std::sqrt(oracle_spectral_norm(data.xtx_inverse())) /
                     std::sqrt(static_cast<double>(n_draws));
  CHECK(std::abs(mean(0) - spec.beta0(0)) <= tol);
  CHECK(std::abs(mean(1) - spec.beta0(1)) <= tol);
}
