#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "sketchuq/linalg.hpp"

using namespace sketchuq;
using namespace sketchuq::testing;

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

TEST_CASE("pinv on identity and orthonormal columns") {
  CHECK(linalg::pinv(Matrix::Identity(2, 2)).isApprox(Matrix::Identity(2, 2), 1e-14));

  Matrix x(3, 2);
  x << 1, 0, 0, 1, 0, 0;
  Matrix expected(2, 3);
  expected << 1, 0, 0, 0, 1, 0;
  CHECK(linalg::pinv(x).isApprox(expected, 1e-14));
}

TEST_CASE("pinv of a rank-1 matrix matches the SVD oracle") {
  Matrix a(2, 2);
  a << 1, 1, 1, 1;
  const Matrix got = linalg::pinv(a);
  Matrix expected(2, 2);
  expected << 0.25, 0.25, 0.25, 0.25;
  CHECK((got - expected).norm() <= 1e-14);
  CHECK((got - oracle_pinv(a)).norm() <= 1e-14);

  // the four Penrose identities
  CHECK((a * got * a - a).norm() <= 1e-13);
  CHECK((got * a * got - got).norm() <= 1e-13);
  CHECK((a * got - (a * got).transpose()).norm() <= 1e-13);
  CHECK((got * a - (got * a).transpose()).norm() <= 1e-13);
}

TEST_CASE("pinv rejects non-finite input") {
  Matrix a(1, 2);
  a << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(linalg::pinv(a), error);
}

TEST_CASE("Penrose identities on random matrices") {
  rng::Stream stream(91);
  for (const auto [n, p] : {std::pair<Index, Index>{200, 50}, {60, 60}, {7, 31}}) {
    Matrix a = random_matrix(stream, n, p);
    const Matrix ap = linalg::pinv(a);
    const double na = oracle_spectral_norm(a);
    const double nap = oracle_spectral_norm(ap);
    CHECK(oracle_spectral_norm(a * ap * a - a) <= 1e3 * kEps * na);
    CHECK(oracle_spectral_norm(ap * a * ap - ap) <= 1e3 * kEps * nap);
    CHECK(oracle_spectral_norm(a * ap - (a * ap).transpose()) <= 1e3 * kEps);
    CHECK(oracle_spectral_norm(ap * a - (ap * a).transpose()) <= 1e3 * kEps);
  }
}

TEST_CASE("numerical rank on stated examples") {
  CHECK(linalg::numerical_rank(Matrix::Identity(3, 3)) == 3);

  Matrix x(3, 2);
  x << 1, 0, 0, 1, 0, 0;
  CHECK(linalg::numerical_rank(x) == 2);

  Matrix outer(2, 2);
  outer << 1, 2, 2, 4;  // rank-1 outer product
  CHECK(linalg::numerical_rank(outer) == 1);
  Eigen::JacobiSVD<Matrix> svd(outer);
  const double tol = linalg::rank_tolerance(2, 2, svd.singularValues()(0));
  CHECK(svd.singularValues()(1) < tol);
}

TEST_CASE("numerical rank is invariant under row permutation and scaling") {
  rng::Stream stream(17);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix a = random_matrix(stream, 12, 5);
    a.col(4) = 2.0 * a.col(1) - a.col(0);  // force rank 4
    const Index rank = linalg::numerical_rank(a);
    CHECK(rank == 4);

    Matrix permuted = a;
    permuted.row(0).swap(permuted.row(7));
    permuted.row(3).swap(permuted.row(11));
    CHECK(linalg::numerical_rank(permuted) == rank);

    for (double c : {1e-7, -3.0, 2.5e9}) CHECK(linalg::numerical_rank(c * a) == rank);
  }
}

TEST_CASE("cond2 on stated examples") {
  CHECK(linalg::cond2(Matrix::Identity(5, 5)) == doctest::Approx(1.0));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 2;
  CHECK(linalg::cond2(d) == doctest::Approx(2.0));

  Matrix x(3, 2);
  x << 1, 0, 0, 1, 1e-16, 1e-16;  // tiny row below tolerance does not register
  CHECK(linalg::cond2(x) == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS_AS(linalg::cond2(Matrix::Zero(3, 3)), error);

  Matrix singular(2, 2);
  singular << 1, 2, 2, 4;
  CHECK(std::isinf(linalg::cond2(singular)));
}

TEST_CASE("leverage scores on stated examples") {
  Matrix x(3, 2);
  x << 1, 0, 0, 1, 0, 0;
  const Vector lev = linalg::leverage_scores(x);
  CHECK(lev(0) == doctest::Approx(1.0));
  CHECK(lev(1) == doctest::Approx(1.0));
  CHECK(lev(2) == doctest::Approx(0.0));

  Matrix ones(2, 1);
  ones << 1, 1;
  const Vector lev2 = linalg::leverage_scores(ones);
  CHECK(lev2(0) == doctest::Approx(0.5));
  CHECK(lev2(1) == doctest::Approx(0.5));

  // square orthogonal design: all scores are 1
  Matrix q(2, 2);
  q << std::sqrt(0.5), std::sqrt(0.5), std::sqrt(0.5), -std::sqrt(0.5);
  CHECK((linalg::leverage_scores(q) - Vector::Ones(2)).cwiseAbs().maxCoeff() <= 1e-12);

  Matrix deficient(3, 2);
  deficient << 1, 2, 2, 4, 3, 6;
  CHECK_THROWS_AS(linalg::leverage_scores(deficient), error);
}

TEST_CASE("leverage scores sum to the column count") {
  rng::Stream stream(5);
  for (int trial = 0; trial < 6; ++trial) {
    const Index n = 20 + 30 * trial;
    const Index p = 2 + trial;
    Matrix x = random_matrix(stream, n, p);
    const Vector lev = linalg::leverage_scores(x);
    CHECK(std::abs(lev.sum() - static_cast<double>(p)) <= 1e-10);
    CHECK(lev.minCoeff() >= -1e-14);
    CHECK(lev.maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("svd reconstruction stays within the rank tolerance budget") {
  rng::Stream stream(23);
  for (int trial = 0; trial < 4; ++trial) {
    Matrix a = random_matrix(stream, 40, 12 + trial);
    const auto svd = linalg::decompose(a);
    const Matrix rebuilt = svd.u * svd.sigma.asDiagonal() * svd.v.transpose();
    CHECK(oracle_spectral_norm(rebuilt - a) <= 10.0 * svd.rank_tol * svd.sigma(0) +
                                                   10.0 * kEps * svd.sigma(0));
  }
}

TEST_CASE("operator norm power iteration matches the dense spectral norm") {
  rng::Stream stream(37);
  Matrix a = random_matrix(stream, 30, 18);
  auto apply = [&](const Vector& v) -> Vector { return a * v; };
  auto apply_adj = [&](const Vector& v) -> Vector { return a.transpose() * v; };
  const auto res = linalg::operator_norm(apply, apply_adj, a.cols());
  CHECK(res.converged);
  CHECK(res.value == doctest::Approx(oracle_spectral_norm(a)).epsilon(1e-4));
}
