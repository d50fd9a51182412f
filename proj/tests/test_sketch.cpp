#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sketchuq/linalg.hpp"
#include "sketchuq/sketch.hpp"

using namespace sketchuq;
using namespace sketchuq::testing;

TEST_CASE("scheme names round-trip") {
  for (auto kind : {SchemeKind::uniform_sampling, SchemeKind::leverage_sampling,
                    SchemeKind::gaussian_projection, SchemeKind::identity_test}) {
    CHECK(scheme_from_string(to_string(kind)) == kind);
  }
  CHECK(!scheme_from_string("srht").has_value());
}

TEST_CASE("draws are deterministic in (scheme, seed)") {
  const DesignData data = canonical_fixture();
  for (auto kind : {SchemeKind::uniform_sampling, SchemeKind::leverage_sampling,
                    SchemeKind::gaussian_projection}) {
    const SketchScheme scheme{kind, 2};
    const SketchDraw a = draw_sketch(scheme, data, 77);
    const SketchDraw b = draw_sketch(scheme, data, 77);
    const SketchDraw c = draw_sketch(scheme, data, 78);
    CHECK(a.row_indices == b.row_indices);
    CHECK(a.dense == b.dense);
    CHECK((a.row_indices != c.row_indices || a.dense != c.dense));
  }
}

TEST_CASE("sketch dimension bounds are enforced") {
  const DesignData data = canonical_fixture();
  CHECK_THROWS_AS(draw_sketch({SchemeKind::uniform_sampling, 4}, data, 0), error);
  CHECK_THROWS_AS(draw_sketch({SchemeKind::uniform_sampling, 0}, data, 0), error);
  CHECK_THROWS_AS(draw_sketch({SchemeKind::identity_test, 2}, data, 0), error);
  CHECK_NOTHROW(draw_sketch({SchemeKind::uniform_sampling, 3}, data, 0));
}

TEST_CASE("uniform sampling hits each row at the right frequency") {
  const DesignData data = canonical_fixture();
  const Index r = 100000;
  const SketchDraw draw = draw_sketch({SchemeKind::uniform_sampling, r}, data, 4242);
  Vector freq = Vector::Zero(3);
  for (Index idx : draw.row_indices) freq(idx) += 1.0;
  freq /= static_cast<double>(r);
  const double tol = 3.0 * std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / static_cast<double>(r));
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(freq(i) - 1.0 / 3.0) <= tol);
}

TEST_CASE("leverage sampling never draws a zero-leverage row") {
  const DesignData data = canonical_fixture();  // leverage (1, 1, 0)
  const Index r = 20000;
  const SketchDraw draw = draw_sketch({SchemeKind::leverage_sampling, r}, data, 11);
  Vector freq = Vector::Zero(3);
  for (Index idx : draw.row_indices) freq(idx) += 1.0;
  CHECK(freq(2) == 0.0);
  freq /= static_cast<double>(r);
  const double tol = 3.0 * std::sqrt(0.25 / static_cast<double>(r));
  CHECK(std::abs(freq(0) - 0.5) <= tol);
  CHECK(std::abs(freq(1) - 0.5) <= tol);
}

TEST_CASE("gaussian projection entries have standard normal moments") {
  rng::Stream stream(3);
  const DesignData data = random_design(stream, 50, 2);
  const SketchDraw draw = draw_sketch({SchemeKind::gaussian_projection, 100}, data, 2024);
  REQUIRE(!draw.is_sampling());
  const double count = static_cast<double>(draw.dense.size());
  const double mean = draw.dense.sum() / count;
  const double var = draw.dense.array().square().sum() / count - mean * mean;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(count));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("apply_sketch on stated examples") {
  const DesignData data = canonical_fixture();

  const SketchDraw first_two = selector_draw(3, {0, 1});
  CHECK(apply_sketch(first_two, data.x()) == Matrix::Identity(2, 2));

  const SketchDraw dup_zero = selector_draw(3, {2, 2});
  CHECK(apply_sketch(dup_zero, data.x()) == Matrix::Zero(2, 2));

  const SketchDraw twice = dense_draw(3, 2.0 * Matrix::Identity(3, 3));
  Vector expected(3);
  expected << 2, 4, 6;
  CHECK(apply_sketch(twice, data.y()) == expected);

  CHECK_THROWS_AS(apply_sketch(first_two, Vector::Ones(2)), error);
}

TEST_CASE("gather equals materialize exactly; dense within roundoff") {
  rng::Stream stream(21);
  const DesignData data = random_design(stream, 25, 4);
  const Matrix m = random_matrix(stream, 25, 7);

  for (auto kind : {SchemeKind::uniform_sampling, SchemeKind::leverage_sampling}) {
    const SketchDraw draw = draw_sketch({kind, 9}, data, 5);
    CHECK(apply_sketch(draw, m) == materialize(draw) * m);  // bit-level
    CHECK(apply_sketch_transpose(draw, apply_sketch(draw, m))
              .isApprox(materialize(draw).transpose() * (materialize(draw) * m), 1e-14));
  }
  const SketchDraw dense = draw_sketch({SchemeKind::gaussian_projection, 9}, data, 5);
  const Matrix direct = materialize(dense) * m;
  CHECK((apply_sketch(dense, m) - direct).norm() <= 1e-12 * (1.0 + direct.norm()));
}

TEST_CASE("identity draw reproduces the identity") {
  const DesignData data = canonical_fixture();
  const SketchDraw draw = identity_draw(3);
  CHECK(apply_sketch(draw, data.x()) == data.x());
  CHECK(materialize(draw) == Matrix::Identity(3, 3));
  const SketchDraw via_scheme = draw_sketch({SchemeKind::identity_test, 0}, data, 9);
  CHECK(via_scheme.row_indices == draw.row_indices);
}

TEST_CASE("scaling the sketching matrix leaves the sketched solution unchanged") {
  rng::Stream stream(31);
  const DesignData data = random_design(stream, 20, 3);
  const SketchDraw draw = draw_sketch({SchemeKind::gaussian_projection, 6}, data, 88);
  for (double c : {2.0, -0.5, 1e4}) {
    const SketchDraw scaled = dense_draw(20, c * draw.dense);
    const Vector beta = linalg::pinv(apply_sketch(draw, data.x())) * apply_sketch(draw, data.y());
    const Vector beta_scaled =
        linalg::pinv(apply_sketch(scaled, data.x())) * apply_sketch(scaled, data.y());
    CHECK((beta - beta_scaled).norm() <= 1e-10 * (1.0 + beta.norm()));
  }
}
