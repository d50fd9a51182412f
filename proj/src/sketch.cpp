#include "sketchuq/sketch.hpp"

#include <string>

#include "sketchuq/rng.hpp"

namespace sketchuq {

const char* to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::uniform_sampling:
      return "unif";
    case SchemeKind::leverage_sampling:
      return "lev";
    case SchemeKind::gaussian_projection:
      return "norm";
    case SchemeKind::identity_test:
      return "identity";
  }
  return "unknown";
}

std::optional<SchemeKind> scheme_from_string(std::string_view name) {
  if (name == "unif") return SchemeKind::uniform_sampling;
  if (name == "lev") return SchemeKind::leverage_sampling;
  if (name == "norm") return SchemeKind::gaussian_projection;
  if (name == "identity") return SchemeKind::identity_test;
  return std::nullopt;
}

SketchDraw identity_draw(Index n) {
  SketchDraw draw;
  draw.scheme = {SchemeKind::identity_test, n};
  draw.n = n;
  draw.row_indices.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) draw.row_indices[static_cast<std::size_t>(i)] = i;
  return draw;
}

SketchDraw draw_sketch(const SketchScheme& scheme, const DesignData& data, std::uint64_t seed) {
  const Index n = data.n();
  if (scheme.kind == SchemeKind::identity_test) {
    require(scheme.r == 0 || scheme.r == n, errc::invalid_sketch_dim,
            "identity scheme requires r = n");
    SketchDraw draw = identity_draw(n);
    draw.seed = seed;
    return draw;
  }
  require(scheme.r >= 1 && scheme.r <= n, errc::invalid_sketch_dim,
          "sketch dimension r must satisfy 1 <= r <= n (got r=" + std::to_string(scheme.r) +
              ", n=" + std::to_string(n) + ")");

  SketchDraw draw;
  draw.scheme = scheme;
  draw.seed = seed;
  draw.n = n;
  rng::Stream stream(seed);

  switch (scheme.kind) {
    case SchemeKind::uniform_sampling: {
      draw.row_indices.resize(static_cast<std::size_t>(scheme.r));
      for (auto& idx : draw.row_indices)
        idx = static_cast<Index>(stream.below(static_cast<std::uint64_t>(n)));
      break;
    }
    case SchemeKind::leverage_sampling: {
      const Vector& lev = data.leverage();  // full rank guaranteed by DesignData
      std::vector<double> cdf(static_cast<std::size_t>(n));
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += lev(i);
        cdf[static_cast<std::size_t>(i)] = acc;
      }
      draw.row_indices.resize(static_cast<std::size_t>(scheme.r));
      for (auto& idx : draw.row_indices) idx = static_cast<Index>(stream.categorical(cdf));
      break;
    }
    case SchemeKind::gaussian_projection: {
      draw.dense.resize(scheme.r, n);
      for (Index i = 0; i < scheme.r; ++i)
        for (Index j = 0; j < n; ++j) draw.dense(i, j) = stream.normal();
      break;
    }
    case SchemeKind::identity_test:
      break;  // handled above
  }
  return draw;
}

Matrix apply_sketch(const SketchDraw& draw, const Matrix& m) {
  require(m.rows() == draw.n, errc::dimension_mismatch,
          "operand row count does not match the sketched dimension");
  if (draw.is_sampling()) {
    Matrix out(draw.r(), m.cols());
    for (Index i = 0; i < draw.r(); ++i)
      out.row(i) = m.row(draw.row_indices[static_cast<std::size_t>(i)]);
    return out;
  }
  return draw.dense * m;
}

Vector apply_sketch(const SketchDraw& draw, const Vector& v) {
  require(v.size() == draw.n, errc::dimension_mismatch,
          "operand length does not match the sketched dimension");
  if (draw.is_sampling()) {
    Vector out(draw.r());
    for (Index i = 0; i < draw.r(); ++i)
      out(i) = v(draw.row_indices[static_cast<std::size_t>(i)]);
    return out;
  }
  return draw.dense * v;
}

Matrix apply_sketch_transpose(const SketchDraw& draw, const Matrix& m) {
  require(m.rows() == draw.r(), errc::dimension_mismatch,
          "operand row count does not match the sketch size");
  if (draw.is_sampling()) {
    Matrix out = Matrix::Zero(draw.n, m.cols());
    for (Index i = 0; i < draw.r(); ++i)
      out.row(draw.row_indices[static_cast<std::size_t>(i)]) += m.row(i);
    return out;
  }
  return draw.dense.transpose() * m;
}

Matrix materialize(const SketchDraw& draw) {
  if (!draw.is_sampling()) return draw.dense;
  Matrix s = Matrix::Zero(draw.r(), draw.n);
  for (Index i = 0; i < draw.r(); ++i) s(i, draw.row_indices[static_cast<std::size_t>(i)]) = 1.0;
  return s;
}

}  // namespace sketchuq
