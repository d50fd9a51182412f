#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sketchuq/model.hpp"
#include "sketchuq/rng.hpp"
#include "sketchuq/sketch.hpp"
#include "sketchuq/types.hpp"

namespace sketchuq::testing {

// X = [[1,0],[0,1],[0,0]], y = (1,2,3): the 3x2 fixture used throughout.
inline DesignData canonical_fixture() {
  Matrix x(3, 2);
  x << 1, 0, 0, 1, 0, 0;
  Vector y(3);
  y << 1, 2, 3;
  return DesignData(std::move(x), std::move(y));
}

inline Vector canonical_beta0() {
  Vector b(2);
  b << 1, 2;
  return b;
}

inline Matrix random_matrix(rng::Stream& stream, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = stream.normal();
  return m;
}

inline DesignData random_design(rng::Stream& stream, Index n, Index p) {
  Matrix x = random_matrix(stream, n, p);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y(i) = stream.normal();
  return DesignData(std::move(x), std::move(y));
}

// A row-selection draw built by hand (0-based indices).
inline SketchDraw selector_draw(Index n, std::vector<Index> indices) {
  SketchDraw draw;
  draw.scheme = {SchemeKind::uniform_sampling, static_cast<Index>(indices.size())};
  draw.n = n;
  draw.row_indices = std::move(indices);
  return draw;
}

inline SketchDraw dense_draw(Index n, Matrix s) {
  SketchDraw draw;
  draw.scheme = {SchemeKind::gaussian_projection, s.rows()};
  draw.n = n;
  draw.dense = std::move(s);
  return draw;
}

// Independent pseudoinverse for oracle-side computations: plain Jacobi SVD
// with an epsilon cutoff, no shared code with the library path.
inline Matrix oracle_pinv(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double tol = static_cast<double>(std::max(a.rows(), a.cols())) *
                     std::numeric_limits<double>::epsilon() * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline double oracle_spectral_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

}  // namespace sketchuq::testing
