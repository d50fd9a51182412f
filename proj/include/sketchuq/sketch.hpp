#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "sketchuq/model.hpp"
#include "sketchuq/types.hpp"

namespace sketchuq {

enum class SchemeKind {
  uniform_sampling,    // "unif": r row indices iid uniform on {1..n}
  leverage_sampling,   // "lev": r row indices iid with P(i) = leverage_i / p
  gaussian_projection, // "norm": dense r x n iid standard normal
  identity_test,       // degenerate S = I_n, for tests and baselines
};

const char* to_string(SchemeKind kind);
std::optional<SchemeKind> scheme_from_string(std::string_view name);

struct SketchScheme {
  SchemeKind kind = SchemeKind::uniform_sampling;
  Index r = 0;  // sketch dimension; ignored for identity_test
};

// One realized sketching operator S in r x n. Sampling schemes store the
// selected row indices (with replacement, unweighted rows); projection
// schemes store S densely.
struct SketchDraw {
  SketchScheme scheme;
  std::uint64_t seed = 0;
  Index n = 0;
  std::vector<Index> row_indices;  // sampling representation (empty for dense)
  Matrix dense;                    // projection representation (0x0 for sampling)

  bool is_sampling() const { return dense.size() == 0; }
  Index r() const {
    return is_sampling() ? static_cast<Index>(row_indices.size()) : dense.rows();
  }
};

SketchDraw draw_sketch(const SketchScheme& scheme, const DesignData& data, std::uint64_t seed);

// S = I_n expressed as a sampling draw.
SketchDraw identity_draw(Index n);

// S * M. Row gathering for sampling draws (bit-identical to materializing),
// a dense product otherwise.
Matrix apply_sketch(const SketchDraw& draw, const Matrix& m);
Vector apply_sketch(const SketchDraw& draw, const Vector& v);

// S^T * M, i.e. scatter-add of the r rows of M back into n rows.
Matrix apply_sketch_transpose(const SketchDraw& draw, const Matrix& m);

Matrix materialize(const SketchDraw& draw);

}  // namespace sketchuq
