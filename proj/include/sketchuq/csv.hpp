#pragma once

#include <string>
#include <vector>

#include "sketchuq/types.hpp"

namespace sketchuq {

// Reads a rectangular CSV of decimal values, one observation per row.
// Failures report the 1-based row/column of the offending field.
Matrix read_matrix_csv(const std::string& path, bool skip_header = false);

// Single-column variant.
Vector read_vector_csv(const std::string& path, bool skip_header = false);

// Writes lines to path atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& contents);

// Shortest-faithful decimal rendering used by all CSV output.
std::string format_double(double v);

}  // namespace sketchuq
