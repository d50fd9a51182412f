#include "sketchuq/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sketchuq {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_field(const std::string& field, std::size_t row, std::size_t col) {
  const char* begin = field.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(v)) {
    fail(errc::parse_error, "CSV parse error at row " + std::to_string(row) + ", column " +
                                std::to_string(col) + ": '" + field + "'");
  }
  return v;
}

}  // namespace

Matrix read_matrix_csv(const std::string& path, bool skip_header) {
  std::ifstream in(path);
  require(in.good(), errc::io_failure, "cannot open '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && skip_header) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      row.push_back(parse_field(fields[c], lineno, c + 1));
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(errc::parse_error, "CSV parse error at row " + std::to_string(lineno) +
                                  ": expected " + std::to_string(rows.front().size()) +
                                  " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), errc::parse_error, "'" + path + "' contains no data rows");

  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return m;
}

Vector read_vector_csv(const std::string& path, bool skip_header) {
  const Matrix m = read_matrix_csv(path, skip_header);
  require(m.cols() == 1, errc::parse_error,
          "'" + path + "' must contain a single column, found " + std::to_string(m.cols()));
  return m.col(0);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), errc::io_failure, "cannot open '" + tmp + "' for writing");
    out << contents;
    out.flush();
    require(out.good(), errc::io_failure, "write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, errc::io_failure, "rename to '" + path + "' failed: " + ec.message());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace sketchuq
