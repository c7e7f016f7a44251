#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fastlim/errors.hpp"
#include "fastlim/grid.hpp"
#include "fastlim/models.hpp"

namespace fastlim {

/// Decimal with 17 significant digits; parses back to the identical double.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) cells.push_back(cur);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_real(const std::string& s, const std::string& path) {
  // strtod rather than stod: subnormal values set ERANGE but parse exactly
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw IoError("'" + path + "': cannot parse number '" + s + "'");
  return x;
}

inline void write_coordinates(std::ofstream& out, const Grid& g, std::size_t i) {
  out << format_real(g.center(i, 0));
  if (g.dim() == 2) out << ',' << format_real(g.center(i, 1));
}

}  // namespace detail

/// Header "x[,y],value", one row per cell (x fastest), LF line endings.
inline void write_field_csv(const Field& f, const Grid& g, const std::string& path) {
  if (f.size() != g.size()) throw InvalidArgument("field does not match grid");
  auto out = detail::open_for_write(path);
  out << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t i = 0; i < f.size(); ++i) {
    detail::write_coordinates(out, g, i);
    out << ',' << format_real(f[i]) << '\n';
  }
  detail::finish(out, path);
}

/// Header "x[,y],<species...>" in the kind's species order.
inline void write_state_csv(const SystemState& st, const Grid& g, const std::string& path) {
  if (st.cells() != g.size()) throw InvalidArgument("state does not match grid");
  auto out = detail::open_for_write(path);
  out << (g.dim() == 1 ? "x" : "x,y");
  for (auto name : species_names(st.kind)) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < st.cells(); ++i) {
    detail::write_coordinates(out, g, i);
    for (const auto& f : st.species) out << ',' << format_real(f[i]);
    out << '\n';
  }
  detail::finish(out, path);
}

/// Reads the value columns of a CSV written by write_field_csv / write_state_csv.
/// The coordinate columns must match the grid's cell centers.
inline std::vector<Field> read_columns_csv(const std::string& path, const Grid& g, std::size_t value_columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  const std::size_t coord = static_cast<std::size_t>(g.dim());
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  const auto header = detail::split_commas(line);
  if (header.size() != coord + value_columns) {
    throw IoError("'" + path + "': expected " + std::to_string(coord + value_columns) + " columns, found " +
                  std::to_string(header.size()));
  }
  std::vector<Field> cols(value_columns, Field(g.size()));
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= g.size()) throw IoError("'" + path + "' has more rows than the grid has cells");
    const auto cells = detail::split_commas(line);
    if (cells.size() != header.size()) throw IoError("'" + path + "': ragged row " + std::to_string(row + 2));
    for (std::size_t a = 0; a < coord; ++a) {
      const double x = detail::parse_real(cells[a], path);
      if (std::abs(x - g.center(row, static_cast<int>(a))) > 1e-9 * g.length(static_cast<int>(a))) {
        throw IoError("'" + path + "': coordinates do not match the grid at row " + std::to_string(row + 2));
      }
    }
    for (std::size_t c = 0; c < value_columns; ++c) cols[c][row] = detail::parse_real(cells[coord + c], path);
    ++row;
  }
  if (row != g.size()) throw IoError("'" + path + "' has " + std::to_string(row) + " rows, grid has " + std::to_string(g.size()));
  return cols;
}

inline Field read_field_csv(const std::string& path, const Grid& g) {
  return std::move(read_columns_csv(path, g, 1).front());
}

inline SystemState read_state_csv(const std::string& path, const Grid& g, SystemKind kind) {
  return {kind, read_columns_csv(path, g, species_count(kind))};
}

/// Free-form table writer; every value formatted with format_real.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) throw InvalidArgument("csv row has the wrong number of cells");
    rows_.push_back(std::move(cells));
  }
  void add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_real(v));
    add_row(std::move(cells));
  }

  void write(const std::string& path) const {
    auto out = detail::open_for_write(path);
    for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
      out << '\n';
    }
    detail::finish(out, path);
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace fastlim
