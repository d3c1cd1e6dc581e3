#include "ppdcpp/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ppdcpp/errors.hpp"

namespace ppdcpp::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  if (cell.empty()) {
    throw IoError("empty cell at row " + std::to_string(row) + ", column '" + column + "'");
  }
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (errno != 0 || end == cell.c_str() || *end != '\0') {
    throw IoError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                  ", column '" + column + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that still round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

Dataset ingest_csv(const std::string& path, const CsvSchema& schema, DataRole role) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  const std::vector<std::string> header = split_row(line);

  const auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw IoError("'" + path + "' has no column named '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t y_col = column_index(schema.response);
  std::vector<std::size_t> x_cols;
  for (const auto& name : schema.covariates) x_cols.push_back(column_index(name));

  Dataset d;
  d.role = role;
  std::vector<std::vector<double>> x_rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_row(line);
    const auto cell_at = [&](std::size_t col, const std::string& name) {
      if (col >= cells.size()) {
        throw IoError("row " + std::to_string(row) + " is missing column '" + name + "'");
      }
      return parse_cell(cells[col], row, name);
    };
    d.y.push_back(cell_at(y_col, schema.response));
    if (!x_cols.empty()) {
      std::vector<double> xr;
      xr.reserve(x_cols.size());
      for (std::size_t j = 0; j < x_cols.size(); ++j) {
        xr.push_back(cell_at(x_cols[j], schema.covariates[j]));
      }
      x_rows.push_back(std::move(xr));
    }
  }
  if (d.y.empty()) throw IoError("'" + path + "' has a header but no data rows");
  if (!x_cols.empty()) {
    Matrix x(d.y.size(), x_cols.size() + 1);
    for (std::size_t i = 0; i < d.y.size(); ++i) {
      x(i, 0) = 1.0;  // intercept
      for (std::size_t j = 0; j < x_cols.size(); ++j) x(i, j + 1) = x_rows[i][j];
    }
    d.x = std::move(x);
  }
  d.validate();
  return d;
}

void write_dataset_csv(const std::string& path, const Dataset& data, const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << schema.response;
  for (const auto& c : schema.covariates) out << ',' << c;
  out << '\n';
  const std::size_t p = schema.covariates.size();
  if (p > 0 && (!data.x || data.x->cols() != p + 1)) {
    throw ValidationError("dataset covariates do not match the schema");
  }
  for (std::size_t i = 0; i < data.y.size(); ++i) {
    out << format_double(data.y[i]);
    for (std::size_t j = 0; j < p; ++j) out << ',' << format_double((*data.x)(i, j + 1));
    out << '\n';
  }
  if (!out) throw IoError("short write to '" + path + "'");
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (j) out << ',';
      out << format_double(r[j]);
    }
    out << '\n';
  }
  if (!out) throw IoError("short write to '" + path + "'");
}

}  // namespace ppdcpp::io
