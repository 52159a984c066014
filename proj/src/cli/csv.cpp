#include "csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace tvspec::cli {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  return cells;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end != nullptr && *end == '\0';
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file '" + path + "'");
  return in;
}

}  // namespace

std::vector<double> read_series_csv(const std::string& path) {
  auto in = open(path);
  std::vector<double> values;
  std::string line;
  std::size_t row = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++row;
    const auto cells = split(line);
    if (cells.empty() || cells.front().empty()) continue;
    double v = 0.0;
    if (!parse_double(cells.front(), v)) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw DataError("row " + std::to_string(row) + " of '" + path +
                      "' is not a number: " + cells.front());
    }
    first = false;
    if (!std::isfinite(v)) {
      throw DataError("row " + std::to_string(row) + " of '" + path + "' is not finite");
    }
    values.push_back(v);
  }
  if (values.empty()) throw DataError("input file '" + path + "' contains no values");
  return values;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return columns[i];
  }
  throw DataError("CSV has no column named '" + name + "'");
}

CsvTable read_table_csv(const std::string& path) {
  auto in = open(path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  table.header = split(line);
  table.columns.resize(table.header.size());
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    const auto cells = split(line);
    if (cells.empty() || (cells.size() == 1 && cells.front().empty())) continue;
    if (cells.size() != table.header.size()) {
      throw DataError("row " + std::to_string(row) + " of '" + path + "' has " +
                      std::to_string(cells.size()) + " fields, expected " +
                      std::to_string(table.header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw DataError("row " + std::to_string(row) + " of '" + path + "' is not numeric");
      }
      table.columns[c].push_back(v);
    }
  }
  return table;
}

void write_row(std::ostream& out, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ',';
    out << format_number(values[i]);
  }
  out << '\n';
}

}  // namespace tvspec::cli
