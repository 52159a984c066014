#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvspec::cli {

/// Bad input data (unreadable file, non-finite value, grid mismatch).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, enough to round-trip a double.
std::string format_number(double value);

/// First column of a CSV file as doubles. A non-numeric first line is taken
/// as a header. Throws DataError naming the 1-based row of a bad value.
std::vector<double> read_series_csv(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  [[nodiscard]] const std::vector<double>& column(const std::string& name) const;
  [[nodiscard]] std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Numeric CSV with a header line.
CsvTable read_table_csv(const std::string& path);

void write_row(std::ostream& out, const std::vector<double>& values);

}  // namespace tvspec::cli
