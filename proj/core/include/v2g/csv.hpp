#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace v2g {

// Minimal CSV writer with deterministic %.17g float formatting so values
// round-trip exactly through the cross-check tool.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& values);
  static std::string format(double v);

 private:
  std::ofstream out_;
  std::size_t n_columns_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;
  double number(std::size_t row, int col) const;
  const std::string& text(std::size_t row, int col) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace v2g
