#pragma once

#include <string>
#include <vector>

namespace pnm::cli {

// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::string>& columns() const { return columns_; }

  std::string str() const;
  // Written to a temporary file and renamed into place.
  void write(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_atomic(const std::string& path, const std::string& text);

}  // namespace pnm::cli
