#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "pricelab/errors.hpp"

namespace pricelab {

// Shortest round-trip decimal form (std::to_chars); the same value always
// prints the same bytes.
std::string format_double(double value);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void row(const std::vector<std::string>& cells);

 private:
  std::string path_;
  std::ofstream out_;
};

// Minimal CSV reader: comma-split, no quoting (none of our formats need it).
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace pricelab
