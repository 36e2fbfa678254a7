#pragma once

#include "cvi/types.hpp"

#include <string>
#include <vector>

namespace cvi {

/// Numeric table read from CSV: header row, comma separated, one observation per line.
struct Dataset {
  std::vector<std::string> columns;
  Matrix values;

  /// Index of a named column; throws ConfigError when absent.
  int column(const std::string& name) const;
};

Dataset read_csv(const std::string& path);
Dataset parse_csv(const std::string& text, const std::string& origin = "<memory>");

/// Row indices of a without-replacement subsample (all rows when count <= 0 or >= rows).
std::vector<long> subsample_rows(long rows, long count, std::uint64_t seed);

}  // namespace cvi
