#include "cvi/dataset.hpp"

#include "cvi/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cvi {

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

int Dataset::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("dataset has no column named '" + name + "'");
  return static_cast<int>(it - columns.begin());
}

Dataset parse_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  Dataset data;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw ConfigError(origin + ": missing header row");
  data.columns = split(line);

  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != data.columns.size())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(data.columns.size()) + " fields, got " +
                        std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string& f = fields[j];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[j]);
      if (ec != std::errc() || ptr != f.data() + f.size())
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": non-numeric field '" + f +
                          "' in column '" + data.columns[j] + "'");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(origin + ": no data rows");
  data.values.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(data.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) data.values(i, j) = rows[i][j];
  return data;
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path);
}

std::vector<long> subsample_rows(long rows, long count, std::uint64_t seed) {
  std::vector<long> idx(static_cast<std::size_t>(rows));
  std::iota(idx.begin(), idx.end(), 0L);
  if (count <= 0 || count >= rows) return idx;
  Rng rng = make_rng(seed, 0x5AB);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(count));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace cvi
