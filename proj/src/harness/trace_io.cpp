#include "cvi/harness/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace cvi::harness {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw TraceFormatError("expected a number in trace JSON");
  return v.get<double>();
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_or_null(v[i]));
  return out;
}

Vector vector_from(const json& v) {
  if (!v.is_array()) throw TraceFormatError("expected an array in trace JSON");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number_from(v[i]);
  return out;
}

double parse_field(const std::string& s, long line) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw TraceFormatError("trace CSV line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceFormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string records_csv(const RunTrace& trace) {
  std::size_t width = 0;
  for (const TraceRecord& r : trace.records) width = std::max(width, static_cast<std::size_t>(r.params.size()));
  std::string out = "iteration,objective,grad_norm,step_size,flags";
  for (std::size_t i = 0; i < width; ++i) out += ",p" + std::to_string(i);
  out += '\n';
  for (const TraceRecord& r : trace.records) {
    if (static_cast<std::size_t>(r.params.size()) != width)
      throw TraceFormatError("trace records have inconsistent parameter sizes");
    out += std::to_string(r.iteration) + ',' + format_double(r.objective) + ',' +
           format_double(r.grad_norm) + ',' + format_double(r.step_size) + ',' +
           std::to_string(r.flags);
    for (Eigen::Index i = 0; i < r.params.size(); ++i) out += ',' + format_double(r.params[i]);
    out += '\n';
  }
  return out;
}

json trace_json(const RunTrace& trace) {
  json elbo = json::array();
  for (const ElboCheckpoint& c : trace.elbo)
    elbo.push_back({{"iteration", c.iteration},
                    {"mean", number_or_null(c.mean)},
                    {"std_error", number_or_null(c.std_error)}});
  json out = {{"schema_version", kTraceSchemaVersion},
              {"algorithm", trace.algorithm},
              {"seed", trace.seed},
              {"dim", trace.dim},
              {"sample_size", trace.sample_size},
              {"param_layout", trace.param_layout},
              {"elbo", elbo},
              {"instability_count", trace.instability_count},
              {"low_ess_count", trace.low_ess_count},
              {"warnings", trace.warnings},
              {"summary", nullptr}};
  if (trace.summary) {
    const TraceSummary& s = *trace.summary;
    out["summary"] = {{"params", vector_json(s.params)},
                      {"param_layout", s.param_layout},
                      {"final_elbo", number_or_null(s.final_elbo)},
                      {"final_elbo_std_error", number_or_null(s.final_elbo_std_error)},
                      {"iterations", s.iterations},
                      {"stop_reason", s.stop_reason},
                      {"wall_seconds", s.wall_seconds}};
  }
  return out;
}

void write_trace(const RunTrace& trace, const std::string& csv_path, const std::string& json_path) {
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw Error("cannot write " + csv_path);
    csv << records_csv(trace);
  }
  std::ofstream meta(json_path, std::ios::binary);
  if (!meta) throw Error("cannot write " + json_path);
  meta << trace_json(trace).dump(2) << '\n';
}

RunTrace parse_trace(const std::string& csv_text, const json& meta) {
  RunTrace t;
  try {
    if (!meta.is_object() || !meta.contains("schema_version"))
      throw TraceFormatError("trace JSON has no schema_version");
    const int version = meta.at("schema_version").get<int>();
    if (version != kTraceSchemaVersion)
      throw TraceFormatError("unsupported trace schema version " + std::to_string(version));
    t.algorithm = meta.at("algorithm").get<std::string>();
    t.seed = meta.at("seed").get<std::uint64_t>();
    t.dim = meta.at("dim").get<int>();
    t.sample_size = meta.at("sample_size").get<long>();
    t.param_layout = meta.at("param_layout").get<std::string>();
    for (const json& c : meta.at("elbo"))
      t.elbo.push_back({c.at("iteration").get<long>(), number_from(c.at("mean")),
                        number_from(c.at("std_error"))});
    t.instability_count = meta.at("instability_count").get<long>();
    t.low_ess_count = meta.at("low_ess_count").get<long>();
    t.warnings = meta.at("warnings").get<std::vector<std::string>>();
    const json& s = meta.at("summary");
    if (!s.is_null()) {
      TraceSummary summary;
      summary.params = vector_from(s.at("params"));
      summary.param_layout = s.at("param_layout").get<std::string>();
      summary.final_elbo = number_from(s.at("final_elbo"));
      summary.final_elbo_std_error = number_from(s.at("final_elbo_std_error"));
      summary.iterations = s.at("iterations").get<long>();
      summary.stop_reason = s.at("stop_reason").get<std::string>();
      summary.wall_seconds = number_from(s.at("wall_seconds"));
      t.summary = std::move(summary);
    }
  } catch (const json::exception& e) {
    throw TraceFormatError(std::string("malformed trace JSON: ") + e.what());
  }

  std::istringstream in(csv_text);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line.rfind("iteration,objective,grad_norm,step_size,flags", 0) != 0)
    throw TraceFormatError("trace CSV has an unexpected header");
  const std::size_t columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != columns)
      throw TraceFormatError("trace CSV line " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(columns));
    TraceRecord r;
    r.iteration = static_cast<long>(parse_field(fields[0], line_no));
    r.objective = parse_field(fields[1], line_no);
    r.grad_norm = parse_field(fields[2], line_no);
    r.step_size = parse_field(fields[3], line_no);
    r.flags = static_cast<std::uint32_t>(parse_field(fields[4], line_no));
    r.params.resize(static_cast<Eigen::Index>(columns - 5));
    for (std::size_t i = 5; i < columns; ++i)
      r.params[static_cast<Eigen::Index>(i - 5)] = parse_field(fields[i], line_no);
    if (!t.records.empty() && r.iteration <= t.records.back().iteration)
      throw TraceFormatError("trace CSV line " + std::to_string(line_no) +
                             ": iterations are not strictly increasing");
    t.records.push_back(std::move(r));
  }
  return t;
}

RunTrace read_trace(const std::string& csv_path, const std::string& json_path) {
  const std::string csv = slurp(csv_path);
  json meta;
  try {
    meta = json::parse(slurp(json_path));
  } catch (const json::parse_error& e) {
    throw TraceFormatError(json_path + " is not valid JSON: " + e.what());
  }
  try {
    return parse_trace(csv, meta);
  } catch (const TraceFormatError& e) {
    throw TraceFormatError(json_path + ": " + e.what());
  }
}

}  // namespace cvi::harness
