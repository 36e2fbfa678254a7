#pragma once

#include "cvi/errors.hpp"
#include "cvi/trace.hpp"

#include <json.hpp>

#include <string>

namespace cvi::harness {

inline constexpr int kTraceSchemaVersion = 1;

class TraceFormatError : public Error {
 public:
  using Error::Error;
};

/// Iteration records as CSV:
///   iteration,objective,grad_norm,step_size,flags,p0,...,p{m-1}
/// Numbers use %.17g so a round trip is exact; NaN is written as "nan".
std::string records_csv(const RunTrace& trace);

/// Everything else (identity, ELBO checkpoints, counters, warnings, summary) as JSON.
/// The summary key is null for runs that did not complete.
nlohmann::json trace_json(const RunTrace& trace);

void write_trace(const RunTrace& trace, const std::string& csv_path, const std::string& json_path);

/// Throws TraceFormatError on an unknown schema version or malformed content.
RunTrace read_trace(const std::string& csv_path, const std::string& json_path);
RunTrace parse_trace(const std::string& csv_text, const nlohmann::json& meta);

std::string format_double(double v);

}  // namespace cvi::harness
