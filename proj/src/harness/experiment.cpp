#include "cvi/harness/experiment.hpp"

#include "cvi/errors.hpp"
#include "cvi/harness/model_factory.hpp"
#include "cvi/harness/trace_io.hpp"
#include "cvi/laplace.hpp"
#include "cvi/smoothed_map.hpp"
#include "cvi/vi_optimizers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <set>
#include <thread>

namespace cvi::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamMeanInit = 0x1A17;
constexpr std::uint64_t kStreamScaleInit = 0x5CA1;

Vector initial_mean(const AlgorithmSpec& a, const TargetModel& model, std::uint64_t seed,
                    const std::map<std::string, Vector>& smap_results) {
  const int d = model.dim();
  switch (a.mean_init.kind) {
    case MeanInit::Kind::smap: {
      const auto it = smap_results.find(a.mean_init.smap_id);
      if (it == smap_results.end())
        throw Error("smoothed MAP '" + a.mean_init.smap_id + "' did not complete in this trial");
      if (it->second.size() != d) throw Error("smoothed MAP result has the wrong dimension");
      return it->second;
    }
    case MeanInit::Kind::uniform: {
      Rng rng = make_rng(seed, kStreamMeanInit);
      std::uniform_real_distribution<double> u(a.mean_init.low, a.mean_init.high);
      Vector v(d);
      for (int i = 0; i < d; ++i) v[i] = u(rng);
      return v;
    }
    case MeanInit::Kind::prior: {
      Rng rng = make_rng(seed, kStreamMeanInit);
      const auto draw = model.sample_prior(rng);
      if (!draw) throw ConfigError("model '" + model.name() + "' has no prior to sample an init from");
      return *draw;
    }
    case MeanInit::Kind::fixed:
      if (a.mean_init.value.size() != d)
        throw ConfigError("fixed init of '" + a.id + "' has dimension " +
                          std::to_string(a.mean_init.value.size()) + ", model has " +
                          std::to_string(d));
      return a.mean_init.value;
  }
  throw ConfigError("unknown mean init");
}

Matrix initial_scale(const AlgorithmSpec& a, int d, std::uint64_t seed) {
  switch (a.scale_init.kind) {
    case ScaleInit::Kind::identity:
      return Matrix::Identity(d, d);
    case ScaleInit::Kind::fixed:
      return a.scale_init.value * Matrix::Identity(d, d);
    case ScaleInit::Kind::log_uniform: {
      Rng rng = make_rng(seed, kStreamScaleInit);
      std::uniform_real_distribution<double> u(std::log(a.scale_init.low), std::log(a.scale_init.high));
      Matrix L = Matrix::Zero(d, d);
      for (int i = 0; i < d; ++i) L(i, i) = std::exp(u(rng));
      return L;
    }
  }
  throw ConfigError("unknown scale init");
}

RunTrace run_algorithm(const AlgorithmSpec& a, const TargetModel& model, std::uint64_t seed,
                       const std::map<std::string, Vector>& smap_results, Vector* smap_out) {
  const Vector init = initial_mean(a, model, seed, smap_results);
  const double n = static_cast<double>(model.sample_size());
  switch (a.kind) {
    case AlgorithmKind::smap: {
      SmoothedMapConfig c;
      c.alpha = a.alpha > 0.0 ? a.alpha : default_alpha(model.sample_size());
      c.iterations = a.iterations;
      c.samples = a.samples;
      c.schedule = a.schedule;
      c.init = init;
      c.seed = seed;
      c.optimizer = a.adam ? SmapOptimizer::adam : SmapOptimizer::sgd;
      c.adam = a.adam_settings;
      c.record_every = a.record_every;
      SmoothedMapResult r = smap_run(model, c);
      *smap_out = r.theta_hat;
      return std::move(r.trace);
    }
    case AlgorithmKind::csvi:
    case AlgorithmKind::svi:
    case AlgorithmKind::csvi_adam: {
      ViRunConfig c;
      c.init.mu = init;
      c.init.L = initial_scale(a, model.dim(), seed);
      c.init.n = n;
      c.schedule = a.schedule;
      c.iterations = a.iterations;
      c.seed = seed;
      c.algorithm = a.kind == AlgorithmKind::csvi  ? ViAlgorithm::csvi
                    : a.kind == AlgorithmKind::svi ? ViAlgorithm::svi
                                                   : ViAlgorithm::csvi_adam;
      c.elbo_checkpoint_every = a.elbo_checkpoint_every;
      c.elbo_samples = a.elbo_samples;
      c.final_elbo_samples = a.final_elbo_samples;
      c.record_every = a.record_every;
      c.adam = a.adam_settings;
      c.svi_floor = a.svi_floor;
      c.svi_log_diagonal = a.svi_log_diagonal;
      c.svi_adam = a.adam;
      return vi_run(model, c).trace;
    }
    case AlgorithmKind::cla:
    case AlgorithmKind::laplace: {
      LaplaceConfig c;
      c.line_search = a.line_search;
      c.iterations = a.iterations;
      c.grad_tolerance = a.grad_tolerance;
      c.record_every = a.record_every;
      c.final_elbo_samples = a.final_elbo_samples;
      c.elbo_seed = seed;
      if (a.kind == AlgorithmKind::cla) {
        SmoothedMapResult smap;
        smap.theta_hat = init;
        return cla_run(model, smap, c).trace;
      }
      return laplace_run(model, init, c).trace;
    }
  }
  throw ConfigError("unknown algorithm kind");
}

std::string algorithm_dir(const std::string& out_dir, const std::string& id) {
  return (fs::path(out_dir) / "traces" / id).string();
}

SummaryRow row_from_trace(const RunTrace& t, long trial, std::uint64_t seed,
                          const std::optional<CaptureCriterion>& capture, bool gaussian) {
  SummaryRow row;
  row.trial = trial;
  row.seed = seed;
  row.status = "ok";
  const TraceSummary& s = *t.summary;
  row.final_elbo = s.final_elbo;
  row.final_elbo_std_error = s.final_elbo_std_error;
  row.iterations = s.iterations;
  row.stop_reason = s.stop_reason;
  row.moments = summary_moments(t);
  if (capture && gaussian) {
    row.captured = capture->contains(row.moments);
    row.distance = capture->distance(row.moments);
  }
  return row;
}

SummaryRow empty_row(long trial, std::uint64_t seed, std::string status) {
  SummaryRow row;
  row.trial = trial;
  row.seed = seed;
  row.status = std::move(status);
  row.final_elbo = row.final_elbo_std_error = std::numeric_limits<double>::quiet_NaN();
  row.distance = std::numeric_limits<double>::infinity();
  return row;
}

void finish_capture(AlgorithmSummary& s, const std::optional<CaptureCriterion>& capture) {
  if (!capture || s.kind == AlgorithmKind::smap) return;
  CaptureReport r;
  r.criterion = capture->name;
  r.trials = static_cast<long>(s.rows.size());
  for (const SummaryRow& row : s.rows) {
    const bool hit = row.captured.value_or(false);
    r.hits.push_back(hit);
    r.distances.push_back(row.captured ? row.distance : std::numeric_limits<double>::infinity());
    if (hit) ++r.captured;
  }
  s.capture = std::move(r);
}

json manifest_json(const ExperimentConfig& cfg, const ExperimentReport& report) {
  json failures = json::array();
  for (const TrialFailure& f : report.failures)
    failures.push_back({{"algorithm", f.algorithm}, {"trial", f.trial}, {"seed", f.seed},
                        {"message", f.message}});
  json ids = json::array();
  for (const AlgorithmSpec& a : cfg.algorithms) ids.push_back(a.id);
  return {{"trace_schema_version", kTraceSchemaVersion},
          {"config_schema_version", cfg.schema_version},
          {"config_hash", report.config_hash},
          {"name", cfg.name},
          {"trials", cfg.trials},
          {"base_seed", cfg.base_seed},
          {"algorithms", ids},
          {"failures", failures}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string trace_stem(long trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%04ld", trial);
  return buf;
}

std::string default_output_root() {
  const char* env = std::getenv("CVI_OUTPUT_ROOT");
  return env && *env ? env : "cvi-output";
}

TrialResult run_trial(const ExperimentConfig& cfg, long trial) {
  TrialResult result;
  const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(trial);
  std::map<std::string, Vector> smap_results;
  for (const AlgorithmSpec& a : cfg.algorithms) {
    try {
      const auto model = make_model(cfg.model, a.model_overrides);
      Vector smap_out;
      RunTrace trace = run_algorithm(a, *model, seed, smap_results, &smap_out);
      if (a.kind == AlgorithmKind::smap) smap_results[a.id] = smap_out;
      result.traces.emplace(a.id, std::move(trace));
    } catch (const std::exception& e) {
      result.failures.push_back({a.id, trial, seed, e.what()});
    }
  }
  return result;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs,
                                std::ostream* progress) {
  cfg.validate();
  // Build every model once up front so config problems surface before any work.
  for (const AlgorithmSpec& a : cfg.algorithms) make_model(cfg.model, a.model_overrides);

  fs::create_directories(out_dir);
  for (const AlgorithmSpec& a : cfg.algorithms) fs::create_directories(algorithm_dir(out_dir, a.id));
  {
    ExperimentConfig stored = cfg;
    stored.output_dir = out_dir;
    save_config(stored, (fs::path(out_dir) / "config.json").string());
  }

  const long trials = cfg.trials;
  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  std::atomic<long> next{0};
  std::mutex io_mutex;
  std::vector<std::string> write_errors;
  auto worker = [&] {
    while (true) {
      const long i = next.fetch_add(1);
      if (i >= trials) return;
      TrialResult r = run_trial(cfg, i);
      for (const auto& [id, trace] : r.traces) {
        const fs::path base = fs::path(algorithm_dir(out_dir, id)) / trace_stem(i);
        try {
          write_trace(trace, base.string() + ".csv", base.string() + ".json");
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(io_mutex);
          write_errors.push_back(e.what());
        }
      }
      // Only the summaries are kept in memory.
      for (auto& [id, trace] : r.traces) {
        trace.records.clear();
        trace.elbo.clear();
      }
      results[static_cast<std::size_t>(i)] = std::move(r);
      if (progress) {
        std::lock_guard<std::mutex> lock(io_mutex);
        *progress << "trial " << i + 1 << "/" << trials << " done\n" << std::flush;
      }
    }
  };
  const int workers = static_cast<int>(std::clamp<long>(jobs, 1, trials));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (!write_errors.empty()) throw Error("failed to write traces: " + write_errors.front());

  ExperimentReport report;
  report.config_hash = config_hash(cfg);
  for (const AlgorithmSpec& a : cfg.algorithms) {
    AlgorithmSummary s;
    s.id = a.id;
    s.kind = a.kind;
    for (long i = 0; i < trials; ++i) {
      const TrialResult& r = results[static_cast<std::size_t>(i)];
      const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(i);
      const auto it = r.traces.find(a.id);
      if (it == r.traces.end())
        s.rows.push_back(empty_row(i, seed, "failed"));
      else
        s.rows.push_back(row_from_trace(it->second, i, seed, cfg.capture, a.kind != AlgorithmKind::smap));
    }
    finish_capture(s, cfg.capture);
    report.algorithms.push_back(std::move(s));
  }
  for (const TrialResult& r : results)
    for (const TrialFailure& f : r.failures) report.failures.push_back(f);

  write_text(fs::path(out_dir) / "manifest.json", manifest_json(cfg, report).dump(2) + "\n");
  write_summaries(report, out_dir);
  return report;
}

ExperimentReport summarize(const std::string& dir) {
  const fs::path root(dir);
  const fs::path manifest_path = root / "manifest.json";
  const fs::path config_path = root / "config.json";
  if (!fs::exists(manifest_path) || !fs::exists(config_path))
    throw ConfigError(dir + " is not an experiment directory (manifest.json or config.json missing)");
  json manifest;
  {
    std::ifstream in(manifest_path);
    try {
      manifest = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("corrupt manifest: " + std::string(e.what()));
    }
  }
  if (!manifest.contains("trace_schema_version") ||
      manifest["trace_schema_version"] != kTraceSchemaVersion)
    throw ConfigError("unsupported trace schema version in " + manifest_path.string());
  const ExperimentConfig cfg = load_config(config_path.string());

  ExperimentReport report;
  report.config_hash = config_hash(cfg);
  if (manifest.value("config_hash", std::string()) != report.config_hash)
    report.problems.push_back("manifest config hash does not match config.json");
  std::set<std::pair<std::string, long>> failed;
  for (const json& f : manifest.value("failures", json::array())) {
    TrialFailure tf{f.at("algorithm").get<std::string>(), f.at("trial").get<long>(),
                    f.at("seed").get<std::uint64_t>(), f.at("message").get<std::string>()};
    failed.insert({tf.algorithm, tf.trial});
    report.failures.push_back(std::move(tf));
  }

  for (const AlgorithmSpec& a : cfg.algorithms) {
    AlgorithmSummary s;
    s.id = a.id;
    s.kind = a.kind;
    for (long i = 0; i < cfg.trials; ++i) {
      const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(i);
      if (failed.count({a.id, i})) {
        s.rows.push_back(empty_row(i, seed, "failed"));
        continue;
      }
      const fs::path base = fs::path(algorithm_dir(dir, a.id)) / trace_stem(i);
      const std::string csv = base.string() + ".csv";
      const std::string meta = base.string() + ".json";
      if (!fs::exists(csv) || !fs::exists(meta)) {
        report.problems.push_back("missing trace " + base.string());
        s.rows.push_back(empty_row(i, seed, "missing"));
        continue;
      }
      try {
        const RunTrace t = read_trace(csv, meta);
        if (!t.summary) throw TraceFormatError(meta + ": run did not complete");
        s.rows.push_back(row_from_trace(t, i, seed, cfg.capture, a.kind != AlgorithmKind::smap));
      } catch (const std::exception& e) {
        report.problems.push_back(std::string("corrupt trace: ") + e.what());
        s.rows.push_back(empty_row(i, seed, "corrupt"));
      }
    }
    finish_capture(s, cfg.capture);
    report.algorithms.push_back(std::move(s));
  }
  return report;
}

std::string summary_csv(const AlgorithmSummary& summary) {
  Eigen::Index width = 0;
  for (const SummaryRow& r : summary.rows) width = std::max(width, r.moments.size());
  const bool point = summary.kind == AlgorithmKind::smap;
  const Eigen::Index d = point ? width : width / 2;
  std::string out = "trial,seed,status,final_elbo,final_elbo_std_error,iterations,stop_reason";
  for (Eigen::Index i = 0; i < d; ++i) out += (point ? ",theta" : ",mean") + std::to_string(i);
  if (!point)
    for (Eigen::Index i = 0; i < d; ++i) out += ",sd" + std::to_string(i);
  out += ",captured,distance\n";
  for (const SummaryRow& r : summary.rows) {
    out += std::to_string(r.trial) + ',' + std::to_string(r.seed) + ',' + r.status + ',' +
           format_double(r.final_elbo) + ',' + format_double(r.final_elbo_std_error) + ',' +
           std::to_string(r.iterations) + ',' + r.stop_reason;
    for (Eigen::Index i = 0; i < width; ++i)
      out += ',' + format_double(i < r.moments.size() ? r.moments[i]
                                                      : std::numeric_limits<double>::quiet_NaN());
    out += ',';
    if (r.captured) out += *r.captured ? "1" : "0";
    out += ',' + (r.captured ? format_double(r.distance) : std::string());
    out += '\n';
  }
  return out;
}

void write_summaries(const ExperimentReport& report, const std::string& out_dir) {
  json capture = json::object();
  for (const AlgorithmSummary& s : report.algorithms) {
    write_text(fs::path(out_dir) / ("summary_" + s.id + ".csv"), summary_csv(s));
    if (s.capture) {
      json distances = json::array();
      for (double d : s.capture->distances) distances.push_back(std::isfinite(d) ? json(d) : json(nullptr));
      capture[s.id] = {{"criterion", s.capture->criterion},
                       {"trials", s.capture->trials},
                       {"captured", s.capture->captured},
                       {"hits", s.capture->hits},
                       {"distances", distances}};
    }
  }
  write_text(fs::path(out_dir) / "capture.json", capture.dump(2) + "\n");
}

}  // namespace cvi::harness
