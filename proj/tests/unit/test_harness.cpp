#include "cvi/harness/config.hpp"
#include "cvi/harness/experiment.hpp"
#include "cvi/harness/model_factory.hpp"
#include "cvi/harness/trace_io.hpp"
#include "cvi/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace cvi;
using namespace cvi::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cvi_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The mixture preset shrunk to a few hundred iterations.
ExperimentConfig small_mixture(long trials) {
  ExperimentConfig cfg = preset("mixture");
  cfg.trials = trials;
  for (auto& a : cfg.algorithms) {
    a.iterations = 200;
    a.record_every = 50;
    a.elbo_checkpoint_every = 100;
    a.elbo_samples = 10;
    a.final_elbo_samples = 50;
  }
  return cfg;
}

RunTrace sample_trace() {
  RunTrace t;
  t.algorithm = "csvi";
  t.seed = 12345678901234ULL;
  t.dim = 1;
  t.sample_size = 7;
  t.param_layout = "mu_L";
  t.records.push_back({0, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
                       0.0, kFlagNone, (Vector(2) << 0.1, 1.0).finished()});
  t.records.push_back({10, 1.0 / 3.0, 2e-300, 0.125, kFlagProjected | kFlagLowEss,
                       (Vector(2) << -0.1 / 7.0, 0.0).finished()});
  t.elbo.push_back({0, -1.25, 0.01});
  t.instability_count = 3;
  t.low_ess_count = 1;
  t.warnings.push_back("a \"quoted\" warning");
  TraceSummary s;
  s.params = t.records.back().params;
  s.param_layout = "mu_L";
  s.final_elbo = -0.5;
  s.final_elbo_std_error = 0.002;
  s.iterations = 10;
  s.stop_reason = "iteration_cap";
  s.wall_seconds = 0.25;
  t.summary = s;
  return t;
}

}  // namespace

TEST(Config, JsonRoundTripForEveryPreset) {
  for (const std::string& name : preset_names()) {
    const ExperimentConfig cfg = preset(name);
    EXPECT_NO_THROW(cfg.validate()) << name;
    const ExperimentConfig back = config_from_json(to_json(cfg));
    EXPECT_EQ(to_json(back), to_json(cfg)) << name;
    EXPECT_EQ(config_hash(back), config_hash(cfg));
  }
  EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(Config, RejectsUnknownKeysAndVersions) {
  nlohmann::json j = to_json(preset("mixture"));
  j["algorithms"][0]["learning_rate"] = 1.0;
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(preset("mixture"));
  j["schema_version"] = 99;
  EXPECT_THROW(config_from_json(j), ConfigError);
  j = to_json(preset("mixture"));
  j["trials"] = "many";
  EXPECT_THROW(config_from_json(j), ConfigError);
}

TEST(Config, ValidationCatchesBrokenSettings) {
  ExperimentConfig cfg = preset("mixture");
  cfg.trials = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = preset("mixture");
  cfg.algorithms[1].mean_init.smap_id = "missing";
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = preset("mixture");
  cfg.algorithms.push_back(cfg.algorithms[0]);  // duplicate id
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = preset("mixture");
  cfg.algorithms[1].schedule.exponent = 0.3;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, HashTracksSemanticFieldsOnly) {
  ExperimentConfig a = preset("mixture");
  ExperimentConfig b = a;
  b.output_dir = "/somewhere/else";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.algorithms[1].schedule.scale = 5.0000001;
  EXPECT_NE(config_hash(a), config_hash(b));
  b = a;
  b.base_seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, PresetsCarryTheDocumentedSettings) {
  const ExperimentConfig mix = preset("mixture");
  ASSERT_EQ(mix.algorithms.size(), 5u);
  const AlgorithmSpec& csvi = mix.algorithms[1];
  EXPECT_EQ(csvi.kind, AlgorithmKind::csvi);
  EXPECT_DOUBLE_EQ(csvi.schedule.scale, 5.0);
  EXPECT_DOUBLE_EQ(csvi.schedule.exponent, 1.0);
  EXPECT_EQ(csvi.mean_init.kind, MeanInit::Kind::smap);
  EXPECT_DOUBLE_EQ(mix.algorithms[0].alpha, 100.0);
  EXPECT_EQ(mix.trials, 100);

  const ExperimentConfig sparse = preset("sparse-regression-synthetic");
  EXPECT_DOUBLE_EQ(sparse.algorithms[0].alpha, 2.0);
  const ExperimentConfig gmm = preset("gmm-synthetic");
  EXPECT_EQ(gmm.model.params.at("K").get<int>(), 3);
  EXPECT_DOUBLE_EQ(gmm.model.params.at("alpha0").get<double>(), 1.0);
  const ExperimentConfig bvm = preset("bvm-smap");
  EXPECT_EQ(bvm.algorithms.size(), 4u);
}

TEST(Config, SaveAndLoadFile) {
  const fs::path dir = scratch("config_file");
  const ExperimentConfig cfg = preset("gmm-synthetic");
  save_config(cfg, (dir / "c.json").string());
  EXPECT_EQ(config_hash(load_config((dir / "c.json").string())), config_hash(cfg));
  EXPECT_THROW(load_config((dir / "absent.json").string()), ConfigError);
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(load_config((dir / "bad.json").string()), ConfigError);
}

TEST(TraceIo, ExactRoundTrip) {
  const RunTrace t = sample_trace();
  const RunTrace back = parse_trace(records_csv(t), trace_json(t));
  EXPECT_EQ(back.algorithm, t.algorithm);
  EXPECT_EQ(back.seed, t.seed);
  EXPECT_EQ(back.sample_size, 7);
  EXPECT_EQ(back.param_layout, "mu_L");
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_TRUE(std::isnan(back.records[0].objective));
  EXPECT_EQ(back.records[1].objective, 1.0 / 3.0);
  EXPECT_EQ(back.records[1].grad_norm, 2e-300);
  EXPECT_EQ(back.records[1].flags, kFlagProjected | kFlagLowEss);
  EXPECT_EQ(back.records[1].params, t.records[1].params);
  EXPECT_EQ(back.elbo[0].mean, -1.25);
  EXPECT_EQ(back.warnings, t.warnings);
  ASSERT_TRUE(back.summary);
  EXPECT_EQ(back.summary->params, t.summary->params);
  EXPECT_EQ(back.summary->stop_reason, "iteration_cap");
  EXPECT_EQ(records_csv(back), records_csv(t));
}

TEST(TraceIo, HeaderAndRejections) {
  RunTrace t = sample_trace();
  const std::string csv = records_csv(t);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,objective,grad_norm,step_size,flags,p0,p1");
  nlohmann::json meta = trace_json(t);
  meta["schema_version"] = 2;
  EXPECT_THROW(parse_trace(csv, meta), TraceFormatError);
  EXPECT_THROW(parse_trace("iteration,objective\n1,2\n", trace_json(t)), TraceFormatError);
  t.records[1].iteration = 0;
  EXPECT_THROW(parse_trace(records_csv(t), trace_json(t)), TraceFormatError);
  t = sample_trace();
  t.summary.reset();
  EXPECT_TRUE(trace_json(t)["summary"].is_null());
  EXPECT_FALSE(parse_trace(records_csv(t), trace_json(t)).summary);
}

TEST(ModelFactory, BuildsEveryKindAndChecksKeys) {
  EXPECT_EQ(make_model({"trimodal-mixture", {}})->dim(), 1);
  EXPECT_EQ(make_model(parse_model_string("gaussian:mean=1;2,n=5"))->sample_size(), 5);
  EXPECT_EQ(make_model({"synthetic-bvm", {}}, {{"n", 10}})->sample_size(), 10);
  EXPECT_EQ(make_model({"example1", {{"n", 50}}})->sample_size(), 50);
  EXPECT_EQ(make_model({"gmm-synthetic", {}})->dim(), 3 + 2 * 3 * 2);
  EXPECT_GT(make_model({"sparse-regression-synthetic", {}})->dim(), 1);
  EXPECT_THROW(make_model({"nonsense", {}}), ConfigError);
  EXPECT_THROW(make_model({"synthetic-bvm", {{"m", 3}}}), ConfigError);
  EXPECT_THROW(make_model({"gmm-csv", {{"path", "/does/not/exist.csv"}}}), ConfigError);

  const ModelSpec s = parse_model_string("gaussian-mixture:{\"weights\":[1],\"means\":[[0]],\"covariances\":[[[2]]]}");
  EXPECT_EQ(s.kind, "gaussian-mixture");
  EXPECT_NEAR(make_model(s)->log_density(Vector::Zero(1)), -0.5 * std::log(2 * M_PI * 2), 1e-12);
  EXPECT_EQ(parse_model_string("trimodal-mixture").kind, "trimodal-mixture");
}

TEST(Experiment, ZeroIterationsKeepsInitialStates) {
  ExperimentConfig cfg = small_mixture(1);
  for (auto& a : cfg.algorithms) a.iterations = 0;
  const TrialResult r = run_trial(cfg, 0);
  EXPECT_TRUE(r.failures.empty());
  const RunTrace& smap = r.traces.at("smap");
  ASSERT_EQ(smap.records.size(), 1u);
  const RunTrace& csvi = r.traces.at("csvi");
  ASSERT_EQ(csvi.records.size(), 1u);
  // CSVI starts from the (unmoved) SMAP point with L = I.
  EXPECT_EQ(csvi.records[0].params[0], smap.records[0].params[0]);
  EXPECT_EQ(csvi.records[0].params[1], 1.0);
  // Paired starts: SVI and Laplace draw the same uniform mean.
  EXPECT_EQ(r.traces.at("svi").records[0].params[0], r.traces.at("laplace").records[0].params[0]);
  EXPECT_EQ(r.traces.at("svi").records[0].params[0], smap.records[0].params[0]);
}

TEST(Experiment, OutputsAreReproducibleAcrossRunsAndWorkerCounts) {
  const ExperimentConfig cfg = small_mixture(4);
  const fs::path a = scratch("repro_a"), b = scratch("repro_b"), c = scratch("repro_c");
  const ExperimentReport ra = run_experiment(cfg, a.string(), 1);
  run_experiment(cfg, b.string(), 1);
  run_experiment(cfg, c.string(), 2);
  EXPECT_TRUE(ra.failures.empty());
  for (const auto& alg : cfg.algorithms) {
    const std::string f = "summary_" + alg.id + ".csv";
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
    EXPECT_EQ(slurp(a / "traces" / alg.id / "trial_0003.csv"), slurp(c / "traces" / alg.id / "trial_0003.csv"));
  }
  EXPECT_EQ(slurp(a / "capture.json"), slurp(c / "capture.json"));
  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest.at("config_hash").get<std::string>(), config_hash(cfg));
  const std::string csv = slurp(a / "summary_csvi.csv");
  const std::string header = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(header, "trial,seed,status,final_elbo,final_elbo_std_error,iterations,stop_reason,mean0,sd0,captured,distance");
}

TEST(Experiment, SummarizeReportsMissingAndCorruptTraces) {
  const ExperimentConfig cfg = small_mixture(3);
  const fs::path dir = scratch("summarize");
  run_experiment(cfg, dir.string(), 1);
  const std::string before = slurp(dir / "summary_csvi.csv");
  ExperimentReport clean = summarize(dir.string());
  EXPECT_TRUE(clean.problems.empty());
  EXPECT_EQ(slurp(dir / "summary_csvi.csv"), before);

  fs::remove(dir / "traces" / "csvi" / "trial_0001.json");
  std::ofstream(dir / "traces" / "svi" / "trial_0002.csv") << "garbage\n";
  const ExperimentReport r = summarize(dir.string());
  EXPECT_EQ(r.problems.size(), 2u);
  for (const auto& alg : r.algorithms) {
    if (alg.id == "csvi") {
      EXPECT_EQ(alg.rows[1].status, "missing");
      EXPECT_EQ(alg.rows[0].status, "ok");
    }
    if (alg.id == "svi") {
      EXPECT_EQ(alg.rows[2].status, "corrupt");
    }
  }
}

TEST(Experiment, TrialFailuresAreRecordedNotFatal) {
  ExperimentConfig cfg;
  cfg.name = "fail";
  cfg.model = {"trimodal-mixture", nlohmann::json::object()};
  cfg.trials = 2;
  AlgorithmSpec la;
  la.id = "laplace";
  la.kind = AlgorithmKind::laplace;
  la.mean_init.kind = MeanInit::Kind::fixed;
  la.mean_init.value = Vector::Constant(1, 1.0);
  la.iterations = 10;
  la.line_search.max_backtracks = 0;
  la.line_search.t_init = 1e6;  // first trial step always overshoots
  cfg.algorithms = {la};
  const fs::path dir = scratch("failures");
  const ExperimentReport r = run_experiment(cfg, dir.string(), 1);
  EXPECT_EQ(r.failures.size(), 2u);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest.at("failures").size(), 2u);
  EXPECT_EQ(r.algorithms[0].rows[0].status, "failed");
}

TEST(Experiment, OutputRootAndStems) {
  EXPECT_EQ(trace_stem(7), "trial_0007");
  ::setenv("CVI_OUTPUT_ROOT", "/tmp/xyz", 1);
  EXPECT_EQ(default_output_root(), "/tmp/xyz");
  ::unsetenv("CVI_OUTPUT_ROOT");
  EXPECT_EQ(default_output_root(), "cvi-output");
}
