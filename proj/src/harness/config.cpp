#include "cvi/harness/config.hpp"

#include "cvi/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace cvi::harness {

using nlohmann::json;

const char* to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::smap:
      return "smap";
    case AlgorithmKind::csvi:
      return "csvi";
    case AlgorithmKind::svi:
      return "svi";
    case AlgorithmKind::csvi_adam:
      return "csvi-adam";
    case AlgorithmKind::cla:
      return "cla";
    case AlgorithmKind::laplace:
      return "laplace";
  }
  return "unknown";
}

AlgorithmKind algorithm_kind_from_string(const std::string& name) {
  for (AlgorithmKind k : {AlgorithmKind::smap, AlgorithmKind::csvi, AlgorithmKind::svi,
                          AlgorithmKind::csvi_adam, AlgorithmKind::cla, AlgorithmKind::laplace})
    if (name == to_string(k)) return k;
  throw ConfigError("unknown algorithm kind '" + name + "'");
}

namespace {

const char* to_string(MeanInit::Kind k) {
  switch (k) {
    case MeanInit::Kind::smap:
      return "smap";
    case MeanInit::Kind::uniform:
      return "uniform";
    case MeanInit::Kind::prior:
      return "prior";
    case MeanInit::Kind::fixed:
      return "fixed";
  }
  return "unknown";
}

const char* to_string(ScaleInit::Kind k) {
  switch (k) {
    case ScaleInit::Kind::identity:
      return "identity";
    case ScaleInit::Kind::log_uniform:
      return "log-uniform";
    case ScaleInit::Kind::fixed:
      return "fixed";
  }
  return "unknown";
}

const char* to_string(StepSchedule::Form f) {
  return f == StepSchedule::Form::shifted_power ? "shifted-power" : "offset-power";
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

// Strict object reader: every key must be consumed, so typos surface as errors.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }
  ~Reader() = default;

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  T get(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
    return convert<T>(j_.at(key), key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return convert<T>(j_.at(key), key);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
    return j_.at(key);
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
  }

  const std::string& where() const { return where_; }

 private:
  template <typename T>
  T convert(const json& v, const std::string& key) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        // NaN and infinities serialize as null; a config never needs them.
        if (!v.is_number()) throw ConfigError(where_ + "." + key + " must be a number");
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_integer()) throw ConfigError(where_ + "." + key + " must be an integer");
        if constexpr (std::is_unsigned_v<T>)
          if (v.is_number_integer() && !v.is_number_unsigned())
            throw ConfigError(where_ + "." + key + " must be nonnegative");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(where_ + "." + key + " must be a boolean");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(where_ + "." + key + " must be a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Vector read_vector(const json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(where + " must be an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

json schedule_json(const StepSchedule& s) {
  return {{"scale", s.scale},
          {"exponent", s.exponent},
          {"form", to_string(s.form)},
          {"allow_any_exponent", s.allow_any_exponent}};
}

StepSchedule schedule_from(const json& j, const std::string& where) {
  Reader r(j, where);
  StepSchedule s;
  s.scale = r.get<double>("scale");
  s.exponent = r.get<double>("exponent");
  const auto form = r.get<std::string>("form", "shifted-power");
  if (form == "shifted-power")
    s.form = StepSchedule::Form::shifted_power;
  else if (form == "offset-power")
    s.form = StepSchedule::Form::offset_power;
  else
    throw ConfigError(where + ".form: unknown schedule form '" + form + "'");
  s.allow_any_exponent = r.get<bool>("allow_any_exponent", false);
  r.finish();
  return s;
}

json algorithm_json(const AlgorithmSpec& a) {
  json mean = {{"kind", to_string(a.mean_init.kind)}};
  switch (a.mean_init.kind) {
    case MeanInit::Kind::uniform:
      mean["low"] = a.mean_init.low;
      mean["high"] = a.mean_init.high;
      break;
    case MeanInit::Kind::fixed:
      mean["value"] = vector_json(a.mean_init.value);
      break;
    case MeanInit::Kind::smap:
      mean["from"] = a.mean_init.smap_id;
      break;
    case MeanInit::Kind::prior:
      break;
  }
  json scale = {{"kind", to_string(a.scale_init.kind)}};
  if (a.scale_init.kind == ScaleInit::Kind::log_uniform) {
    scale["low"] = a.scale_init.low;
    scale["high"] = a.scale_init.high;
  } else if (a.scale_init.kind == ScaleInit::Kind::fixed) {
    scale["value"] = a.scale_init.value;
  }
  json out = {{"id", a.id},
              {"kind", to_string(a.kind)},
              {"model_overrides", a.model_overrides},
              {"mean_init", mean},
              {"schedule", schedule_json(a.schedule)},
              {"iterations", a.iterations},
              {"record_every", a.record_every}};
  switch (a.kind) {
    case AlgorithmKind::smap:
      out["alpha"] = a.alpha;
      out["samples"] = a.samples;
      out["adam"] = a.adam;
      break;
    case AlgorithmKind::csvi:
    case AlgorithmKind::svi:
    case AlgorithmKind::csvi_adam:
      out["scale_init"] = scale;
      out["elbo_checkpoint_every"] = a.elbo_checkpoint_every;
      out["elbo_samples"] = a.elbo_samples;
      out["final_elbo_samples"] = a.final_elbo_samples;
      if (a.kind == AlgorithmKind::svi) {
        out["adam"] = a.adam;
        out["svi_floor"] = a.svi_floor;
        out["svi_log_diagonal"] = a.svi_log_diagonal;
      }
      break;
    case AlgorithmKind::cla:
    case AlgorithmKind::laplace:
      out["line_search"] = {{"beta", a.line_search.beta},
                            {"t_init", a.line_search.t_init},
                            {"max_backtracks", a.line_search.max_backtracks}};
      out["grad_tolerance"] = a.grad_tolerance;
      out["final_elbo_samples"] = a.final_elbo_samples;
      break;
  }
  if (a.kind == AlgorithmKind::smap || a.kind == AlgorithmKind::svi ||
      a.kind == AlgorithmKind::csvi_adam)
    out["adam_settings"] = {{"beta1", a.adam_settings.beta1},
                            {"beta2", a.adam_settings.beta2},
                            {"eps", a.adam_settings.eps}};
  return out;
}

AlgorithmSpec algorithm_from(const json& j, const std::string& where) {
  Reader r(j, where);
  AlgorithmSpec a;
  a.id = r.get<std::string>("id");
  a.kind = algorithm_kind_from_string(r.get<std::string>("kind"));
  a.model_overrides = r.get<json>("model_overrides", json::object());
  if (!a.model_overrides.is_object()) throw ConfigError(where + ".model_overrides must be an object");

  {
    Reader m(r.raw("mean_init"), where + ".mean_init");
    const auto kind = m.get<std::string>("kind");
    if (kind == "uniform") {
      a.mean_init.kind = MeanInit::Kind::uniform;
      a.mean_init.low = m.get<double>("low");
      a.mean_init.high = m.get<double>("high");
    } else if (kind == "fixed") {
      a.mean_init.kind = MeanInit::Kind::fixed;
      a.mean_init.value = read_vector(m.raw("value"), m.where() + ".value");
    } else if (kind == "smap") {
      a.mean_init.kind = MeanInit::Kind::smap;
      a.mean_init.smap_id = m.get<std::string>("from");
    } else if (kind == "prior") {
      a.mean_init.kind = MeanInit::Kind::prior;
    } else {
      throw ConfigError(m.where() + ": unknown mean init '" + kind + "'");
    }
    m.finish();
  }
  a.schedule = schedule_from(r.raw("schedule"), where + ".schedule");
  a.iterations = r.get<long>("iterations");
  a.record_every = r.get<long>("record_every", 100L);

  const bool vi = a.kind == AlgorithmKind::csvi || a.kind == AlgorithmKind::svi ||
                  a.kind == AlgorithmKind::csvi_adam;
  if (a.kind == AlgorithmKind::smap) {
    a.alpha = r.get<double>("alpha");
    a.samples = r.get<int>("samples", 100);
    a.adam = r.get<bool>("adam", false);
  }
  if (vi) {
    if (r.has("scale_init")) {
      Reader s(r.raw("scale_init"), where + ".scale_init");
      const auto kind = s.get<std::string>("kind");
      if (kind == "identity") {
        a.scale_init.kind = ScaleInit::Kind::identity;
      } else if (kind == "log-uniform") {
        a.scale_init.kind = ScaleInit::Kind::log_uniform;
        a.scale_init.low = s.get<double>("low");
        a.scale_init.high = s.get<double>("high");
      } else if (kind == "fixed") {
        a.scale_init.kind = ScaleInit::Kind::fixed;
        a.scale_init.value = s.get<double>("value");
      } else {
        throw ConfigError(s.where() + ": unknown scale init '" + kind + "'");
      }
      s.finish();
    }
    a.elbo_checkpoint_every = r.get<long>("elbo_checkpoint_every", 1000L);
    a.elbo_samples = r.get<int>("elbo_samples", 100);
    a.final_elbo_samples = r.get<int>("final_elbo_samples", 1000);
    if (a.kind == AlgorithmKind::svi) {
      a.adam = r.get<bool>("adam", false);
      a.svi_floor = r.get<double>("svi_floor", 1e-10);
      a.svi_log_diagonal = r.get<bool>("svi_log_diagonal", false);
    }
  }
  if (a.kind == AlgorithmKind::cla || a.kind == AlgorithmKind::laplace) {
    if (r.has("line_search")) {
      Reader ls(r.raw("line_search"), where + ".line_search");
      a.line_search.beta = ls.get<double>("beta", 0.5);
      a.line_search.t_init = ls.get<double>("t_init", 1.0);
      a.line_search.max_backtracks = ls.get<int>("max_backtracks", 60);
      ls.finish();
    }
    a.grad_tolerance = r.get<double>("grad_tolerance", 1e-8);
    a.final_elbo_samples = r.get<int>("final_elbo_samples", 1000);
  }
  if (r.has("adam_settings")) {
    Reader ad(r.raw("adam_settings"), where + ".adam_settings");
    a.adam_settings.beta1 = ad.get<double>("beta1", 0.9);
    a.adam_settings.beta2 = ad.get<double>("beta2", 0.9999);
    a.adam_settings.eps = ad.get<double>("eps", 1e-8);
    ad.finish();
  }
  r.finish();
  return a;
}

bool is_vi(AlgorithmKind k) {
  return k == AlgorithmKind::csvi || k == AlgorithmKind::svi || k == AlgorithmKind::csvi_adam;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (schema_version != kConfigSchemaVersion)
    throw ConfigError("unsupported config schema version " + std::to_string(schema_version));
  if (model.kind.empty()) throw ConfigError("model kind is empty");
  if (!model.params.is_object()) throw ConfigError("model params must be an object");
  if (model.params.contains("path")) {
    if (!model.params["path"].is_string()) throw ConfigError("model path must be a string");
    const std::string path = model.params["path"].get<std::string>();
    if (!std::filesystem::exists(path)) throw ConfigError("dataset not found: " + path);
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (algorithms.empty()) throw ConfigError("no algorithms configured");

  std::set<std::string> ids;
  std::set<std::string> smap_ids;
  for (const AlgorithmSpec& a : algorithms) {
    const std::string where = "algorithm '" + a.id + "'";
    if (a.id.empty() || a.id.find_first_of("/\\ .") != std::string::npos)
      throw ConfigError("algorithm ids must be nonempty and free of '/', '\\\\', '.' and spaces");
    if (!ids.insert(a.id).second) throw ConfigError("duplicate algorithm id '" + a.id + "'");
    if (a.iterations < 0) throw ConfigError(where + ": iterations must be >= 0");
    if (a.record_every < 1) throw ConfigError(where + ": record_every must be >= 1");
    try {
      a.schedule.validate();
      if (a.kind == AlgorithmKind::cla || a.kind == AlgorithmKind::laplace) a.line_search.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
    switch (a.mean_init.kind) {
      case MeanInit::Kind::smap:
        if (a.kind == AlgorithmKind::smap)
          throw ConfigError(where + ": smap cannot be initialized from smap");
        if (!smap_ids.count(a.mean_init.smap_id))
          throw ConfigError(where + ": mean init refers to unknown or later smap '" +
                            a.mean_init.smap_id + "'");
        break;
      case MeanInit::Kind::uniform:
        if (!(a.mean_init.low < a.mean_init.high))
          throw ConfigError(where + ": uniform init needs low < high");
        break;
      case MeanInit::Kind::fixed:
        if (a.mean_init.value.size() == 0 || !a.mean_init.value.allFinite())
          throw ConfigError(where + ": fixed init must be a nonempty finite vector");
        break;
      case MeanInit::Kind::prior:
        break;
    }
    if (a.kind == AlgorithmKind::smap) {
      if (!(a.alpha >= 0.0)) throw ConfigError(where + ": alpha must be >= 0 (0 = default)");
      if (a.samples < 1) throw ConfigError(where + ": samples must be >= 1");
      smap_ids.insert(a.id);
    }
    if (is_vi(a.kind)) {
      if (a.scale_init.kind == ScaleInit::Kind::log_uniform &&
          !(a.scale_init.low > 0.0 && a.scale_init.low < a.scale_init.high))
        throw ConfigError(where + ": log-uniform scale init needs 0 < low < high");
      if (a.scale_init.kind == ScaleInit::Kind::fixed && !(a.scale_init.value > 0.0))
        throw ConfigError(where + ": fixed scale must be positive");
      if (a.elbo_samples < 2 || a.final_elbo_samples < 2)
        throw ConfigError(where + ": ELBO estimates need at least 2 samples");
      if (a.elbo_checkpoint_every < 0)
        throw ConfigError(where + ": elbo_checkpoint_every must be >= 0");
      if (!(a.svi_floor > 0.0)) throw ConfigError(where + ": svi_floor must be positive");
    }
  }
  if (capture) {
    if (capture->indices.empty() ||
        capture->center.size() != static_cast<Eigen::Index>(capture->indices.size()) ||
        capture->tolerance.size() != capture->center.size())
      throw ConfigError("capture criterion needs matching indices, center and tolerance");
  }
}

json to_json(const ExperimentConfig& cfg) {
  json algorithms = json::array();
  for (const AlgorithmSpec& a : cfg.algorithms) algorithms.push_back(algorithm_json(a));
  json out = {{"schema_version", cfg.schema_version},
              {"name", cfg.name},
              {"model", {{"kind", cfg.model.kind}, {"params", cfg.model.params}}},
              {"algorithms", algorithms},
              {"trials", cfg.trials},
              {"base_seed", cfg.base_seed},
              {"output_dir", cfg.output_dir}};
  if (cfg.capture)
    out["capture"] = {{"name", cfg.capture->name},
                      {"indices", cfg.capture->indices},
                      {"center", vector_json(cfg.capture->center)},
                      {"tolerance", vector_json(cfg.capture->tolerance)}};
  return out;
}

ExperimentConfig config_from_json(const json& j) {
  Reader r(j, "config");
  ExperimentConfig cfg;
  cfg.schema_version = r.get<int>("schema_version");
  if (cfg.schema_version != kConfigSchemaVersion)
    throw ConfigError("unsupported config schema version " + std::to_string(cfg.schema_version));
  cfg.name = r.get<std::string>("name", "");
  {
    Reader m(r.raw("model"), "config.model");
    cfg.model.kind = m.get<std::string>("kind");
    cfg.model.params = m.get<json>("params", json::object());
    m.finish();
  }
  const json& algs = r.raw("algorithms");
  if (!algs.is_array()) throw ConfigError("config.algorithms must be an array");
  for (std::size_t i = 0; i < algs.size(); ++i)
    cfg.algorithms.push_back(algorithm_from(algs[i], "config.algorithms[" + std::to_string(i) + "]"));
  cfg.trials = r.get<long>("trials", 1L);
  cfg.base_seed = r.get<std::uint64_t>("base_seed", std::uint64_t{0});
  cfg.output_dir = r.get<std::string>("output_dir", "");
  if (r.has("capture")) {
    Reader c(r.raw("capture"), "config.capture");
    CaptureCriterion crit;
    crit.name = c.get<std::string>("name", "capture");
    crit.indices = c.get<std::vector<int>>("indices");
    crit.center = read_vector(c.raw("center"), "config.capture.center");
    crit.tolerance = read_vector(c.raw("tolerance"), "config.capture.tolerance");
    c.finish();
    cfg.capture = std::move(crit);
  }
  r.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path);
  out << to_json(cfg).dump(2) << '\n';
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output_dir");
  // nlohmann::json objects are key-ordered, so dump() is canonical.
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

AlgorithmSpec smap_spec(std::string id, double alpha, StepSchedule schedule, MeanInit init) {
  AlgorithmSpec a;
  a.id = std::move(id);
  a.kind = AlgorithmKind::smap;
  a.alpha = alpha;
  a.samples = 100;
  a.iterations = 20000;
  a.schedule = schedule;
  a.mean_init = std::move(init);
  return a;
}

AlgorithmSpec vi_spec(std::string id, AlgorithmKind kind, StepSchedule schedule, MeanInit mean,
                      ScaleInit scale) {
  AlgorithmSpec a;
  a.id = std::move(id);
  a.kind = kind;
  a.schedule = schedule;
  a.iterations = 100000;
  a.mean_init = std::move(mean);
  a.scale_init = scale;
  return a;
}

AlgorithmSpec laplace_spec(std::string id, AlgorithmKind kind, double t_init, MeanInit mean) {
  AlgorithmSpec a;
  a.id = std::move(id);
  a.kind = kind;
  a.iterations = 20000;
  a.schedule = StepSchedule::constant(t_init);  // unused by the line search; kept for the trace
  a.line_search.t_init = t_init;
  a.line_search.beta = 0.5;
  a.mean_init = std::move(mean);
  return a;
}

MeanInit uniform_init(double low, double high) {
  MeanInit m;
  m.kind = MeanInit::Kind::uniform;
  m.low = low;
  m.high = high;
  return m;
}

MeanInit from_smap(const std::string& id) {
  MeanInit m;
  m.kind = MeanInit::Kind::smap;
  m.smap_id = id;
  return m;
}

MeanInit prior_init() {
  MeanInit m;
  m.kind = MeanInit::Kind::prior;
  return m;
}

ScaleInit log_uniform(double low, double high) {
  ScaleInit s;
  s.kind = ScaleInit::Kind::log_uniform;
  s.low = low;
  s.high = high;
  return s;
}

StepSchedule harmonic(double c) { return StepSchedule{c, 1.0, StepSchedule::Form::shifted_power, false}; }

}  // namespace

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.base_seed = 1;
  if (name == "mixture") {
    cfg.model.kind = "trimodal-mixture";
    cfg.trials = 100;
    cfg.algorithms.push_back(smap_spec(
        "smap", 100.0, StepSchedule{50.0, 0.7, StepSchedule::Form::shifted_power, false},
        uniform_init(-50, 50)));
    cfg.algorithms.push_back(
        vi_spec("csvi", AlgorithmKind::csvi, harmonic(5.0), from_smap("smap"), ScaleInit{}));
    cfg.algorithms.push_back(vi_spec("svi", AlgorithmKind::svi, harmonic(15.0),
                                     uniform_init(-50, 50), log_uniform(0.1, 10.0)));
    cfg.algorithms.push_back(laplace_spec("cla", AlgorithmKind::cla, 1.0, from_smap("smap")));
    cfg.algorithms.push_back(
        laplace_spec("laplace", AlgorithmKind::laplace, 1.0, uniform_init(-50, 50)));
    Vector center(2), tol(2);
    center << 0.0, 2.0;
    tol << 0.2, 0.2;
    cfg.capture = CaptureCriterion{"global-optimum", {0, 1}, center, tol};
  } else if (name == "bvm-smap") {
    cfg.model.kind = "synthetic-bvm";
    cfg.model.params = {{"n", 1000}, {"data_seed", 0}};
    cfg.trials = 100;
    const StepSchedule sched{15.0, 0.9, StepSchedule::Form::offset_power, false};
    for (long n : {10L, 100L, 1000L, 10000L}) {
      AlgorithmSpec a = smap_spec("smap_n" + std::to_string(n), 0.0, sched, uniform_init(-50, 50));
      a.model_overrides = {{"n", n}};
      cfg.algorithms.push_back(std::move(a));
    }
  } else if (name == "sparse-regression-synthetic") {
    cfg.model.kind = "sparse-regression-synthetic";
    cfg.model.params = {{"data_seed", 0}};
    cfg.trials = 100;
    AlgorithmSpec smap = smap_spec("smap", 2.0, StepSchedule::constant(0.01), prior_init());
    smap.adam = true;
    cfg.algorithms.push_back(smap);
    const StepSchedule lr = StepSchedule::constant(0.001);
    cfg.algorithms.push_back(
        vi_spec("csvi", AlgorithmKind::csvi_adam, lr, from_smap("smap"), ScaleInit{}));
    cfg.algorithms.push_back(
        vi_spec("csvi_rand", AlgorithmKind::csvi_adam, lr, from_smap("smap"), log_uniform(0.1, 100)));
    AlgorithmSpec svi = vi_spec("svi", AlgorithmKind::svi, lr, prior_init(), ScaleInit{});
    svi.adam = true;
    cfg.algorithms.push_back(svi);
    svi.id = "svi_rand";
    svi.scale_init = log_uniform(0.1, 100);
    cfg.algorithms.push_back(svi);
    cfg.algorithms.push_back(laplace_spec("cla", AlgorithmKind::cla, 0.01, from_smap("smap")));
    cfg.algorithms.push_back(laplace_spec("laplace", AlgorithmKind::laplace, 0.01, prior_init()));
  } else if (name == "gmm-synthetic") {
    cfg.model.kind = "gmm-synthetic";
    cfg.model.params = {{"data_seed", 0}, {"K", 3}, {"alpha0", 1.0}};
    cfg.trials = 100;
    AlgorithmSpec smap = smap_spec("smap", 1.0, StepSchedule::constant(0.1), prior_init());
    smap.adam = true;
    cfg.algorithms.push_back(smap);
    const StepSchedule lr = StepSchedule::constant(0.01);
    cfg.algorithms.push_back(
        vi_spec("csvi", AlgorithmKind::csvi_adam, lr, from_smap("smap"), ScaleInit{}));
    AlgorithmSpec svi = vi_spec("svi", AlgorithmKind::svi, lr, prior_init(), ScaleInit{});
    svi.adam = true;
    cfg.algorithms.push_back(svi);
    svi.id = "svi_rand";
    svi.scale_init = log_uniform(0.1, 100);
    cfg.algorithms.push_back(svi);
    cfg.algorithms.push_back(laplace_spec("cla", AlgorithmKind::cla, 1.0, from_smap("smap")));
    cfg.algorithms.push_back(laplace_spec("laplace", AlgorithmKind::laplace, 1.0, prior_init()));
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  cfg.validate();
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"mixture", "bvm-smap", "sparse-regression-synthetic", "gmm-synthetic"};
}

}  // namespace cvi::harness
