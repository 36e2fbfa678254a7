#include "cvi/harness/model_factory.hpp"

#include "cvi/bayesian_gmm.hpp"
#include "cvi/convexity_example.hpp"
#include "cvi/dataset.hpp"
#include "cvi/errors.hpp"
#include "cvi/gaussian_mixture.hpp"
#include "cvi/spike_slab.hpp"
#include "cvi/synthetic_bvm.hpp"

#include <charconv>
#include <set>

namespace cvi::harness {

using nlohmann::json;

namespace {

class Params {
 public:
  Params(json j, std::string kind) : j_(std::move(j)), kind_(std::move(kind)) {
    if (!j_.is_object()) throw ConfigError("params of model '" + kind_ + "' must be an object");
  }

  double number(const std::string& key, double fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    if (!j_[key].is_number()) throw ConfigError(where(key) + " must be a number");
    return j_[key].get<double>();
  }

  long integer(const std::string& key, long fallback) {
    const double v = number(key, static_cast<double>(fallback));
    if (v != static_cast<double>(static_cast<long>(v))) throw ConfigError(where(key) + " must be an integer");
    return static_cast<long>(v);
  }

  std::string string(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key) || !j_[key].is_string()) throw ConfigError(where(key) + " must be a string");
    return j_[key].get<std::string>();
  }

  std::vector<std::string> strings(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) return {};
    try {
      return j_[key].get<std::vector<std::string>>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + " must be a list of strings");
    }
  }

  Vector vector(const std::string& key, const Vector& fallback) {
    seen_.insert(key);
    if (!j_.contains(key)) return fallback;
    return to_vector(j_[key], where(key));
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_[key] : nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw ConfigError("unknown parameter '" + item.key() + "' for model '" + kind_ + "'");
  }

  std::string where(const std::string& key) const { return "model '" + kind_ + "' parameter '" + key + "'"; }

  static Vector to_vector(const json& v, const std::string& where) {
    if (v.is_number()) return Vector::Constant(1, v.get<double>());
    if (!v.is_array()) throw ConfigError(where + " must be a number list");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(where + " must be a number list");
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

  static Matrix to_matrix(const json& v, const std::string& where) {
    if (v.is_number()) return Matrix::Constant(1, 1, v.get<double>());
    if (!v.is_array() || v.empty()) throw ConfigError(where + " must be a nested number list");
    const Vector first = to_vector(v[0], where);
    Matrix out(static_cast<Eigen::Index>(v.size()), first.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vector row = to_vector(v[i], where);
      if (row.size() != first.size()) throw ConfigError(where + " rows differ in length");
      out.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    return out;
  }

 private:
  json j_;
  std::string kind_;
  std::set<std::string> seen_;
};

std::uint64_t seed_param(Params& p, const std::string& key) {
  const long v = p.integer(key, 0);
  if (v < 0) throw ConfigError(p.where(key) + " must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

long positive(Params& p, const std::string& key, long fallback) {
  const long v = p.integer(key, fallback);
  if (v < 1) throw ConfigError(p.where(key) + " must be >= 1");
  return v;
}

std::unique_ptr<TargetModel> build(const std::string& kind, Params& p) {
  if (kind == "trimodal-mixture") return std::make_unique<GaussianMixtureTarget>(trimodal_mixture());
  if (kind == "gaussian") {
    const Vector mean = p.vector("mean", Vector::Zero(1));
    const json* cov = p.raw("cov");
    const Matrix c = cov ? Params::to_matrix(*cov, p.where("cov"))
                         : Matrix::Identity(mean.size(), mean.size());
    return std::make_unique<GaussianMixtureTarget>(gaussian_target(mean, c, positive(p, "n", 1)));
  }
  if (kind == "gaussian-mixture") {
    const Vector w = p.vector("weights", Vector());
    const json* means = p.raw("means");
    const json* covs = p.raw("covariances");
    if (w.size() == 0 || !means || !covs || !means->is_array() || !covs->is_array())
      throw ConfigError("gaussian-mixture needs weights, means and covariances");
    if (means->size() != static_cast<std::size_t>(w.size()) ||
        covs->size() != static_cast<std::size_t>(w.size()))
      throw ConfigError("gaussian-mixture weights, means and covariances differ in length");
    std::vector<Vector> m;
    std::vector<Matrix> c;
    for (std::size_t k = 0; k < means->size(); ++k) {
      m.push_back(Params::to_vector((*means)[k], p.where("means")));
      c.push_back(Params::to_matrix((*covs)[k], p.where("covariances")));
    }
    try {
      return std::make_unique<GaussianMixtureTarget>(std::vector<double>(w.begin(), w.end()),
                                                     std::move(m), std::move(c), positive(p, "n", 1));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("gaussian-mixture: ") + e.what());
    }
  }
  if (kind == "synthetic-bvm") {
    const long n = positive(p, "n", 1000);
    return std::make_unique<SyntheticBvMModel>(make_synthetic_bvm(n, seed_param(p, "data_seed")));
  }
  if (kind == "example1") {
    const long n = positive(p, "n", 10000);
    return std::make_unique<ConvexityExampleModel>(
        make_convexity_example(n, seed_param(p, "data_seed")));
  }
  if (kind == "sparse-regression-synthetic")
    return std::make_unique<SpikeSlabRegressionModel>(
        make_sparse_regression_synthetic(seed_param(p, "data_seed")));
  if (kind == "sparse-regression-csv") {
    const Dataset data = read_csv(p.string("path"));
    const std::string response = p.string("response");
    const auto exclude = p.strings("exclude");
    const double sigma = p.number("sigma", 5.0);
    const double tau1 = p.number("tau1", 0.1);
    const double tau2 = p.number("tau2", 10.0);
    const long subsample = p.integer("subsample", 0);
    return std::make_unique<SpikeSlabRegressionModel>(sparse_regression_from_dataset(
        data, response, exclude, sigma, tau1, tau2, subsample, seed_param(p, "subsample_seed")));
  }
  if (kind == "gmm-synthetic") {
    const auto seed = seed_param(p, "data_seed");
    const long k = positive(p, "K", 3);
    return std::make_unique<BayesianGmmModel>(
        make_gmm_synthetic(seed, static_cast<int>(k), p.number("alpha0", 1.0)));
  }
  if (kind == "gmm-csv") {
    Dataset data = read_csv(p.string("path"));
    const auto columns = p.strings("columns");
    if (!columns.empty()) {
      Dataset picked;
      picked.values.resize(data.values.rows(), static_cast<Eigen::Index>(columns.size()));
      for (std::size_t j = 0; j < columns.size(); ++j)
        picked.values.col(static_cast<Eigen::Index>(j)) = data.values.col(data.column(columns[j]));
      picked.columns = columns;
      data = std::move(picked);
    }
    const long k = positive(p, "K", 3);
    const double alpha0 = p.number("alpha0", 1.0);
    const long subsample = p.integer("subsample", 0);
    return std::make_unique<BayesianGmmModel>(gmm_from_dataset(
        data, static_cast<int>(k), alpha0, subsample, seed_param(p, "subsample_seed")));
  }
  throw ConfigError("unknown model kind '" + kind + "'");
}

}  // namespace

std::unique_ptr<TargetModel> make_model(const ModelSpec& spec, const json& overrides) {
  json params = spec.params.is_null() ? json::object() : spec.params;
  if (!params.is_object() || !overrides.is_object())
    throw ConfigError("model params and overrides must be objects");
  for (const auto& item : overrides.items()) params[item.key()] = item.value();
  Params p(params, spec.kind);
  std::unique_ptr<TargetModel> model;
  try {
    model = build(spec.kind, p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("model '" + spec.kind + "': " + e.what());
  }
  p.finish();
  return model;
}

std::vector<std::string> model_kinds() {
  return {"trimodal-mixture",   "gaussian",      "gaussian-mixture",
          "synthetic-bvm",   "example1",      "sparse-regression-synthetic",
          "sparse-regression-csv", "gmm-synthetic", "gmm-csv"};
}

namespace {

json parse_scalar(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec == std::errc() && ptr == end && !text.empty()) {
    if (text.find_first_of(".eE") == std::string::npos) return json(static_cast<long>(v));
    return json(v);
  }
  return json(text);
}

}  // namespace

ModelSpec parse_model_string(const std::string& text) {
  ModelSpec spec;
  const auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  if (spec.kind.empty()) throw ConfigError("empty model name");
  if (colon == std::string::npos) return spec;
  const std::string rest = text.substr(colon + 1);
  if (!rest.empty() && rest.front() == '{') {
    try {
      spec.params = json::parse(rest);
    } catch (const json::parse_error& e) {
      throw ConfigError("model params are not valid JSON: " + std::string(e.what()));
    }
    if (!spec.params.is_object()) throw ConfigError("model params must be a JSON object");
    return spec;
  }
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConfigError("model parameter '" + item + "' is not key=value");
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      if (value.find(';') != std::string::npos) {
        json list = json::array();
        std::size_t s = 0;
        while (true) {
          const auto semi = value.find(';', s);
          list.push_back(parse_scalar(value.substr(s, semi == std::string::npos ? std::string::npos : semi - s)));
          if (semi == std::string::npos) break;
          s = semi + 1;
        }
        spec.params[key] = list;
      } else {
        spec.params[key] = parse_scalar(value);
      }
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return spec;
}

}  // namespace cvi::harness
