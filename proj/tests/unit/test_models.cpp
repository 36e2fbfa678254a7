#include "cvi/bayesian_gmm.hpp"
#include "cvi/convexity_example.hpp"
#include "cvi/dataset.hpp"
#include "cvi/errors.hpp"
#include "cvi/gaussian_mixture.hpp"
#include "cvi/spike_slab.hpp"
#include "cvi/synthetic_bvm.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace cvi;

namespace {

Vector fd_gradient(const TargetModel& m, const Vector& x) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::abs(x[i]));
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (m.log_density(a) - m.log_density(b)) / (2 * h);
  }
  return g;
}

void expect_gradient_matches(const TargetModel& m, const Vector& x, double tol) {
  const Vector g = m.grad_log_density(x);
  const Vector fd = fd_gradient(m, x);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    EXPECT_NEAR(g[i], fd[i], tol * (1.0 + std::abs(fd[i]))) << "coordinate " << i;
}

void expect_hessian_matches(const TargetModel& m, const Vector& x, double tol) {
  const Matrix h = *m.hessian_log_density(x);
  const Matrix fd = finite_difference_hessian(m, x);
  EXPECT_LT((h - fd).cwiseAbs().maxCoeff(), tol * (1.0 + fd.cwiseAbs().maxCoeff()));
}

}  // namespace

TEST(GaussianMixture, PaperMixtureMatchesOracle) {
  const auto target = trimodal_mixture();
  const auto ref = oracle::trimodal_mixture();
  for (double x : {-60.0, -30.0, -12.5, 0.0, 3.0, 29.0, 75.0}) {
    EXPECT_NEAR(target.log_density(Vector::Constant(1, x)), ref.log_density(x), 1e-12);
    EXPECT_NEAR(target.grad_log_density(Vector::Constant(1, x))[0], ref.dlog_density(x), 1e-12);
  }
}

TEST(GaussianMixture, DensityIntegratesToOne) {
  const auto target = trimodal_mixture();
  const double total = oracle::simpson(
      [&](double x) { return std::exp(target.log_density(Vector::Constant(1, x))); }, -100, 100, 20000);
  EXPECT_NEAR(total, 1.0, 1e-10);
}

TEST(GaussianMixture, GradientAndHessianMatchFiniteDifferences) {
  oracle::Gen gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = gen.integer(1, 4);
    const int k = gen.integer(1, 3);
    std::vector<double> w(k);
    std::vector<Vector> means;
    std::vector<Matrix> covs;
    for (int j = 0; j < k; ++j) {
      w[j] = gen.uniform(0.1, 1.0);
      means.push_back(3.0 * gen.normal_vector(d));
      covs.push_back(gen.spd(d, 0.5, 3.0));
    }
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= s;
    const GaussianMixtureTarget target(w, means, covs);
    const Vector x = 2.0 * gen.normal_vector(d);
    expect_gradient_matches(target, x, 1e-6);
    expect_hessian_matches(target, x, 1e-5);
  }
}

TEST(GaussianMixture, FarTailsStayFinite) {
  const auto target = trimodal_mixture();
  const Vector x = Vector::Constant(1, 1e4);
  EXPECT_TRUE(std::isfinite(target.log_density(x)));
  EXPECT_TRUE(target.grad_log_density(x).allFinite());
}

TEST(GaussianMixture, RejectsBadComponents) {
  const Vector m = Vector::Zero(1);
  const Matrix c = Matrix::Identity(1, 1);
  EXPECT_THROW(GaussianMixtureTarget({0.5}, {m}, {c}), std::invalid_argument);
  EXPECT_THROW(GaussianMixtureTarget({1.0}, {m}, {-c}), std::invalid_argument);
  EXPECT_THROW(GaussianMixtureTarget({1.0}, {m}, {c}, 0), std::invalid_argument);
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  EXPECT_THROW(GaussianMixtureTarget({1.0}, {Vector::Zero(2)}, {asym}), std::invalid_argument);
}

TEST(SyntheticBvM, LogDensityMatchesClosedFormPosterior) {
  for (long n : {10L, 1000L}) {
    const auto model = make_synthetic_bvm(n, 5);
    const auto post = oracle::bvm_posterior(model.data());
    // Equal up to the normalizing constant.
    const double offset = model.log_density(Vector::Constant(1, 0.3)) - post.log_density(0.3);
    for (double x : {-8.0, -4.1, 0.0, 1.0, 2.5, 3.9, 12.0})
      EXPECT_NEAR(model.log_density(Vector::Constant(1, x)) - post.log_density(x), offset,
                  1e-8 * (1 + std::abs(offset)));
  }
}

TEST(SyntheticBvM, DerivativesMatchFiniteDifferences) {
  const auto model = make_synthetic_bvm(100, 2);
  for (double x : {-7.9, -3.0, 0.4, 1.1, 4.2}) {
    expect_gradient_matches(model, Vector::Constant(1, x), 1e-6);
    expect_hessian_matches(model, Vector::Constant(1, x), 1e-4);
  }
}

TEST(SyntheticBvM, DataFollowTheStatedDistribution) {
  const auto model = make_synthetic_bvm(20000, 9);
  double mean = 0, var = 0;
  for (double x : model.data()) mean += x;
  mean /= 20000.0;
  for (double x : model.data()) var += (x - mean) * (x - mean);
  var /= 19999.0;
  EXPECT_NEAR(mean, 3.0, 4 * std::sqrt(10.0 / 20000));
  EXPECT_NEAR(var, 10.0, 0.4);
  EXPECT_THROW(make_synthetic_bvm(0, 1), std::invalid_argument);
}

TEST(ConvexityExample, SecondDerivativeClosedForm) {
  const auto model = make_convexity_example(50, 3);
  const double m = model.data_mean();
  for (double y : {-1.0, -0.2, 0.0, 0.7, 1.3}) {
    const Vector x = Vector::Constant(1, y);
    EXPECT_NEAR(objective(model, x), y * y + m * std::cos(5 * y), 1e-12);
    EXPECT_NEAR(objective_hessian(model, x)(0, 0), 2 - 25 * m * std::cos(5 * y), 1e-10);
    expect_gradient_matches(model, x, 1e-6);
  }
}

TEST(SpikeSlab, DerivativesMatchFiniteDifferences) {
  const auto model = make_sparse_regression_synthetic(4);
  EXPECT_EQ(model.dim(), 5);
  EXPECT_EQ(model.sample_size(), 10);
  EXPECT_DOUBLE_EQ(model.sigma(), 5.0);
  EXPECT_DOUBLE_EQ(model.tau_spike(), 0.1);
  EXPECT_DOUBLE_EQ(model.tau_slab(), 10.0);
  oracle::Gen gen(3);
  for (int t = 0; t < 10; ++t) {
    const Vector b = gen.normal_vector(5);
    expect_gradient_matches(model, b, 1e-6);
    expect_hessian_matches(model, b, 1e-4);
  }
}

TEST(SpikeSlab, LogDensityMatchesDirectFormula) {
  const auto model = make_sparse_regression_synthetic(8);
  const Vector b = (Vector(5) << 0.9, 0.05, -0.02, 0.1, 0.0).finished();
  const Vector r = model.response() - model.features() * b;
  double expect = -0.5 * r.squaredNorm() / 25.0;
  for (int j = 0; j < 5; ++j) {
    const double spike = 0.5 * std::exp(-0.5 * b[j] * b[j] / 0.01) / std::sqrt(2 * M_PI * 0.01);
    const double slab = 0.5 * std::exp(-0.5 * b[j] * b[j] / 100.0) / std::sqrt(2 * M_PI * 100.0);
    expect += std::log(spike + slab);
  }
  // Same up to the Gaussian likelihood normalizer, which does not depend on beta.
  const Vector b2 = Vector::Zero(5);
  const Vector r2 = model.response();
  double expect2 = -0.5 * r2.squaredNorm() / 25.0 + 5 * std::log(0.5 / std::sqrt(2 * M_PI * 0.01) +
                                                                 0.5 / std::sqrt(2 * M_PI * 100.0));
  EXPECT_NEAR(model.log_density(b) - model.log_density(b2), expect - expect2, 1e-9);
}

TEST(SpikeSlab, FromDatasetPicksColumnsAndSubsamples) {
  const Dataset data = parse_csv("y,a,b,id\n1,2,3,9\n4,5,6,9\n7,8,9,9\n10,11,12,9\n");
  const auto model = sparse_regression_from_dataset(data, "y", {"id"}, 5, 0.1, 10, 0, 0);
  EXPECT_EQ(model.dim(), 2);
  EXPECT_EQ(model.sample_size(), 4);
  EXPECT_DOUBLE_EQ(model.features()(2, 1), 9.0);
  const auto sub = sparse_regression_from_dataset(data, "y", {"id"}, 5, 0.1, 10, 2, 1);
  EXPECT_EQ(sub.sample_size(), 2);
  EXPECT_THROW(sparse_regression_from_dataset(data, "nope", {}, 5, 0.1, 10, 0, 0), ConfigError);
}

TEST(BayesianGmm, TransformRoundTripProperty) {
  oracle::Gen gen(21);
  for (int t = 0; t < 50; ++t) {
    const int k = gen.integer(1, 4), d = gen.integer(1, 3);
    GmmParameters p;
    p.weights.resize(k);
    for (int j = 0; j < k; ++j) p.weights[j] = gen.uniform(0.05, 1.0);
    p.weights /= p.weights.sum();
    p.means = Matrix::NullaryExpr(k, d, [&] { return 3 * gen.normal(); });
    p.scales = Matrix::NullaryExpr(k, d, [&] { return gen.uniform(0.1, 3.0); });
    const Vector v = gmm_transform(p);
    ASSERT_EQ(v.size(), k + 2 * k * d);
    // lambda is normalized: logsumexp = 0.
    EXPECT_NEAR(v.head(k).array().exp().sum(), 1.0, 1e-12);
    const GmmParameters back = gmm_inverse_transform(v, k, d);
    EXPECT_LT((back.weights - p.weights).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((back.means - p.means).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((back.scales - p.scales).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BayesianGmm, TransformRejectsInvalidParameters) {
  GmmParameters p;
  p.weights = (Vector(2) << 0.5, 0.5).finished();
  p.means = Matrix::Zero(2, 1);
  p.scales = Matrix::Ones(2, 1);
  EXPECT_NO_THROW(gmm_transform(p));
  GmmParameters bad = p;
  bad.weights << 1.0, 0.0;
  EXPECT_THROW(gmm_transform(bad), std::invalid_argument);
  bad = p;
  bad.weights << 0.6, 0.6;
  EXPECT_THROW(gmm_transform(bad), std::invalid_argument);
  bad = p;
  bad.scales(1, 0) = -1.0;
  EXPECT_THROW(gmm_transform(bad), std::invalid_argument);
}

TEST(BayesianGmm, GradientMatchesFiniteDifferences) {
  const auto model = make_gmm_synthetic(2);
  EXPECT_EQ(model.dim(), 3 + 2 * 3 * 2);
  EXPECT_EQ(model.sample_size(), 400);
  Rng rng = make_rng(7, 0);
  for (int t = 0; t < 5; ++t) {
    const Vector x = *model.sample_prior(rng);
    expect_gradient_matches(model, x, 1e-5);
  }
}

TEST(BayesianGmm, LogDensityMatchesDirectFormula) {
  Matrix data(3, 1);
  data << -1.0, 0.5, 2.0;
  const BayesianGmmModel model(data, 2, 1.5);
  const Vector v = (Vector(6) << 0.3, -0.4, -0.8, 1.1, 0.2, -0.3).finished();
  // lambda ~ LogGamma(1.5), mu ~ N(0,1), tau ~ N(0,1); weights = softmax(lambda).
  const double w0 = std::exp(v[0]) / (std::exp(v[0]) + std::exp(v[1]));
  double expect = 0.0;
  for (int j = 0; j < 2; ++j) expect += 1.5 * v[j] - std::exp(v[j]) - std::lgamma(1.5);
  for (int j = 2; j < 6; ++j) expect += -0.5 * v[j] * v[j] - 0.5 * std::log(2 * M_PI);
  for (int i = 0; i < 3; ++i) {
    double like = 0.0;
    for (int k = 0; k < 2; ++k) {
      const double w = k == 0 ? w0 : 1 - w0;
      const double s = std::exp(v[4 + k]);
      like += w * std::exp(-0.5 * std::pow((data(i, 0) - v[2 + k]) / s, 2)) / (s * std::sqrt(2 * M_PI));
    }
    expect += std::log(like);
  }
  EXPECT_NEAR(model.log_density(v), expect, 1e-9);
}

TEST(Dataset, ParsesAndReportsErrorsWithLineNumbers) {
  const Dataset d = parse_csv("a,b\n1,2.5\n-3,4e2\n");
  EXPECT_EQ(d.columns.size(), 2u);
  EXPECT_DOUBLE_EQ(d.values(1, 1), 400.0);
  EXPECT_EQ(d.column("b"), 1);
  EXPECT_THROW(d.column("c"), ConfigError);
  try {
    parse_csv("a,b\n1,2\n3\n");
    FAIL() << "expected a field-count error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_csv("a,b\n1,x\n"), ConfigError);
  EXPECT_THROW(read_csv("/nonexistent/file.csv"), ConfigError);
}

TEST(Dataset, SubsampleIsAWithoutReplacementSubset) {
  const auto rows = subsample_rows(97, 30, 4);
  ASSERT_EQ(rows.size(), 30u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i - 1], rows[i]);
  EXPECT_EQ(subsample_rows(10, 0, 4).size(), 10u);
  EXPECT_EQ(subsample_rows(97, 30, 4), rows);
}

TEST(Objective, ThrowsOnNonFiniteDensity) {
  struct Broken final : TargetModel {
    std::string name() const override { return "broken"; }
    int dim() const override { return 1; }
    long sample_size() const override { return 1; }
    double log_density(const Vector&) const override { return std::nan(""); }
    Vector grad_log_density(const Vector&) const override { return Vector::Zero(1); }
  } broken;
  EXPECT_THROW(objective(broken, Vector::Zero(1)), EvaluationError);
}
