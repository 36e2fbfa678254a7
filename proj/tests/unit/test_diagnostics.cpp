#include "cvi/convexity_example.hpp"
#include "cvi/diagnostics.hpp"
#include "cvi/gaussian_mixture.hpp"
#include "cvi/smoothed_map.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace cvi;

TEST(GaussLegendre, ExactForLowDegreeMoments) {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  ASSERT_EQ(x.size(), 5u);
  // Five nodes integrate every polynomial of degree <= 9 exactly.
  for (int k = 0; k <= 9; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * std::pow(x[i], k);
    EXPECT_NEAR(sum, k % 2 ? 0.0 : 2.0 / (k + 1), 1e-13) << k;
  }
  EXPECT_THROW(gauss_legendre(0, x, w), std::invalid_argument);
}

TEST(ViObjective1d, MatchesSimpsonOracleProperty) {
  oracle::Gen gen(10);
  const auto target = trimodal_mixture();
  const auto ref = oracle::trimodal_mixture();
  for (int t = 0; t < 30; ++t) {
    const double mu = gen.uniform(-10, 10);
    const double L = gen.uniform(0.3, 4.0);
    EXPECT_NEAR(vi_objective_1d(target, mu, L), oracle::vi_objective_1d(ref, 1, mu, L), 1e-6);
  }
  const auto g = gaussian_target(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 2.0), 5);
  EXPECT_NEAR(vi_objective_1d(g, 0.3, 1.7),
              oracle::gaussian_vi_objective(Vector::Constant(1, 1.0), Matrix::Constant(1, 1, 2.0), 5,
                                            Vector::Constant(1, 0.3), Matrix::Constant(1, 1, 1.7)),
              1e-12);
  EXPECT_THROW(vi_objective_1d(target, 0.0, 0.0), std::invalid_argument);
}

TEST(HessianProbe, AnalyticAndFiniteDifferenceAgree) {
  const auto model = make_convexity_example(50, 3);
  const ConvexityProbe a = hessian_probe(model, Vector::Zero(1), 2.0, 101);
  const ConvexityProbe b = hessian_probe(model, Vector::Zero(1), 2.0, 101, true);
  EXPECT_EQ(a.h, 0.0);
  EXPECT_GT(b.h, 0.0);
  EXPECT_NEAR(a.min_eig, b.min_eig, 1e-5);
  EXPECT_NEAR(a.max_eig, b.max_eig, 1e-5);
  // On the grid min over y of 2 - 25 m cos 5y is 2 - 25 |m| up to grid resolution.
  const double m = model.data_mean();
  EXPECT_NEAR(a.min_eig, 2 - 25 * std::abs(m), 25 * std::abs(m) * 0.01);
  EXPECT_EQ(a.grid.size(), 101u);
}

TEST(HessianProbe, GaussianHasConstantEigenvalues) {
  Matrix S(2, 2);
  S << 2.0, 0.0, 0.0, 0.5;
  const auto target = gaussian_target(Vector::Zero(2), S, 4);
  const ConvexityProbe p = hessian_probe(target, Vector::Zero(2), 1.0, 5);
  // grad^2 f_n = S^{-1} / n
  EXPECT_NEAR(p.min_eig, 0.5 / 4, 1e-12);
  EXPECT_NEAR(p.max_eig, 2.0 / 4, 1e-12);
  EXPECT_EQ(p.grid.size(), 25u);
}

TEST(ViObjectiveProbe, GaussianTargetIsConvex) {
  const auto target = gaussian_target(Vector::Zero(1), Matrix::Identity(1, 1), 1);
  const ConvexityProbe p = vi_objective_probe_1d(target, 0.0, 2.0, 1.0, 0.5, 5);
  // Hessian is diag(1, 1/L^2 + 1) here.
  EXPECT_NEAR(p.min_eig, 1.0, 1e-4);
  EXPECT_NEAR(p.max_eig, 1.0 / 0.25 + 1.0, 1e-3);
  EXPECT_THROW(vi_objective_probe_1d(target, 0.0, 1.0, 0.5, 0.5, 3), std::invalid_argument);
}

TEST(Capture, CriterionAndMoments) {
  CaptureCriterion c{"box", {0, 1}, (Vector(2) << 0.0, 2.0).finished(), (Vector(2) << 0.2, 0.2).finished()};
  EXPECT_TRUE(c.contains((Vector(2) << 0.1, 1.85).finished()));
  EXPECT_FALSE(c.contains((Vector(2) << 0.1, 2.25).finished()));
  EXPECT_NEAR(c.distance((Vector(2) << 3.0, 6.0).finished()), 5.0, 1e-15);

  RunTrace vi;
  vi.dim = 1;
  vi.sample_size = 4;
  vi.summary = TraceSummary{};
  vi.summary->param_layout = "mu_L";
  vi.summary->params = (Vector(2) << 0.1, 4.0).finished();  // sd = 4 / sqrt(4)
  RunTrace la;
  la.dim = 1;
  la.summary = TraceSummary{};
  la.summary->param_layout = "theta_sigma";
  la.summary->params = (Vector(2) << 30.0, 9.0).finished();
  RunTrace none;
  const Vector vm = summary_moments(vi);
  EXPECT_DOUBLE_EQ(vm[1], 2.0);
  EXPECT_DOUBLE_EQ(summary_moments(la)[1], 3.0);
  EXPECT_THROW(summary_moments(none), std::invalid_argument);

  const CaptureReport rep = capture_rate({vi, la, none}, c);
  EXPECT_EQ(rep.trials, 3);
  EXPECT_EQ(rep.captured, 1);
  EXPECT_TRUE(rep.hits[0]);
  EXPECT_FALSE(rep.hits[1]);
  EXPECT_TRUE(std::isinf(rep.distances[2]));
}

TEST(ConsistencyTrend, MediansAndSlope) {
  std::map<long, std::vector<Vector>> est;
  // Errors proportional to alpha_n give slope exactly 1 against log alpha.
  for (long n : {10L, 100L, 1000L}) {
    const double a = default_alpha(n);
    est[n] = {Vector::Constant(1, 3.0 + a), Vector::Constant(1, 3.0 - a), Vector::Constant(1, 3.0 + 100 * a)};
  }
  const TrendReport r = consistency_trend(est, Vector::Constant(1, 3.0));
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_NEAR(r.rows[0].median_error, default_alpha(10), 1e-12);
  EXPECT_TRUE(r.non_increasing);
  EXPECT_NEAR(r.slope_vs_alpha, 1.0, 1e-10);

  est[10000] = {Vector::Constant(1, 10.0)};
  EXPECT_FALSE(consistency_trend(est, Vector::Constant(1, 3.0)).non_increasing);
}
