#include "cvi/errors.hpp"
#include "cvi/laplace.hpp"
#include "cvi/smoothed_map.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cvi;

namespace {

// log pi = -n f with f(x) = sum_i w_i x_i^4 / 4 + x_i^2 / 2: smooth, convex, non-quadratic.
class QuarticTarget final : public TargetModel {
 public:
  explicit QuarticTarget(Vector w) : w_(std::move(w)) {}
  std::string name() const override { return "quartic"; }
  int dim() const override { return static_cast<int>(w_.size()); }
  long sample_size() const override { return 1; }
  double log_density(const Vector& t) const override {
    return -(w_.array() * t.array().pow(4) / 4 + t.array().square() / 2).sum();
  }
  Vector grad_log_density(const Vector& t) const override {
    return -(w_.array() * t.array().cube() + t.array()).matrix();
  }

 private:
  Vector w_;
};

class FlatTarget final : public TargetModel {
 public:
  std::string name() const override { return "flat"; }
  int dim() const override { return 1; }
  long sample_size() const override { return 1; }
  // Gradient claims descent but the density never improves.
  double log_density(const Vector&) const override { return 0.0; }
  Vector grad_log_density(const Vector&) const override { return Vector::Ones(1); }
};

}  // namespace

TEST(Backtracking, MatchesIndependentArmijoSearchProperty) {
  oracle::Gen gen(6);
  for (int t = 0; t < 100; ++t) {
    const int d = gen.integer(1, 4);
    Vector w(d);
    for (int i = 0; i < d; ++i) w[i] = gen.uniform(0.0, 3.0);
    const QuarticTarget target(w);
    const Vector theta = gen.normal_vector(d) * 2.0;
    LineSearchConfig ls;
    ls.t_init = gen.uniform(0.1, 5.0);
    ls.beta = gen.uniform(0.2, 0.8);
    const auto f = [&](const Vector& x) { return -target.log_density(x); };
    const Vector g = -target.grad_log_density(theta);
    const int expect = oracle::armijo_backtracks(f, theta, g, ls.t_init, ls.beta, ls.max_backtracks);
    ASSERT_GE(expect, 0);
    const BacktrackingStep step = backtracking_step(target, theta, ls);
    EXPECT_EQ(step.backtracks, expect);
    EXPECT_NEAR(step.t, ls.t_init * std::pow(ls.beta, expect), 1e-14 * ls.t_init);
    EXPECT_LE(step.f_after, step.f_before - 0.5 * step.t * g.squaredNorm() + 1e-14);
  }
}

TEST(Backtracking, ExhaustionRaisesLineSearchError) {
  const FlatTarget target;
  LineSearchConfig ls;
  ls.max_backtracks = 5;
  try {
    backtracking_step(target, Vector::Zero(1), ls);
    FAIL();
  } catch (const LineSearchError& e) {
    EXPECT_DOUBLE_EQ(e.grad_norm(), 1.0);
  }
  ls.beta = 1.0;
  EXPECT_THROW(ls.validate(), std::invalid_argument);
}

TEST(LaplaceRun, ExactOnGaussianTarget) {
  const Vector m = (Vector(2) << 0.7, -1.2).finished();
  Matrix S(2, 2);
  S << 1.5, 0.3, 0.3, 0.6;
  const auto target = gaussian_target(m, S, 1);
  LaplaceConfig cfg;
  cfg.line_search.t_init = 1.0;
  cfg.iterations = 5000;
  const LaplaceResult r = laplace_run(target, Vector::Constant(2, 5.0), cfg);
  EXPECT_LT((r.theta_star - m).norm(), 1e-7);
  EXPECT_LT((r.sigma - S).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_TRUE(r.hessian_pd);
  EXPECT_EQ(r.trace.summary->stop_reason, "gradient_norm");
  EXPECT_NEAR(r.trace.summary->final_elbo, 0.0, 1e-8);
  const GaussianApprox q = r.as_gaussian(1.0);
  EXPECT_LT((q.covariance() - S).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LaplaceRun, ObjectiveIsMonotoneAlongTheTrace) {
  const auto target = trimodal_mixture();
  oracle::Gen gen(7);
  for (int t = 0; t < 20; ++t) {
    LaplaceConfig cfg;
    cfg.iterations = 300;
    cfg.record_every = 1;
    const LaplaceResult r = laplace_run(target, Vector::Constant(1, gen.uniform(-50, 50)), cfg);
    for (std::size_t i = 1; i < r.trace.records.size(); ++i) {
      EXPECT_LE(r.trace.records[i].objective, r.trace.records[i - 1].objective);
      EXPECT_GT(r.trace.records[i].iteration, r.trace.records[i - 1].iteration);
    }
  }
}

TEST(LaplaceRun, ClaStartsFromTheSmoothedMap) {
  const auto target = trimodal_mixture();
  SmoothedMapResult smap;
  smap.theta_hat = Vector::Constant(1, 0.5);
  LaplaceConfig cfg;
  const LaplaceResult r = cla_run(target, smap, cfg);
  EXPECT_EQ(r.trace.algorithm, "cla");
  EXPECT_EQ(r.trace.records.front().params[0], 0.5);
  EXPECT_NEAR(r.theta_star[0], 0.0, 1e-6);
  // Near 0 the mixture is N(0, 4) up to exponentially small terms.
  EXPECT_NEAR(r.sigma(0, 0), 4.0, 1e-6);
}

TEST(LaplaceRun, NonPositiveHessianIsFlooredWithWarning) {
  const auto target = GaussianMixtureTarget({0.5, 0.5}, {Vector::Constant(1, -3.0), Vector::Constant(1, 3.0)},
                                            {Matrix::Identity(1, 1), Matrix::Identity(1, 1)});
  LaplaceConfig cfg;
  const LaplaceResult r = laplace_run(target, Vector::Zero(1), cfg);
  EXPECT_EQ(r.trace.summary->iterations, 0);
  EXPECT_FALSE(r.hessian_pd);
  EXPECT_DOUBLE_EQ(r.sigma(0, 0), 1e8);
  EXPECT_FALSE(r.trace.warnings.empty());
}

TEST(LaplaceCovariance, FloorsNegativeEigenvalues) {
  Matrix H(2, 2);
  H << -2.0, 0.0, 0.0, 3.0;
  bool pd = true;
  const Matrix S = laplace_covariance(H, pd);
  EXPECT_FALSE(pd);
  EXPECT_NEAR(S(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(S(1, 1), 1e8, 1e-2);
  H << -2.0, 0.5, 0.5, -1.0;
  EXPECT_LT((laplace_covariance(H, pd) - (-H).inverse()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_TRUE(pd);
}
