#include "cvi/adam.hpp"
#include "cvi/schedule.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cvi;

TEST(StepSchedule, ShiftedAndOffsetForms) {
  const StepSchedule harmonic{5.0, 1.0, StepSchedule::Form::shifted_power, false};
  EXPECT_DOUBLE_EQ(harmonic(0), 5.0);
  EXPECT_DOUBLE_EQ(harmonic(4), 1.0);
  const StepSchedule offset{15.0, 0.9, StepSchedule::Form::offset_power, false};
  EXPECT_DOUBLE_EQ(offset(0), 15.0);
  EXPECT_DOUBLE_EQ(offset(1), 7.5);
  EXPECT_NEAR(offset(1000), 15.0 / (1.0 + std::pow(1000.0, 0.9)), 1e-15);
}

TEST(StepSchedule, ExponentRangeIsEnforced) {
  for (double rho : {0.5, 0.3, 1.2, -1.0})
    EXPECT_THROW((StepSchedule{1.0, rho, StepSchedule::Form::shifted_power, false}.validate()),
                 std::invalid_argument);
  for (double rho : {0.51, 0.7, 1.0})
    EXPECT_NO_THROW((StepSchedule{1.0, rho, StepSchedule::Form::shifted_power, false}.validate()));
  EXPECT_THROW((StepSchedule{0.0, 1.0, StepSchedule::Form::shifted_power, false}.validate()),
               std::invalid_argument);
  const auto c = StepSchedule::constant(0.01);
  EXPECT_NO_THROW(c.validate());
  EXPECT_DOUBLE_EQ(c(0), 0.01);
  EXPECT_DOUBLE_EQ(c(99999), 0.01);
}

TEST(StepSchedule, DecreasingProperty) {
  oracle::Gen gen(5);
  for (int t = 0; t < 100; ++t) {
    const StepSchedule s{gen.uniform(0.1, 20), gen.uniform(0.51, 1.0),
                         gen.integer(0, 1) ? StepSchedule::Form::shifted_power
                                           : StepSchedule::Form::offset_power,
                         false};
    double prev = s(0);
    for (long k = 1; k < 2000; k += 37) {
      EXPECT_LT(s(k), prev);
      EXPECT_GT(s(k), 0.0);
      prev = s(k);
    }
  }
}

TEST(Adam, MatchesReferenceRecurrence) {
  oracle::Gen gen(9);
  const AdamSettings st;
  AdamState adam(3, st);
  Vector m = Vector::Zero(3), v = Vector::Zero(3);
  for (int k = 0; k < 50; ++k) {
    const Vector g = gen.normal_vector(3);
    const double gamma = 0.1 / (1 + k);
    const Vector delta = adam.step(g, gamma);
    // Bias correction divides by 1 - beta^(k+1), the step count after this update.
    m = 0.9 * m + 0.1 * g;
    v = 0.9999 * v + 0.0001 * g.cwiseAbs2();
    for (int i = 0; i < 3; ++i) {
      const double mh = m[i] / (1 - std::pow(0.9, k + 1));
      const double vh = v[i] / (1 - std::pow(0.9999, k + 1));
      EXPECT_NEAR(delta[i], gamma * mh / (std::sqrt(vh) + 1e-8), 1e-12);
    }
  }
  EXPECT_EQ(adam.steps_taken(), 50);
}

TEST(Adam, FirstStepIsSignedLearningRate) {
  AdamState adam(2, AdamSettings{});
  const Vector d = adam.step((Vector(2) << 3.0, -0.25).finished(), 0.01);
  EXPECT_NEAR(d[0], 0.01, 1e-9);
  EXPECT_NEAR(d[1], -0.01, 1e-9);
  EXPECT_TRUE(d.allFinite());
}
