#include <gtest/gtest.h>

#include <cmath>

#include "sgdlab/bounds.hpp"
#include "sgdlab/rng.hpp"

namespace {

using namespace sgdlab;

TEST(Bounds, FrozenValues) {
  EXPECT_DOUBLE_EQ(ss_lower(500, 100, 1, 1, 200), 2e-5);
  EXPECT_DOUBLE_EQ(rr_lower(500, 100, 1, 1, 200), 2e-5);
  EXPECT_DOUBLE_EQ(wr_baseline(500, 100, 1, 1), 2e-5);
  EXPECT_DOUBLE_EQ(wr_baseline(500, 100, 1, 1, 3.0), 6e-5);
  EXPECT_DOUBLE_EQ(ss_lower(500, 400, 1, 1, 200), 1.0 / 200000 * 0.5);
  // 1/(nk) min{1, kappa/(nk) + kappa^2/k^2} with kappa = 2, n = 10, k = 20.
  EXPECT_DOUBLE_EQ(rr_lower(10, 20, 1, 1, 2), 1.0 / 200 * (2.0 / 200 + 4.0 / 400));
}

TEST(Bounds, HighProbabilityMultiplier) {
  const double base = wr_baseline(500, 100, 1, 1);
  const double hp = ss_upper_high_probability(500, 100, 1, 1, 1.0, 0.05);
  // a_bar = lambda: min{1, 1/k} = 1/100.
  EXPECT_NEAR(hp / (base / 100), 14921.340062947807, 1e-8);
}

TEST(Bounds, WellConditioned) {
  EXPECT_DOUBLE_EQ(rr_lower(10, 5, 1, 2, 2), 1.0 / 100 * (1.0 / 50 + 1.0 / 25));
  EXPECT_DOUBLE_EQ(ss_upper(10, 5, 1, 2, 2), 1.0 / 100 * 0.2);
}

TEST(Bounds, BranchContinuityAtCrossover) {
  const double kappa = crossover_epoch(1.0, 40.0);
  EXPECT_DOUBLE_EQ(kappa, 40.0);
  EXPECT_DOUBLE_EQ(ss_lower(100, 40, 1, 1, 40), wr_baseline(100, 40, 1, 1));
  EXPECT_DOUBLE_EQ(crossover_epoch(1, 200), 200.0);
  EXPECT_DOUBLE_EQ(crossover_epoch(3, 3), 1.0);
  EXPECT_DOUBLE_EQ(crossover_epoch(2.5, 10), crossover_epoch(5, 20));
  EXPECT_DOUBLE_EQ(rr_phase_transition_epoch(500, 1, 200), 100000.0);
}

TEST(Bounds, UpperMirrorsLower) {
  for (const std::size_t k : {10u, 100u, 1000u}) {
    EXPECT_DOUBLE_EQ(ss_upper(50, k, 1, 1, 30, 2.5), 2.5 * ss_lower(50, k, 1, 1, 30));
    EXPECT_DOUBLE_EQ(rr_upper(50, k, 1, 1, 30, 2.5), 2.5 * rr_lower(50, k, 1, 1, 30));
  }
}

TEST(Bounds, Errors) {
  EXPECT_THROW(ss_lower(1, 10, 1, 1, 2), std::invalid_argument);
  EXPECT_THROW(ss_lower(10, 0, 1, 1, 2), std::invalid_argument);
  EXPECT_THROW(rr_lower(10, 10, -1, 1, 2), std::invalid_argument);
  EXPECT_THROW(wr_baseline(10, 10, 1, 0), std::invalid_argument);
  EXPECT_THROW(ss_upper(10, 10, 1, 1, 2, 0.0), std::invalid_argument);
  EXPECT_THROW(ss_upper_high_probability(10, 10, 1, 1, 1, 1.5), std::invalid_argument);
  EXPECT_THROW(evaluate({TheoremId::kSsLower, -1.0, false}, {}), std::invalid_argument);
}

TEST(Bounds, Evaluate) {
  const BoundInputs in{500, 100, 1, 1, 200, 3.0};
  EXPECT_DOUBLE_EQ(evaluate({TheoremId::kSsLower, 2.0, false}, in), 4e-5);
  EXPECT_DOUBLE_EQ(evaluate({TheoremId::kSsUpper, 1.0, false}, in), 3 * 2e-5);
  EXPECT_NEAR(evaluate({TheoremId::kWrBaseline, 1.0, true}, in), 2e-5 * std::pow(std::log(50000.0), 2), 1e-18);
}

TEST(Bounds, Names) {
  for (const TheoremId id : kAllTheorems) EXPECT_EQ(parse_theorem_id(to_string(id)), id);
  EXPECT_EQ(to_string(TheoremId::kWrBaseline), "WR-BASELINE");
  EXPECT_THROW(parse_theorem_id("SS"), std::invalid_argument);
}

// Properties over random inputs.
class BoundProperties : public ::testing::Test {
 protected:
  Rng rng{2718};
  BoundInputs draw() {
    BoundInputs in;
    in.n = 2 + rng.uniform_below(1000);
    in.k = 1 + rng.uniform_below(5000);
    in.grad_bound = 0.1 + 5 * rng.uniform01();
    in.lambda = 0.01 + rng.uniform01();
    in.lambda_max = in.lambda * (1 + 500 * rng.uniform01());
    return in;
  }
};

TEST_F(BoundProperties, ShapeContainment) {
  for (int i = 0; i < 1000; ++i) {
    const BoundInputs in = draw();
    const double wr = wr_baseline(in.n, in.k, in.grad_bound, in.lambda);
    const double ssl = ss_lower(in.n, in.k, in.grad_bound, in.lambda, in.lambda_max);
    EXPECT_LE(ssl, wr);
    EXPECT_LE(rr_lower(in.n, in.k, in.grad_bound, in.lambda, in.lambda_max),
              rr_upper(in.n, in.k, in.grad_bound, in.lambda, in.lambda_max));
    if (static_cast<double>(in.k) <= in.lambda_max / in.lambda) EXPECT_EQ(ssl, wr);
  }
}

TEST_F(BoundProperties, QuadraticInG) {
  for (int i = 0; i < 200; ++i) {
    BoundInputs in = draw();
    for (const TheoremId id : kAllTheorems) {
      const double v = evaluate({id}, in);
      BoundInputs twice = in;
      twice.grad_bound *= 2;
      EXPECT_NEAR(evaluate({id}, twice), 4 * v, 1e-12 * v);
    }
  }
}

TEST_F(BoundProperties, InverseInN) {
  // Degree -1 in n holds where n enters only through G^2/(lambda n k). The
  // random reshuffling rates also carry kappa/(nk) inside the min, so they are
  // not homogeneous in n.
  for (int i = 0; i < 200; ++i) {
    BoundInputs in = draw();
    BoundInputs twice = in;
    twice.n *= 2;
    for (const TheoremId id : {TheoremId::kSsLower, TheoremId::kSsUpper, TheoremId::kWrBaseline}) {
      const double v = evaluate({id}, in);
      EXPECT_NEAR(evaluate({id}, twice), v / 2, 1e-12 * v);
    }
  }
}

TEST(Bounds, RandomReshuffleNotHomogeneousInN) {
  // kappa = 50, k = 100: min{1, 50/(n 100) + 0.25}.
  const double a = rr_lower(10, 100, 1, 1, 50), b = rr_lower(20, 100, 1, 1, 50);
  EXPECT_GT(std::abs(b - a / 2), 1e-9);
}

}  // namespace
