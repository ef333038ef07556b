#include "rboost/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace rboost {
namespace {

TEST(Targets, Examples) {
  EXPECT_EQ(eval_target(1, std::vector<double>{0.0}), 6.0);
  EXPECT_NEAR(eval_target(3, std::vector<double>{1.0}), 3.0, 1e-15);
  EXPECT_EQ(eval_target(5, std::vector<double>{0.0, 0.0}), 4.0);
  EXPECT_EQ(eval_target(4, std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_NEAR(eval_target(2, std::vector<double>{-0.25}), 0.0, 1e-12);
  EXPECT_EQ(eval_target(6, std::vector<double>{0.0, 0.0}), 6.0);
  EXPECT_EQ(eval_target(7, std::vector<double>(10, 0.0)), 0.0);
  EXPECT_THROW(eval_target(4, std::vector<double>{1.0}), InvalidInput);
  EXPECT_THROW(eval_target(10, std::vector<double>{1.0}), InvalidInput);
  EXPECT_EQ(target_dimension(8), 10u);
}

TEST(SampleDataset, NoiselessTargetsAreExact) {
  SyntheticSpec s;
  s.target_id = 5;
  s.train_m = 300;
  s.test_m = 50;
  s.trials = 2;
  const auto t = sample_dataset(s, 1);
  EXPECT_EQ(t.train.size(), 300u);
  EXPECT_EQ(t.test.size(), 50u);
  for (std::size_t i = 0; i < t.train.size(); ++i) {
    EXPECT_EQ(t.train.targets()[i], eval_target(5, t.train.row(i)));
    for (double v : t.train.row(i)) {
      EXPECT_GE(v, -2.0);
      EXPECT_LE(v, 2.0);
    }
  }
  EXPECT_THROW(sample_dataset(s, 2), InvalidInput);
}

TEST(SampleDataset, NoiseHasRequestedVariance) {
  SyntheticSpec s;
  s.target_id = 4;
  s.noise_sigma = 1.0;
  s.train_m = 100000;
  s.test_m = 1;
  s.trials = 1;
  const auto t = sample_dataset(s, 0);
  double acc = 0.0, acc2 = 0.0;
  for (std::size_t i = 0; i < t.train.size(); ++i) {
    const double e = t.train.targets()[i] - eval_target(4, t.train.row(i));
    acc += e;
    acc2 += e * e;
  }
  const double n = static_cast<double>(t.train.size());
  const double var = acc2 / n - (acc / n) * (acc / n);
  EXPECT_NEAR(var, 1.0, 0.03);
  // test targets stay noiseless
  EXPECT_EQ(t.test.targets()[0], eval_target(4, t.test.row(0)));
}

TEST(SampleDataset, ReproducibleAndTrialSpecific) {
  SyntheticSpec s;
  s.target_id = 7;
  s.noise_sigma = 0.5;
  s.train_m = 20;
  s.test_m = 10;
  s.trials = 3;
  s.seed_base = 42;
  const auto a = sample_dataset(s, 1), b = sample_dataset(s, 1), c = sample_dataset(s, 2);
  EXPECT_TRUE(std::equal(a.train.features().begin(), a.train.features().end(), b.train.features().begin()));
  EXPECT_TRUE(std::equal(a.train.targets().begin(), a.train.targets().end(), b.train.targets().begin()));
  EXPECT_NE(a.train.features()[0], c.train.features()[0]);
}

TEST(Rmse, Examples) {
  EXPECT_EQ(rmse(std::vector<double>{1, 2}, std::vector<double>{1, 2}), 0.0);
  EXPECT_EQ(rmse(std::vector<double>{0, 0}, std::vector<double>{3, -3}), 3.0);
  EXPECT_THROW(rmse(std::vector<double>{0}, std::vector<double>{1, 2}), InvalidInput);
}

TEST(MeanStd, UsesSampleStd) {
  const auto s = mean_std(std::vector<double>{1, 2, 3, 4});
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.std, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(mean_std(std::vector<double>{7}).std, 0.0);
}

TEST(ParallelFor, CoversEveryIndexAndPropagatesErrors) {
  std::vector<int> hits(100, 0);
  parallel_for(100, [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) { if (i == 3) throw std::runtime_error("x"); }, 3),
               std::runtime_error);
}

SyntheticSpec small_spec(int target) {
  SyntheticSpec s;
  s.target_id = target;
  s.noise_sigma = 0.3;
  s.train_m = 80;
  s.test_m = 60;
  s.trials = 4;
  s.seed_base = 9;
  return s;
}

TEST(RunComparison, ShapeAndThreadIndependence) {
  const auto spec = small_spec(3);
  const std::vector<std::int64_t> grid{1, 10, 100};
  const std::vector<Algorithm> algos{Algorithm::Boosting, Algorithm::RBoosting, Algorithm::DDRBoosting};
  const auto a = run_comparison(spec, algos, 40, grid, 1);
  const auto b = run_comparison(spec, algos, 40, grid, 3);
  ASSERT_EQ(a.methods.size(), 3u);
  ASSERT_EQ(a.ucurve.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    ASSERT_EQ(a.methods[m].rmse.size(), 4u);
    EXPECT_EQ(a.methods[m].rmse, b.methods[m].rmse);
    EXPECT_EQ(a.methods[m].k, b.methods[m].k);
    for (auto k : a.methods[m].k) {
      EXPECT_GE(k, 1u);
      EXPECT_LE(k, 40u);
    }
  }
  const auto* r = a.find(Algorithm::RBoosting);
  ASSERT_NE(r, nullptr);
  // oracle RBoosting is the per-trial minimum over the u curve
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_TRUE(std::find(grid.begin(), grid.end(), r->u[t]) != grid.end());
  }
  double curve_min = a.ucurve[0].mean_rmse;
  for (const auto& p : a.ucurve) curve_min = std::min(curve_min, p.mean_rmse);
  EXPECT_LE(r->rmse_stats().mean, curve_min + 1e-12);
  EXPECT_EQ(a.find(Algorithm::Boosting, Protocol::Adaptive), nullptr);
}

TEST(RunUCurve, OnePointPerGridValue) {
  const std::vector<std::int64_t> grid{1, 5, 25, 125};
  const auto curve = run_ucurve(small_spec(4), grid, 30, 2);
  ASSERT_EQ(curve.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(curve[i].u, grid[i]);
    EXPECT_GT(curve[i].mean_rmse, 0.0);
    EXPECT_GE(curve[i].std_rmse, 0.0);
  }
}

TEST(RunAdaptiveEval, SingletonGridAndOracleBound) {
  const std::vector<std::int64_t> grid{3};
  const auto rep = run_adaptive_eval(small_spec(3), grid, 30, true, 2);
  const auto* ad = rep.find(Algorithm::RBoosting, Protocol::Adaptive);
  const auto* orc = rep.find(Algorithm::RBoosting, Protocol::Oracle);
  ASSERT_NE(ad, nullptr);
  ASSERT_NE(orc, nullptr);
  for (std::size_t t = 0; t < 4; ++t) {
    EXPECT_EQ(ad->u[t], 3);
    // the oracle sees the test set, so it can only do better
    EXPECT_LE(orc->rmse[t], ad->rmse[t] + 1e-12);
  }
}

TEST(Bench, RejectsBadSettings) {
  auto s = small_spec(3);
  s.trials = 0;
  EXPECT_THROW(run_comparison(s, {Algorithm::Boosting}, 10, {}, 1), InvalidInput);
  s = small_spec(3);
  EXPECT_THROW(run_comparison(s, {Algorithm::RBoosting}, 10, {}, 1), InvalidInput);
  EXPECT_THROW(run_comparison(s, {Algorithm::Boosting}, 0, {}, 1), InvalidInput);
  s.target_id = 12;
  EXPECT_THROW(run_comparison(s, {Algorithm::Boosting}, 10, {}, 1), InvalidInput);
}

} // namespace
} // namespace rboost
