#include "rboost/weak_learners.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace rboost {
namespace {

Dataset line(std::vector<double> x) {
  std::vector<double> y(x.size(), 0.0);
  return Dataset(std::move(x), std::move(y), 1);
}

double tree_sse(const RegressionTree& t, const Dataset& d, std::span<const double> r) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = t(d.row(i)) - r[i];
    acc += e * e;
  }
  return acc;
}

TEST(FitTree, ConstantResidualGivesSingleLeaf) {
  const auto d = line({0, 1, 2, 3});
  const std::vector<double> r{5, 5, 5, 5};
  const auto t = fit_tree(d, r, 4);
  EXPECT_EQ(t.split_count(), 0u);
  ASSERT_EQ(t.nodes().size(), 1u);
  EXPECT_EQ(t.nodes()[0].value, 5.0);
  EXPECT_EQ(fit_stump(d, r).split_count(), 0u);
}

TEST(FitTree, StepResidualSplitsAtMidpoint) {
  // Candidates 0.5, 1.5, 2.5 score SSE reductions 33.3, 100, 33.3; 1.5 wins.
  const auto d = line({0, 1, 2, 3});
  const std::vector<double> r{0, 0, 10, 10};
  const auto t = fit_tree(d, r, 1);
  ASSERT_EQ(t.split_count(), 1u);
  EXPECT_EQ(t.nodes()[0].feature, 0);
  EXPECT_EQ(t.nodes()[0].threshold, 1.5);
  EXPECT_EQ(t(std::vector<double>{1.0}), 0.0);
  EXPECT_EQ(t(std::vector<double>{2.0}), 10.0);
}

TEST(FitStump, TwoPoints) {
  const auto d = line({0, 1});
  const std::vector<double> r{-1, 1};
  const auto t = fit_stump(d, r);
  ASSERT_EQ(t.split_count(), 1u);
  EXPECT_EQ(t.nodes()[0].threshold, 0.5);
  EXPECT_EQ(t(std::vector<double>{0.0}), -1.0);
  EXPECT_EQ(t(std::vector<double>{1.0}), 1.0);
}

TEST(FitTree, RejectsBadArguments) {
  const auto d = line({0, 1});
  EXPECT_THROW(fit_tree(d, std::vector<double>{1.0}, 1), InvalidInput);
  EXPECT_THROW(fit_tree(d, std::vector<double>{1.0, 2.0}, 0), InvalidInput);
  const auto t = fit_stump(d, std::vector<double>{1.0, 2.0});
  EXPECT_THROW(t(std::vector<double>{1.0, 2.0}), InvalidInput);
}

TEST(FitTree, SplitBudgetLimitedByDistinctOutcomes) {
  const auto d = line({0, 0, 1, 1});
  const std::vector<double> r{1, 1, 2, 2};
  const auto t = fit_tree(d, r, 4);
  EXPECT_EQ(t.split_count(), 1u);
  EXPECT_EQ(t.requested_splits(), 4u);
}

TEST(FitTree, StumpMatchesExhaustiveSearch) {
  Rng rng({101});
  for (int rep = 0; rep < 100; ++rep) {
    const auto d = oracle::random_dataset(rng, 2 + rng.below(199), 1 + rng.below(5));
    const auto t = fit_stump(d, d.targets());
    const auto best = oracle::exhaustive_stump(d, d.targets());
    if (!best) {
      EXPECT_EQ(t.split_count(), 0u);
      continue;
    }
    ASSERT_EQ(t.split_count(), 1u);
    EXPECT_EQ(t.nodes()[0].feature, best->feature);
    EXPECT_EQ(t.nodes()[0].threshold, best->threshold);
    const auto& n = t.nodes();
    EXPECT_NEAR(n[static_cast<std::size_t>(n[0].left)].value, best->left, 1e-12);
    EXPECT_NEAR(n[static_cast<std::size_t>(n[0].right)].value, best->right, 1e-12);
  }
}

TEST(FitTree, MoreSplitsNeverIncreaseSse) {
  Rng rng({102});
  for (int rep = 0; rep < 30; ++rep) {
    const auto d = oracle::random_dataset(rng, 20 + rng.below(150), 1 + rng.below(4));
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= 8; ++j) {
      const double s = tree_sse(fit_tree(d, d.targets(), j), d, d.targets());
      EXPECT_LE(s, prev + 1e-9);
      prev = s;
    }
  }
}

TEST(FitTree, LeafValuesAreRoutedMeans) {
  Rng rng({103});
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = oracle::random_dataset(rng, 50 + rng.below(100), 3);
    const auto t = fit_tree(d, d.targets(), 4);
    std::vector<std::vector<double>> by_leaf(t.nodes().size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      int n = 0;
      while (!t.nodes()[static_cast<std::size_t>(n)].is_leaf()) {
        const auto& node = t.nodes()[static_cast<std::size_t>(n)];
        n = d.row(i)[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
      }
      by_leaf[static_cast<std::size_t>(n)].push_back(d.targets()[i]);
    }
    for (std::size_t n = 0; n < t.nodes().size(); ++n) {
      if (!t.nodes()[n].is_leaf()) continue;
      ASSERT_FALSE(by_leaf[n].empty());
      EXPECT_NEAR(t.nodes()[n].value, oracle::mean(by_leaf[n]), 1e-12);
    }
  }
}

TEST(FitTree, InvariantToRowPermutation) {
  Rng rng({104});
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 30 + rng.below(100);
    std::vector<double> x(m * 2), y(m);
    for (auto& v : x) v = rng.uniform(-2, 2);
    for (auto& v : y) v = rng.normal();
    const Dataset d(x, y, 2);
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    const auto p = d.subset(perm);
    const auto a = fit_tree(d, d.targets(), 4);
    const auto b = fit_tree(p, p.targets(), 4);
    ASSERT_EQ(a.nodes().size(), b.nodes().size());
    for (std::size_t n = 0; n < a.nodes().size(); ++n) {
      EXPECT_EQ(a.nodes()[n].feature, b.nodes()[n].feature);
      EXPECT_EQ(a.nodes()[n].threshold, b.nodes()[n].threshold);
      EXPECT_NEAR(a.nodes()[n].value, b.nodes()[n].value, 1e-12);
    }
  }
}

TEST(FitTree, ExactSplitCountWhenDataAllows) {
  Rng rng({105});
  const auto d = oracle::random_dataset(rng, 200, 2);
  for (std::size_t j = 1; j <= 8; ++j) EXPECT_EQ(fit_tree(d, d.targets(), j).split_count(), j);
}

TEST(NormalizeLearner, Examples) {
  const auto d = line({0, 1, 2});
  const auto two = normalize_learner(Learner(RegressionTree::constant(2.0, 1)), d);
  ASSERT_TRUE(two);
  EXPECT_EQ(two->scale, 0.5);
  const auto unit = normalize_learner(Learner(RegressionTree::constant(1.0, 1)), d);
  ASSERT_TRUE(unit);
  EXPECT_EQ(unit->scale, 1.0);
  EXPECT_FALSE(normalize_learner(Learner(RegressionTree::constant(0.0, 1)), d));
}

TEST(NormalizeLearner, UnitNormOnSample) {
  Rng rng({106});
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = oracle::random_dataset(rng, 10 + rng.below(100), 2);
    auto n = normalize_learner(Learner(fit_tree(d, d.targets(), 3)), d);
    ASSERT_TRUE(n);
    EXPECT_NEAR(empirical_norm(n->learner.predict(d)), 1.0, 1e-10);
    EXPECT_NEAR(empirical_norm(n->fitted), 1.0, 1e-10);
  }
}

std::vector<DictionaryAtom> coordinate_atoms(std::size_t m) {
  // Atom j is the indicator of sample j, keyed by its first coordinate.
  std::vector<DictionaryAtom> atoms;
  for (std::size_t j = 0; j < m; ++j)
    atoms.push_back({static_cast<int>(j), [j](std::span<const double> x) { return x[0] == static_cast<double>(j) ? 1.0 : 0.0; }, 1});
  return atoms;
}

TEST(SelectFromDictionary, OnlyNonOrthogonalAtomWins) {
  const auto d = line({0, 1, 2, 3});
  const std::vector<double> r{0, 0, -3, 0};
  const auto [atom, ip] = select_from_dictionary(coordinate_atoms(4), d, r);
  EXPECT_EQ(atom.id, 2);
  // unit-norm indicator is 2 at sample 2, so <r, g> = (-3 * 2) / 4
  EXPECT_DOUBLE_EQ(ip, -1.5);
}

TEST(SelectFromDictionary, ResidualEqualToAtom) {
  const auto d = line({0, 1, 2, 3});
  const auto normalized = Dictionary(coordinate_atoms(4)).normalized_on(d);
  const auto& g1 = normalized[1].fitted;
  const auto [atom, ip] = select_from_dictionary(coordinate_atoms(4), d, g1);
  EXPECT_EQ(atom.id, 1);
  EXPECT_DOUBLE_EQ(ip, 1.0);
}

TEST(SelectFromDictionary, TiesGoToLowestId) {
  const auto d = line({0, 1, 2, 3});
  const std::vector<double> r{0, 1, -1, 0};
  EXPECT_EQ(select_from_dictionary(coordinate_atoms(4), d, r).first.id, 1);
}

TEST(SelectFromDictionary, MatchesExhaustiveScan) {
  Rng rng({107});
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 20;
    std::vector<double> x(m);
    for (auto& v : x) v = rng.uniform(-2, 2);
    const auto d = line(x);
    std::vector<DictionaryAtom> atoms;
    for (int a = 0; a < 5; ++a) {
      const double c0 = rng.normal(), c1 = rng.normal(), c2 = rng.normal();
      atoms.push_back({a, [=](std::span<const double> p) { return c0 + c1 * p[0] + c2 * std::sin(3 * p[0]); }, 1});
    }
    std::vector<double> r(m);
    for (auto& v : r) v = rng.normal();

    int expect_id = -1;
    double best = -1, best_ip = 0;
    for (const auto& a : atoms) {
      std::vector<double> g(m);
      for (std::size_t i = 0; i < m; ++i) g[i] = a.evaluate(d.row(i));
      double nrm = 0, ip = 0;
      for (std::size_t i = 0; i < m; ++i) {
        nrm += g[i] * g[i];
        ip += r[i] * g[i];
      }
      ip = ip / static_cast<double>(m) / std::sqrt(nrm / static_cast<double>(m));
      if (std::abs(ip) > best) {
        best = std::abs(ip);
        best_ip = ip;
        expect_id = a.id;
      }
    }
    const auto [atom, ip] = select_from_dictionary(atoms, d, r);
    EXPECT_EQ(atom.id, expect_id);
    EXPECT_NEAR(ip, best_ip, 1e-12);
  }
}

TEST(SelectFromDictionary, EmptyDictionary) {
  const auto d = line({0, 1});
  EXPECT_THROW(select_from_dictionary(std::vector<DictionaryAtom>{}, d, std::vector<double>{1, 2}), InvalidInput);
}

} // namespace
} // namespace rboost
