#ifndef RBOOST_REALDATA_HPP
#define RBOOST_REALDATA_HPP

#include "rboost/bench.hpp"
#include "rboost/boosters.hpp"
#include "rboost/model_selection.hpp"
#include "rboost/random.hpp"

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rboost {

struct RealDataConfig {
  std::size_t splits = 1;  // decision stumps
  std::size_t k_max = kDefaultMaxIterations;
  std::vector<std::int64_t> grid;  // RBoosting u candidates
  std::uint64_t seed = 0;
  std::optional<double> clip_bound;
  std::vector<Algorithm> algorithms{Algorithm::Boosting, Algorithm::RBoosting, Algorithm::DDRBoosting};
};

struct RealDataResult {
  Algorithm algorithm = Algorithm::Boosting;
  double test_rmse = 0.0;
  std::size_t k = 0;
  std::int64_t u = 0;  // RBoosting only
};

struct RealDataReport {
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<RealDataResult> results;

  const RealDataResult* find(Algorithm a) const {
    for (const auto& r : results)
      if (r.algorithm == a) return &r;
    return nullptr;
  }
};

/// Runs every configured method on a fixed train/test pair. k (and u for RBoosting)
/// is chosen on a seeded learning/validation split of the training set, then the
/// method is refitted on the whole training set.
inline RealDataReport realdata_experiment(const Dataset& train_set, const Dataset& test_set, const RealDataConfig& cfg) {
  if (train_set.size() < 2) throw InvalidInput("realdata: training set needs at least 2 rows");
  if (train_set.dim() != test_set.dim()) throw InvalidInput("realdata: train and test dimensions differ");
  if (cfg.k_max < 1) throw InvalidInput("realdata: k_max must be >= 1");

  TrainConfig base;
  base.learner = TreeLearnerSpec{cfg.splits};
  base.max_iterations = cfg.k_max;
  base.clip_bound = cfg.clip_bound;
  base.seed = cfg.seed;
  const std::uint64_t split_seed = Rng({cfg.seed, 3}).next();

  RealDataReport report;
  report.train_size = train_set.size();
  report.test_size = test_set.size();
  for (auto a : cfg.algorithms) {
    RealDataResult r;
    r.algorithm = a;
    Ensemble model;
    if (a == Algorithm::RBoosting) {
      if (cfg.grid.empty()) throw InvalidInput("realdata: empty u grid");
      auto sel = adaptive_select(train_set, cfg.grid, cfg.k_max, base, true, split_seed);
      r.k = sel.chosen_k;
      r.u = sel.chosen_u;
      model = std::move(sel.final_model);
    } else {
      auto [learn, validate] = split_learn_validate(train_set, split_seed);
      TrainConfig c = base;
      c.algorithm = a;
      const auto k = select_k_by_holdout(train(learn, c).model, validate, cfg.clip_bound).k;
      c.max_iterations = std::max<std::size_t>(k, 1);
      model = train(train_set, c).model;
      model = model.truncated(std::min(k, model.size()));
      r.k = k;
    }
    r.test_rmse = rmse(model.predict(test_set, cfg.clip_bound), test_set.targets());
    report.results.push_back(r);
  }
  return report;
}

/// Seeded shuffle, first half trains, second half tests.
inline RealDataReport realdata_experiment(const Dataset& data, const RealDataConfig& cfg) {
  if (data.size() < 4) throw InvalidInput("realdata: need at least 4 rows");
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Rng({cfg.seed, 4}).shuffle(std::span<std::size_t>(rows));
  const std::size_t half = data.size() / 2;
  const std::span<const std::size_t> all(rows);
  return realdata_experiment(data.subset(all.first(half)), data.subset(all.subspan(half)), cfg);
}

} // namespace rboost

#endif // RBOOST_REALDATA_HPP
