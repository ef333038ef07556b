#ifndef RBOOST_MODEL_SELECTION_HPP
#define RBOOST_MODEL_SELECTION_HPP

#include "rboost/boosters.hpp"
#include "rboost/core.hpp"
#include "rboost/ensemble.hpp"
#include "rboost/random.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

namespace rboost {

/// `count` log-spaced values on [lo, hi], rounded to integers >= 1, duplicates dropped.
inline std::vector<std::int64_t> u_grid(std::size_t count, double lo, double hi) {
  if (count < 2) throw InvalidInput("u_grid: count must be >= 2");
  if (!(lo >= 1.0) || !(hi > lo) || !std::isfinite(hi)) throw InvalidInput("u_grid: need 1 <= lo < hi");
  const double a = std::log10(lo);
  const double step = (std::log10(hi) - a) / static_cast<double>(count - 1);
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double v = std::pow(10.0, a + static_cast<double>(i) * step);
    const auto r = std::max<std::int64_t>(1, std::llround(v));
    if (out.empty() || out.back() != r) out.push_back(r);
  }
  return out;
}

/// First floor(m/2) rows learn, the rest validate. With a seed the rows are shuffled first.
inline std::pair<Dataset, Dataset> split_learn_validate(const Dataset& data,
                                                        std::optional<std::uint64_t> shuffle_seed = std::nullopt) {
  const std::size_t m = data.size();
  if (m < 2) throw InvalidInput("split_learn_validate: need at least 2 rows");
  std::vector<std::size_t> rows(m);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (shuffle_seed) Rng({*shuffle_seed, 0x5eedu}).shuffle(std::span<std::size_t>(rows));
  const std::size_t half = m / 2;
  return {data.subset(std::span<const std::size_t>(rows).first(half)),
          data.subset(std::span<const std::size_t>(rows).subspan(half))};
}

struct HoldoutChoice {
  std::size_t k = 0;
  double rmse = 0.0;
};

/// Truncation k in 1..size() with the smallest holdout RMSE (smallest k on ties).
/// An empty model yields k = 0.
inline HoldoutChoice select_k_by_holdout(const Ensemble& model, const Dataset& holdout,
                                         std::optional<double> clip_bound = std::nullopt) {
  const auto risks = staged_risks(model, holdout, clip_bound);
  HoldoutChoice best{0, std::sqrt(risks[0])};
  for (std::size_t k = 1; k < risks.size(); ++k) {
    const double r = std::sqrt(risks[k]);
    if (best.k == 0 || r < best.rmse) best = {k, r};
  }
  return best;
}

struct UCurvePoint {
  std::int64_t u = 1;
  std::size_t best_k = 0;
  double best_risk = 0.0;  // validation mean squared error at best_k
};

struct SelectionResult {
  std::int64_t chosen_u = 1;
  std::size_t chosen_k = 0;
  double validation_risk = 0.0;
  Ensemble final_model;
  std::vector<UCurvePoint> per_u_curve;
};

/// Picks (u, k) for RBoosting on a learning/validation split of `data`.
///
/// Each grid u is trained once to k_max stages on the learning half; every
/// truncation is scored on the validation half. The minimizer wins (ties: smaller u,
/// then smaller k). With `retrain_on_full` the winner is refitted on all of `data`,
/// otherwise the learning-half model truncated to k* is returned.
inline SelectionResult adaptive_select(const Dataset& data, std::span<const std::int64_t> grid, std::size_t k_max,
                                       TrainConfig config, bool retrain_on_full,
                                       std::optional<std::uint64_t> shuffle_seed = std::nullopt) {
  if (grid.empty()) throw InvalidInput("adaptive_select: empty u grid");
  if (k_max < 1) throw InvalidInput("adaptive_select: k_max must be >= 1");
  const auto [learn, validate] = split_learn_validate(data, shuffle_seed);

  config.algorithm = Algorithm::RBoosting;
  config.max_iterations = k_max;

  SelectionResult result;
  std::optional<Ensemble> best_model;
  for (const auto u : grid) {
    config.u = u;
    auto run = train(learn, config);
    const auto risks = staged_risks(run.model, validate);
    UCurvePoint point{u, 0, risks[0]};
    for (std::size_t k = 1; k < risks.size(); ++k)
      if (point.best_k == 0 || risks[k] < point.best_risk) point = {u, k, risks[k]};
    result.per_u_curve.push_back(point);

    const bool better = !best_model || point.best_risk < result.validation_risk ||
                        (point.best_risk == result.validation_risk && u < result.chosen_u);
    if (better) {
      result.chosen_u = u;
      result.chosen_k = point.best_k;
      result.validation_risk = point.best_risk;
      best_model = run.model.truncated(point.best_k);
    }
  }

  if (retrain_on_full) {
    config.u = result.chosen_u;
    config.max_iterations = std::max<std::size_t>(result.chosen_k, 1);
    auto full = train(data, config);
    result.final_model = full.model.truncated(std::min(result.chosen_k, full.model.size()));
  } else {
    result.final_model = std::move(*best_model);
  }
  return result;
}

} // namespace rboost

#endif // RBOOST_MODEL_SELECTION_HPP
