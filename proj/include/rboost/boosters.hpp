#ifndef RBOOST_BOOSTERS_HPP
#define RBOOST_BOOSTERS_HPP

#include "rboost/core.hpp"
#include "rboost/ensemble.hpp"
#include "rboost/weak_learners.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace rboost {

enum class Algorithm { Boosting, RBoosting, DDRBoosting };

inline std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
  case Algorithm::Boosting: return "Boosting";
  case Algorithm::RBoosting: return "RBoosting";
  case Algorithm::DDRBoosting: return "DDRBoosting";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "boost" || s == "Boosting") return Algorithm::Boosting;
  if (s == "rboost" || s == "RBoosting") return Algorithm::RBoosting;
  if (s == "ddr" || s == "DDRBoosting") return Algorithm::DDRBoosting;
  throw InvalidInput("unknown algorithm '" + std::string(s) + "' (expected boost, rboost or ddr)");
}

/// alpha_k = 2 / (k + u)
inline double shrinkage_alpha(std::int64_t k, std::int64_t u) {
  if (k < 1) throw InvalidInput("shrinkage_alpha: k must be >= 1");
  if (u < 1) throw InvalidInput("shrinkage_alpha: u must be >= 1");
  return 2.0 / (static_cast<double>(k) + static_cast<double>(u));
}

struct ShrinkageSchedule {
  std::int64_t u = 1;

  double operator()(std::int64_t k) const { return shrinkage_alpha(k, u); }
};

/// CART trees with a fixed split budget J.
struct TreeLearnerSpec {
  std::size_t splits = 4;
};

/// Fixed learner sequence: stage k uses the k-th learner, normalized on the
/// training data. Lets different trainers share one learner sequence.
struct ReplayLearnerSpec {
  std::vector<Learner> sequence;
};

using LearnerSpec = std::variant<TreeLearnerSpec, Dictionary, ReplayLearnerSpec>;

struct TrainConfig {
  Algorithm algorithm = Algorithm::Boosting;
  std::size_t max_iterations = 100;
  std::int64_t u = 1;  // RBoosting only
  LearnerSpec learner = TreeLearnerSpec{};
  std::optional<double> clip_bound;  // prediction-time only
  std::uint64_t seed = 0;

  void validate() const {
    if (max_iterations < 1) throw InvalidInput("TrainConfig: max_iterations must be >= 1");
    if (algorithm == Algorithm::RBoosting && u < 1) throw InvalidInput("TrainConfig: u must be >= 1");
    if (clip_bound && !(*clip_bound > 0.0)) throw InvalidInput("TrainConfig: clip bound must be > 0");
    if (const auto* t = std::get_if<TreeLearnerSpec>(&learner); t && t->splits < 1)
      throw InvalidInput("TrainConfig: tree split count J must be >= 1");
    if (const auto* d = std::get_if<Dictionary>(&learner); d && d->empty())
      throw InvalidInput("TrainConfig: empty dictionary");
  }
};

struct IterationRecord {
  double risk = 0.0;  // training risk after the stage
  double alpha = 0.0;
  double beta = 0.0;
  double l1_norm = 0.0;
  bool fallback = false;  // DDR near-singular search fell back to alpha = 0
};

struct TrainingTrace {
  std::vector<IterationRecord> records;
  bool stopped_early = false;  // degenerate learner before the budget was spent

  std::size_t achieved() const noexcept { return records.size(); }
};

struct TrainResult {
  Ensemble model;
  TrainingTrace trace;
};

struct LinearSearchResult {
  double alpha = 0.0;
  double beta = 0.0;
  bool fallback = false;
};

/// Minimizes the empirical risk of (1 - alpha) f_prev + beta g over (alpha, beta) in R^2
/// by solving the 2x2 normal equations. Near-dependent {f_prev, g} falls back to the
/// alpha = 0 line search.
inline LinearSearchResult two_dim_linear_search(std::span<const double> f_prev, std::span<const double> g,
                                                std::span<const double> y) {
  if (f_prev.size() != g.size() || g.size() != y.size())
    throw InvalidInput("two_dim_linear_search: length mismatch");
  const double gg = empirical_inner(g, g);
  if (!(gg > 0.0)) throw InvalidInput("two_dim_linear_search: g has zero empirical norm");
  const double ff = empirical_inner(f_prev, f_prev);
  const double fg = empirical_inner(f_prev, g);
  const double yf = empirical_inner(y, f_prev);
  const double yg = empirical_inner(y, g);
  const double det = ff * gg - fg * fg;
  if (det <= 1e-12 * ff * gg) {
    return {0.0, (yg - fg) / gg, true};
  }
  const double a = (yf * gg - yg * fg) / det;
  const double beta = (ff * yg - fg * yf) / det;
  return {1.0 - a, beta, false};
}

namespace detail {

/// Produces the unit-norm learner for each stage.
class LearnerSource {
public:
  LearnerSource(const Dataset& data, const LearnerSpec& spec) : data_(data), spec_(spec) {
    if (std::holds_alternative<TreeLearnerSpec>(spec_)) fitter_.emplace(data_);
    if (const auto* d = std::get_if<Dictionary>(&spec_)) {
      candidates_ = d->normalized_on(data_);
      if (candidates_.empty()) throw InvalidInput("dictionary has no atom with nonzero norm on the data");
    }
  }

  /// Learner for stage k (1-based) against the plain residual; nullopt when the
  /// residual has no usable projection.
  std::optional<NormalizedLearner> next(std::size_t k, std::span<const double> residual) const {
    if (const auto* t = std::get_if<TreeLearnerSpec>(&spec_)) {
      RegressionTree tree = fitter_->fit(residual, t->splits);
      std::vector<double> pred(data_.size());
      for (std::size_t i = 0; i < data_.size(); ++i) pred[i] = tree.evaluate_unchecked(data_.row(i));
      return normalize_learner(Learner(std::move(tree)), std::move(pred));
    }
    if (std::holds_alternative<Dictionary>(spec_)) {
      const auto choice = select_from_dictionary(std::span<const NormalizedLearner>(candidates_), residual);
      if (!(std::abs(choice.inner) > kDegenerateNorm)) return std::nullopt;
      return candidates_[choice.index];
    }
    const auto& seq = std::get<ReplayLearnerSpec>(spec_).sequence;
    if (k > seq.size()) return std::nullopt;
    return normalize_learner(seq[k - 1], data_);
  }

private:
  const Dataset& data_;
  const LearnerSpec& spec_;
  std::optional<TreeFitter> fitter_;
  std::vector<NormalizedLearner> candidates_;
};

} // namespace detail

/// Runs the training loop selected by `config.algorithm`.
///
/// Every variant picks g_k against the plain residual y - f_{k-1}; they differ only in
/// how the new estimate is formed:
///   Boosting:     f_k = f_{k-1} + <r, g> g
///   RBoosting:    f_k = (1 - a_k) f_{k-1} + <y - (1 - a_k) f_{k-1}, g> g,  a_k = 2/(k+u)
///   DDRBoosting:  (a_k, b_k) minimize the risk of (1 - a) f_{k-1} + b g over R^2
inline TrainResult train(const Dataset& data, const TrainConfig& config) {
  config.validate();
  const std::size_t m = data.size();
  const auto y = data.targets();
  detail::LearnerSource source(data, config.learner);

  TrainResult out;
  std::vector<double> f(m, 0.0);
  std::vector<double> residual(m);

  for (std::size_t k = 1; k <= config.max_iterations; ++k) {
    for (std::size_t i = 0; i < m; ++i) residual[i] = y[i] - f[i];
    auto g = source.next(k, residual);
    if (!g) {
      out.trace.stopped_early = true;
      break;
    }
    const auto& gv = g->fitted;

    IterationRecord rec;
    switch (config.algorithm) {
    case Algorithm::Boosting:
      rec.alpha = 0.0;
      rec.beta = empirical_inner(residual, gv);
      break;
    case Algorithm::RBoosting: {
      rec.alpha = shrinkage_alpha(static_cast<std::int64_t>(k), config.u);
      const double keep = 1.0 - rec.alpha;
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += (y[i] - keep * f[i]) * gv[i];
      rec.beta = acc / static_cast<double>(m);
      break;
    }
    case Algorithm::DDRBoosting: {
      const auto s = two_dim_linear_search(f, gv, y);
      rec.alpha = s.alpha;
      rec.beta = s.beta;
      rec.fallback = s.fallback;
      break;
    }
    }

    const double keep = 1.0 - rec.alpha;
    for (std::size_t i = 0; i < m; ++i) f[i] = keep * f[i] + rec.beta * gv[i];
    out.model.append(rec.alpha, rec.beta, std::move(g->learner));
    rec.risk = empirical_risk(f, y);
    rec.l1_norm = out.model.l1_norm();
    out.trace.records.push_back(rec);
  }
  return out;
}

inline TrainResult train_boosting(const Dataset& data, TrainConfig config) {
  config.algorithm = Algorithm::Boosting;
  return train(data, config);
}

inline TrainResult train_rboosting(const Dataset& data, TrainConfig config) {
  config.algorithm = Algorithm::RBoosting;
  return train(data, config);
}

inline TrainResult train_ddrboosting(const Dataset& data, TrainConfig config) {
  config.algorithm = Algorithm::DDRBoosting;
  return train(data, config);
}

} // namespace rboost

#endif // RBOOST_BOOSTERS_HPP
