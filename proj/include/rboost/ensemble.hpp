#ifndef RBOOST_ENSEMBLE_HPP
#define RBOOST_ENSEMBLE_HPP

#include "rboost/core.hpp"
#include "rboost/weak_learners.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rboost {

/// One boosting stage: f_k = (1 - alpha) f_{k-1} + beta g.
struct Stage {
  double alpha = 0.0;
  double beta = 0.0;
  Learner learner;
};

/// Staged additive model with incrementally maintained effective coefficients.
///
/// The effective coefficient of stage j in a k-stage model is
///   c_j = beta_j * prod_{i=j+1..k} (1 - alpha_i),
/// and the initial function f_0 (a constant, zero by default) carries the weight
/// prod_{i=1..k} (1 - alpha_i).
class Ensemble {
public:
  Ensemble() = default;
  explicit Ensemble(double offset) : offset_(offset) {}

  void append(double alpha, double beta, Learner learner) {
    const double keep = 1.0 - alpha;
    for (double& c : coefficients_) c *= keep;
    offset_weight_ *= keep;
    coefficients_.push_back(beta);
    stages_.push_back(Stage{alpha, beta, std::move(learner)});
  }

  std::size_t size() const noexcept { return stages_.size(); }
  bool empty() const noexcept { return stages_.empty(); }
  const std::vector<Stage>& stages() const noexcept { return stages_; }
  std::span<const double> effective_coefficients() const noexcept { return coefficients_; }
  double offset() const noexcept { return offset_; }
  double offset_weight() const noexcept { return offset_weight_; }

  /// Staged recursion from f_0.
  double predict(std::span<const double> x) const {
    double f = offset_;
    for (const auto& s : stages_) f = (1.0 - s.alpha) * f + s.beta * s.learner(x);
    return f;
  }

  double predict(std::span<const double> x, std::optional<double> clip_bound) const {
    const double f = predict(x);
    return clip_bound ? clip(f, *clip_bound) : f;
  }

  /// sum_j c_j g_j(x) + (prod (1 - alpha_i)) f_0.
  double predict_expanded(std::span<const double> x) const {
    double f = offset_weight_ * offset_;
    for (std::size_t j = 0; j < stages_.size(); ++j) f += coefficients_[j] * stages_[j].learner(x);
    return f;
  }

  std::vector<double> predict(const Dataset& data, std::optional<double> clip_bound = std::nullopt) const {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = predict(data.row(i), clip_bound);
    return out;
  }

  /// sum_j |c_j|, the coefficient-sum bound on the dictionary l1 norm.
  double l1_norm() const noexcept {
    double acc = 0.0;
    for (double c : coefficients_) acc += std::abs(c);
    return acc;
  }

  /// The model made of the first k stages.
  Ensemble truncated(std::size_t k) const {
    if (k > stages_.size())
      throw InvalidInput("truncate_ensemble: k = " + std::to_string(k) + " exceeds stage count " +
                         std::to_string(stages_.size()));
    Ensemble out(offset_);
    for (std::size_t j = 0; j < k; ++j) out.append(stages_[j].alpha, stages_[j].beta, stages_[j].learner);
    return out;
  }

private:
  std::vector<Stage> stages_;
  std::vector<double> coefficients_;
  double offset_ = 0.0;
  double offset_weight_ = 1.0;
};

inline double ensemble_predict(const Ensemble& model, std::span<const double> x) { return model.predict(x); }
inline double ensemble_l1_norm(const Ensemble& model) noexcept { return model.l1_norm(); }
inline Ensemble truncate_ensemble(const Ensemble& model, std::size_t k) { return model.truncated(k); }

/// Mean squared error on `data` of every truncation k = 0..size(), in one pass.
inline std::vector<double> staged_risks(const Ensemble& model, const Dataset& data,
                                        std::optional<double> clip_bound = std::nullopt) {
  const std::size_t m = data.size();
  const auto y = data.targets();
  std::vector<double> f(m, model.offset());
  std::vector<double> risks;
  risks.reserve(model.size() + 1);
  auto risk_of = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double p = clip_bound ? clip(f[i], *clip_bound) : f[i];
      acc += (p - y[i]) * (p - y[i]);
    }
    return acc / static_cast<double>(m);
  };
  risks.push_back(risk_of());
  for (const auto& s : model.stages()) {
    const double keep = 1.0 - s.alpha;
    for (std::size_t i = 0; i < m; ++i) f[i] = keep * f[i] + s.beta * s.learner(data.row(i));
    risks.push_back(risk_of());
  }
  return risks;
}

} // namespace rboost

#endif // RBOOST_ENSEMBLE_HPP
