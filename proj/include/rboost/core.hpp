#ifndef RBOOST_CORE_HPP
#define RBOOST_CORE_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rboost {

/// Thrown when an argument violates a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// m samples of (x in R^d, y in R), row-major, immutable after construction.
class Dataset {
public:
  Dataset() = default;

  Dataset(std::vector<double> features, std::vector<double> targets, std::size_t dim)
      : features_(std::move(features)), targets_(std::move(targets)), dim_(dim) {
    if (dim_ == 0) throw InvalidInput("Dataset: dimension must be >= 1");
    if (targets_.empty()) throw InvalidInput("Dataset: at least one sample required");
    if (features_.size() != targets_.size() * dim_)
      throw InvalidInput("Dataset: feature matrix is " + std::to_string(features_.size()) +
                         " values, expected " + std::to_string(targets_.size()) + "x" +
                         std::to_string(dim_));
    for (std::size_t i = 0; i < features_.size(); ++i)
      if (!std::isfinite(features_[i]))
        throw InvalidInput("Dataset: non-finite feature at row " + std::to_string(i / dim_) +
                           ", column " + std::to_string(i % dim_));
    for (std::size_t i = 0; i < targets_.size(); ++i)
      if (!std::isfinite(targets_[i]))
        throw InvalidInput("Dataset: non-finite target at row " + std::to_string(i));
  }

  std::size_t size() const noexcept { return targets_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {features_.data() + i * dim_, dim_};
  }
  double feature(std::size_t i, std::size_t j) const noexcept { return features_[i * dim_ + j]; }
  std::span<const double> targets() const noexcept { return targets_; }
  std::span<const double> features() const noexcept { return features_; }

  /// Rows listed in `rows`, in that order.
  Dataset subset(std::span<const std::size_t> rows) const {
    std::vector<double> x;
    std::vector<double> y;
    x.reserve(rows.size() * dim_);
    y.reserve(rows.size());
    for (auto r : rows) {
      if (r >= size()) throw InvalidInput("Dataset::subset: row index out of range");
      auto src = row(r);
      x.insert(x.end(), src.begin(), src.end());
      y.push_back(targets_[r]);
    }
    return Dataset(std::move(x), std::move(y), dim_);
  }

  /// Rows [begin, end).
  Dataset slice(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > size()) throw InvalidInput("Dataset::slice: empty or out-of-range slice");
    std::vector<double> x(features_.begin() + static_cast<std::ptrdiff_t>(begin * dim_),
                          features_.begin() + static_cast<std::ptrdiff_t>(end * dim_));
    std::vector<double> y(targets_.begin() + static_cast<std::ptrdiff_t>(begin),
                          targets_.begin() + static_cast<std::ptrdiff_t>(end));
    return Dataset(std::move(x), std::move(y), dim_);
  }

private:
  std::vector<double> features_;
  std::vector<double> targets_;
  std::size_t dim_ = 0;
};

/// sqrt((1/m) sum v_i^2)
inline double empirical_norm(std::span<const double> v) {
  if (v.empty()) throw InvalidInput("empirical_norm: empty vector");
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc / static_cast<double>(v.size()));
}

/// (1/m) sum a_i b_i
inline double empirical_inner(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw InvalidInput("empirical_inner: length mismatch (" + std::to_string(a.size()) + " vs " +
                       std::to_string(b.size()) + ")");
  if (a.empty()) throw InvalidInput("empirical_inner: empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc / static_cast<double>(a.size());
}

/// Mean squared error of `pred` against `y`.
inline double empirical_risk(std::span<const double> pred, std::span<const double> y) {
  if (pred.size() != y.size())
    throw InvalidInput("empirical_risk: length mismatch (" + std::to_string(pred.size()) + " vs " +
                       std::to_string(y.size()) + ")");
  if (pred.empty()) throw InvalidInput("empirical_risk: empty vectors");
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - y[i];
    acc += e * e;
  }
  return acc / static_cast<double>(pred.size());
}

/// Truncation of t to [-bound, bound].
inline double clip(double t, double bound) {
  if (!(bound > 0.0)) throw InvalidInput("clip: bound must be > 0");
  if (t > bound) return bound;
  if (t < -bound) return -bound;
  return t;
}

} // namespace rboost

#endif // RBOOST_CORE_HPP
