#ifndef RBOOST_WEAK_LEARNERS_HPP
#define RBOOST_WEAK_LEARNERS_HPP

#include "rboost/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace rboost {

/// Least-squares regression tree. Routing: x goes left iff x[feature] <= threshold.
class RegressionTree {
public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
  };

  RegressionTree() = default;
  RegressionTree(std::vector<Node> nodes, std::size_t dim, std::size_t requested_splits)
      : nodes_(std::move(nodes)), dim_(dim), requested_splits_(requested_splits) {}

  /// Single-leaf tree.
  static RegressionTree constant(double value, std::size_t dim) {
    Node leaf;
    leaf.value = value;
    return RegressionTree({leaf}, dim, 0);
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != dim_)
      throw InvalidInput("RegressionTree: point has dimension " + std::to_string(x.size()) +
                         ", tree expects " + std::to_string(dim_));
    return evaluate_unchecked(x);
  }

  double evaluate_unchecked(std::span<const double> x) const noexcept {
    int n = 0;
    while (!nodes_[static_cast<std::size_t>(n)].is_leaf()) {
      const auto& node = nodes_[static_cast<std::size_t>(n)];
      n = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(n)].value;
  }

  std::size_t split_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                                  [](const Node& n) { return !n.is_leaf(); }));
  }
  std::size_t requested_splits() const noexcept { return requested_splits_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  /// Multiplies every leaf value by `factor`.
  RegressionTree scaled(double factor) const {
    RegressionTree out = *this;
    for (auto& n : out.nodes_)
      if (n.is_leaf()) n.value *= factor;
    return out;
  }

private:
  std::vector<Node> nodes_{Node{}};
  std::size_t dim_ = 0;
  std::size_t requested_splits_ = 0;
};

/// Candidate split of one node.
struct SplitCandidate {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // reduction of the node's residual SSE

  bool valid() const noexcept { return feature >= 0; }
};

namespace detail {

// Relative tolerance under which two SSE reductions are considered tied.
inline constexpr double kGainTieTolerance = 1e-12;

inline double split_threshold(double lo, double hi) noexcept {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

} // namespace detail

/// Grows CART trees on one fixed dataset. Feature orderings are computed once and
/// reused across fits, so a booster builds one of these per training set.
class TreeFitter {
public:
  explicit TreeFitter(const Dataset& data) : data_(&data), order_(data.dim()) {
    const std::size_t m = data.size();
    for (std::size_t j = 0; j < data.dim(); ++j) {
      auto& ord = order_[j];
      ord.resize(m);
      std::iota(ord.begin(), ord.end(), std::size_t{0});
      std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
        return data.feature(a, j) < data.feature(b, j);
      });
    }
  }

  /// Best-first growth to at most `splits` internal nodes. Each split maximizes the
  /// SSE reduction of `residual`; ties go to the lower feature index, then the smaller
  /// threshold, then the earlier-created leaf.
  RegressionTree fit(std::span<const double> residual, std::size_t splits) const {
    const Dataset& data = *data_;
    const std::size_t m = data.size();
    if (residual.size() != m)
      throw InvalidInput("fit_tree: residual has length " + std::to_string(residual.size()) +
                         ", dataset has " + std::to_string(m) + " rows");
    if (splits == 0) throw InvalidInput("fit_tree: split count J must be >= 1");

    std::vector<RegressionTree::Node> nodes(1);
    std::vector<int> node_of(m, 0);
    std::vector<SplitCandidate> pending;  // indexed by node id; valid only for current leaves
    std::vector<double> node_sum(1, 0.0);
    std::vector<std::size_t> node_count(1, m);
    for (std::size_t i = 0; i < m; ++i) node_sum[0] += residual[i];

    pending.push_back(best_split(residual, node_of, 0, node_sum[0], m));

    for (std::size_t s = 0; s < splits; ++s) {
      int chosen = -1;
      double best_gain = 0.0;
      for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (!nodes[n].is_leaf() || !pending[n].valid()) continue;
        if (chosen < 0 || beats(pending[n].gain, best_gain)) {
          chosen = static_cast<int>(n);
          best_gain = pending[n].gain;
        }
      }
      if (chosen < 0) break;

      const auto c = static_cast<std::size_t>(chosen);
      const SplitCandidate split = pending[c];
      const int left = static_cast<int>(nodes.size());
      const int right = left + 1;
      nodes[c].feature = split.feature;
      nodes[c].threshold = split.threshold;
      nodes[c].left = left;
      nodes[c].right = right;
      nodes.emplace_back();
      nodes.emplace_back();
      node_sum.resize(nodes.size(), 0.0);
      node_count.resize(nodes.size(), 0);

      for (std::size_t i = 0; i < m; ++i) {
        if (node_of[i] != chosen) continue;
        const int child = data.feature(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right;
        node_of[i] = child;
        node_sum[static_cast<std::size_t>(child)] += residual[i];
        ++node_count[static_cast<std::size_t>(child)];
      }
      pending.resize(nodes.size());
      for (int child : {left, right}) {
        const auto ch = static_cast<std::size_t>(child);
        pending[ch] = best_split(residual, node_of, child, node_sum[ch], node_count[ch]);
      }
    }

    for (std::size_t n = 0; n < nodes.size(); ++n)
      if (nodes[n].is_leaf()) nodes[n].value = node_sum[n] / static_cast<double>(node_count[n]);
    return RegressionTree(std::move(nodes), data.dim(), splits);
  }

  /// Best single split of the rows currently routed to `node`.
  SplitCandidate best_split(std::span<const double> residual, std::span<const int> node_of, int node,
                            double total, std::size_t count) const {
    SplitCandidate best;
    if (count < 2) return best;
    const Dataset& data = *data_;
    const double n = static_cast<double>(count);
    const double parent = total * total / n;

    double node_ss = 0.0;
    for (std::size_t i = 0; i < node_of.size(); ++i)
      if (node_of[i] == node) node_ss += residual[i] * residual[i];
    const double floor = detail::kGainTieTolerance * std::max(node_ss, 1e-300);

    for (std::size_t j = 0; j < data.dim(); ++j) {
      double left_sum = 0.0;
      std::size_t left_n = 0;
      bool have_prev = false;
      double prev_x = 0.0;
      for (std::size_t i : order_[j]) {
        if (node_of[i] != node) continue;
        const double x = data.feature(i, j);
        if (have_prev && x > prev_x) {
          const double ln = static_cast<double>(left_n);
          const double right_sum = total - left_sum;
          const double gain = left_sum * left_sum / ln + right_sum * right_sum / (n - ln) - parent;
          if (gain > floor && (!best.valid() || beats(gain, best.gain))) {
            best.feature = static_cast<int>(j);
            best.threshold = detail::split_threshold(prev_x, x);
            best.gain = gain;
          }
        }
        left_sum += residual[i];
        ++left_n;
        prev_x = x;
        have_prev = true;
      }
    }
    return best;
  }

  const Dataset& data() const noexcept { return *data_; }

private:
  static bool beats(double gain, double incumbent) noexcept {
    return gain > incumbent + detail::kGainTieTolerance * std::abs(incumbent);
  }

  const Dataset* data_;
  std::vector<std::vector<std::size_t>> order_;
};

/// Least-squares CART tree with at most `splits` internal nodes fitted to `residual`.
inline RegressionTree fit_tree(const Dataset& data, std::span<const double> residual, std::size_t splits) {
  return TreeFitter(data).fit(residual, splits);
}

inline RegressionTree fit_stump(const Dataset& data, std::span<const double> residual) {
  return fit_tree(data, residual, 1);
}

/// Explicit member of a finite dictionary.
struct DictionaryAtom {
  int id = 0;
  std::function<double(std::span<const double>)> evaluate;
  std::size_t dim = 0;  // 0: accepts any dimension

  double operator()(std::span<const double> x) const {
    if (dim != 0 && x.size() != dim)
      throw InvalidInput("DictionaryAtom " + std::to_string(id) + ": point has dimension " +
                         std::to_string(x.size()) + ", expected " + std::to_string(dim));
    return evaluate(x);
  }
};

/// A fitted weak learner scaled by a positive factor.
class Learner {
public:
  using Base = std::variant<RegressionTree, DictionaryAtom>;

  Learner() = default;
  explicit Learner(Base base, double scale = 1.0) : base_(std::move(base)), scale_(scale) {}

  double operator()(std::span<const double> x) const {
    return scale_ * std::visit([&](const auto& b) { return b(x); }, base_);
  }

  std::vector<double> predict(const Dataset& data) const {
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = (*this)(data.row(i));
    return out;
  }

  const Base& base() const noexcept { return base_; }
  double scale() const noexcept { return scale_; }
  const RegressionTree* tree() const noexcept { return std::get_if<RegressionTree>(&base_); }
  const DictionaryAtom* atom() const noexcept { return std::get_if<DictionaryAtom>(&base_); }

  Learner rescaled(double factor) const { return Learner(base_, scale_ * factor); }

private:
  Base base_ = RegressionTree{};
  double scale_ = 1.0;
};

/// Learner rescaled to unit empirical norm on its fitting sample, with its
/// predictions on that sample.
struct NormalizedLearner {
  Learner learner;
  std::vector<double> fitted;  // predictions on the fitting sample, unit empirical norm
  double scale = 1.0;          // 1 / norm of the base predictions
};

/// Norms at or below this are treated as a degenerate (zero) learner.
inline constexpr double kDegenerateNorm = 1e-12;

/// Rescales `predictions` (the learner's output on the fitting sample) to unit
/// empirical norm. Returns nullopt for a degenerate learner.
inline std::optional<NormalizedLearner> normalize_learner(const Learner& learner, std::vector<double> predictions) {
  const double norm = empirical_norm(predictions);
  if (!(norm > kDegenerateNorm)) return std::nullopt;
  const double scale = 1.0 / norm;
  for (double& p : predictions) p *= scale;
  return NormalizedLearner{learner.rescaled(scale), std::move(predictions), scale};
}

inline std::optional<NormalizedLearner> normalize_learner(const Learner& learner, const Dataset& data) {
  return normalize_learner(learner, learner.predict(data));
}

/// Dictionary whose atoms have been evaluated and normalized on a dataset.
class Dictionary {
public:
  Dictionary() = default;
  explicit Dictionary(std::vector<DictionaryAtom> atoms) : atoms_(std::move(atoms)) {}

  const std::vector<DictionaryAtom>& atoms() const noexcept { return atoms_; }
  bool empty() const noexcept { return atoms_.empty(); }

  /// Each atom as a learner rescaled to unit empirical norm on `data`. Atoms that
  /// vanish on the sample are dropped.
  std::vector<NormalizedLearner> normalized_on(const Dataset& data) const {
    std::vector<NormalizedLearner> out;
    for (const auto& atom : atoms_)
      if (auto n = normalize_learner(Learner(atom), data)) out.push_back(std::move(*n));
    return out;
  }

private:
  std::vector<DictionaryAtom> atoms_;
};

struct DictionaryChoice {
  std::size_t index = 0;  // position in the candidate list
  double inner = 0.0;     // signed <residual, g>_m
};

/// argmax_g |<residual, g>_m| over unit-norm candidates; ties go to the lowest atom id.
inline DictionaryChoice select_from_dictionary(std::span<const NormalizedLearner> candidates,
                                               std::span<const double> residual) {
  if (candidates.empty()) throw InvalidInput("select_from_dictionary: empty dictionary");
  DictionaryChoice best;
  int best_id = 0;
  double best_abs = -1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double ip = empirical_inner(residual, candidates[i].fitted);
    const auto* atom = candidates[i].learner.atom();
    const int id = atom ? atom->id : static_cast<int>(i);
    const double a = std::abs(ip);
    if (a > best_abs || (a == best_abs && id < best_id)) {
      best = {i, ip};
      best_abs = a;
      best_id = id;
    }
  }
  return best;
}

/// Convenience form: normalizes `atoms` on `data` and selects against `residual`.
inline std::pair<DictionaryAtom, double> select_from_dictionary(const std::vector<DictionaryAtom>& atoms,
                                                                const Dataset& data,
                                                                std::span<const double> residual) {
  if (atoms.empty()) throw InvalidInput("select_from_dictionary: empty dictionary");
  const auto normalized = Dictionary(atoms).normalized_on(data);
  if (normalized.empty()) throw InvalidInput("select_from_dictionary: every atom vanishes on the data");
  const auto choice = select_from_dictionary(std::span<const NormalizedLearner>(normalized), residual);
  return {*normalized[choice.index].learner.atom(), choice.inner};
}

} // namespace rboost

#endif // RBOOST_WEAK_LEARNERS_HPP
