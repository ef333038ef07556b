#ifndef RBOOST_BENCH_HPP
#define RBOOST_BENCH_HPP

#include "rboost/boosters.hpp"
#include "rboost/core.hpp"
#include "rboost/ensemble.hpp"
#include "rboost/model_selection.hpp"
#include "rboost/random.hpp"
#include "rboost/targets.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace rboost {

inline constexpr std::size_t kDefaultMaxIterations = 2000;

/// Simulation setting: Y = m(X) + sigma * eps, X ~ U[-2, 2]^d, eps ~ N(0, 1).
struct SyntheticSpec {
  int target_id = 1;
  double noise_sigma = 0.0;
  std::size_t train_m = 500;
  std::size_t test_m = 1000;
  std::size_t trials = 20;
  std::uint64_t seed_base = 0;
  std::size_t splits = 4;  // CART split budget J

  std::size_t dim() const { return target_dimension(target_id); }

  void validate() const {
    (void)dim();
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw InvalidInput("noise sigma must be >= 0");
    if (train_m < 2) throw InvalidInput("train size must be >= 2");
    if (test_m < 1) throw InvalidInput("test size must be >= 1");
    if (trials < 1) throw InvalidInput("trials must be >= 1");
    if (splits < 1) throw InvalidInput("split count J must be >= 1");
  }
};

struct SampledTrial {
  Dataset train;
  Dataset test;  // noiseless
};

namespace detail {

inline Dataset draw_synthetic(int target_id, std::size_t m, double sigma, Rng& rng) {
  const std::size_t d = target_dimension(target_id);
  std::vector<double> x(m * d);
  std::vector<double> y(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) x[i * d + j] = rng.uniform(-2.0, 2.0);
    const double noise = rng.normal();
    y[i] = eval_target(target_id, std::span<const double>(x).subspan(i * d, d));
    if (sigma != 0.0) y[i] += sigma * noise;
  }
  return Dataset(std::move(x), std::move(y), d);
}

} // namespace detail

/// Fresh train/test draw for one trial. Streams are keyed by (seed_base, trial, role).
inline SampledTrial sample_dataset(const SyntheticSpec& spec, std::size_t trial_index) {
  spec.validate();
  if (trial_index >= spec.trials) throw InvalidInput("sample_dataset: trial index out of range");
  Rng train_rng({spec.seed_base, trial_index, 0});
  Rng test_rng({spec.seed_base, trial_index, 1});
  return {detail::draw_synthetic(spec.target_id, spec.train_m, spec.noise_sigma, train_rng),
          detail::draw_synthetic(spec.target_id, spec.test_m, 0.0, test_rng)};
}

inline double rmse(std::span<const double> pred, std::span<const double> truth) {
  return std::sqrt(empirical_risk(pred, truth));
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be written
/// to slots indexed by i; the first exception (lowest index) is rethrown.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1); 0 for one value
};

inline MeanStd mean_std(std::span<const double> v) {
  MeanStd out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return out;
}

enum class Protocol { Oracle, Adaptive };

inline std::string_view to_string(Protocol p) noexcept { return p == Protocol::Oracle ? "oracle" : "adaptive"; }

/// Per-trial outcomes of one method.
struct MethodSummary {
  Algorithm algorithm = Algorithm::Boosting;
  Protocol protocol = Protocol::Oracle;
  std::vector<double> rmse;      // test RMSE per trial
  std::vector<std::size_t> k;    // selected iteration count per trial
  std::vector<std::int64_t> u;   // selected u per trial (RBoosting only)

  MeanStd rmse_stats() const { return mean_std(rmse); }
  MeanStd u_stats() const {
    std::vector<double> d(u.begin(), u.end());
    return mean_std(d);
  }
};

struct CurvePoint {
  std::int64_t u = 1;
  double mean_rmse = 0.0;
  double std_rmse = 0.0;
};

struct TrialReport {
  SyntheticSpec spec;
  std::size_t k_max = 0;
  std::vector<MethodSummary> methods;
  std::vector<CurvePoint> ucurve;  // RBoosting, test-selected k, per grid u

  const MethodSummary* find(Algorithm a, Protocol p = Protocol::Oracle) const {
    for (const auto& m : methods)
      if (m.algorithm == a && m.protocol == p) return &m;
    return nullptr;
  }
};

/// Test RMSE of the best truncation of `model`, with that k.
inline HoldoutChoice oracle_k(const Ensemble& model, const Dataset& test) { return select_k_by_holdout(model, test); }

namespace detail {

struct TrialOutcome {
  std::vector<HoldoutChoice> fixed;       // per requested non-RBoosting algorithm
  std::vector<HoldoutChoice> per_u;       // RBoosting per grid u
  std::optional<std::size_t> best_u_index;
};

inline TrialOutcome run_trial(const SyntheticSpec& spec, std::size_t trial, std::span<const Algorithm> algorithms,
                              std::size_t k_max, std::span<const std::int64_t> grid) {
  const auto data = sample_dataset(spec, trial);
  TrainConfig cfg;
  cfg.max_iterations = k_max;
  cfg.learner = TreeLearnerSpec{spec.splits};
  cfg.seed = spec.seed_base;

  TrialOutcome out;
  for (auto a : algorithms) {
    if (a == Algorithm::RBoosting) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        cfg.algorithm = Algorithm::RBoosting;
        cfg.u = grid[i];
        const auto choice = oracle_k(train(data.train, cfg).model, data.test);
        out.per_u.push_back(choice);
        if (!out.best_u_index || choice.rmse < out.per_u[*out.best_u_index].rmse) out.best_u_index = i;
      }
    } else {
      cfg.algorithm = a;
      out.fixed.push_back(oracle_k(train(data.train, cfg).model, data.test));
    }
  }
  return out;
}

inline void check_bench_inputs(const SyntheticSpec& spec, std::size_t k_max, std::span<const std::int64_t> grid,
                               bool need_grid) {
  spec.validate();
  if (k_max < 1) throw InvalidInput("k_max must be >= 1");
  if (need_grid && grid.empty()) throw InvalidInput("u grid is empty");
  for (auto u : grid)
    if (u < 1) throw InvalidInput("u grid values must be >= 1");
}

inline std::string trial_context(const SyntheticSpec& spec, std::size_t trial) {
  return "target m" + std::to_string(spec.target_id) + ", sigma " + std::to_string(spec.noise_sigma) + ", trial " +
         std::to_string(trial);
}

} // namespace detail

/// Trains each algorithm on every trial and scores it on the noiseless test set with
/// test-selected k (and u, for RBoosting). This is the oracle protocol: selection
/// uses the test data directly.
inline TrialReport run_comparison(const SyntheticSpec& spec, std::vector<Algorithm> algorithms, std::size_t k_max,
                                  std::span<const std::int64_t> grid, std::size_t threads = 0) {
  const bool has_r = std::find(algorithms.begin(), algorithms.end(), Algorithm::RBoosting) != algorithms.end();
  detail::check_bench_inputs(spec, k_max, grid, has_r);

  std::vector<detail::TrialOutcome> outcomes(spec.trials);
  parallel_for(
      spec.trials,
      [&](std::size_t t) {
        try {
          outcomes[t] = detail::run_trial(spec, t, algorithms, k_max, grid);
        } catch (const std::exception& e) {
          throw std::runtime_error(detail::trial_context(spec, t) + ": " + e.what());
        }
      },
      threads);

  TrialReport report;
  report.spec = spec;
  report.k_max = k_max;
  std::size_t fixed_index = 0;
  for (auto a : algorithms) {
    MethodSummary s;
    s.algorithm = a;
    for (const auto& o : outcomes) {
      if (a == Algorithm::RBoosting) {
        const auto& best = o.per_u[*o.best_u_index];
        s.rmse.push_back(best.rmse);
        s.k.push_back(best.k);
        s.u.push_back(grid[*o.best_u_index]);
      } else {
        s.rmse.push_back(o.fixed[fixed_index].rmse);
        s.k.push_back(o.fixed[fixed_index].k);
      }
    }
    if (a != Algorithm::RBoosting) ++fixed_index;
    report.methods.push_back(std::move(s));
  }
  if (has_r) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> r;
      for (const auto& o : outcomes) r.push_back(o.per_u[i].rmse);
      const auto st = mean_std(r);
      report.ucurve.push_back({grid[i], st.mean, st.std});
    }
  }
  return report;
}

/// RBoosting test RMSE against u (k test-selected per trial), averaged over trials.
inline std::vector<CurvePoint> run_ucurve(const SyntheticSpec& spec, std::span<const std::int64_t> grid,
                                          std::size_t k_max, std::size_t threads = 0) {
  return run_comparison(spec, {Algorithm::RBoosting}, k_max, grid, threads).ucurve;
}

/// Validation-based selection of (u, k) on each trial's training set (seeded random
/// half split), retrained on the full training set and scored on the test set.
/// With `with_oracle` the oracle RBoosting result on the same trials is added.
inline TrialReport run_adaptive_eval(const SyntheticSpec& spec, std::span<const std::int64_t> grid, std::size_t k_max,
                                     bool with_oracle = false, std::size_t threads = 0) {
  detail::check_bench_inputs(spec, k_max, grid, true);

  struct Outcome {
    HoldoutChoice adaptive;
    std::int64_t u = 1;
    detail::TrialOutcome oracle;
  };
  std::vector<Outcome> outcomes(spec.trials);
  parallel_for(
      spec.trials,
      [&](std::size_t t) {
        try {
          const auto data = sample_dataset(spec, t);
          TrainConfig cfg;
          cfg.learner = TreeLearnerSpec{spec.splits};
          cfg.seed = spec.seed_base;
          const auto sel = adaptive_select(data.train, grid, k_max, cfg, true, Rng({spec.seed_base, t, 2}).next());
          const auto pred = sel.final_model.predict(data.test);
          outcomes[t].adaptive = {sel.chosen_k, rmse(pred, data.test.targets())};
          outcomes[t].u = sel.chosen_u;
          if (with_oracle) {
            const Algorithm r[] = {Algorithm::RBoosting};
            outcomes[t].oracle = detail::run_trial(spec, t, r, k_max, grid);
          }
        } catch (const std::exception& e) {
          throw std::runtime_error(detail::trial_context(spec, t) + ": " + e.what());
        }
      },
      threads);

  TrialReport report;
  report.spec = spec;
  report.k_max = k_max;
  MethodSummary adaptive{Algorithm::RBoosting, Protocol::Adaptive, {}, {}, {}};
  for (const auto& o : outcomes) {
    adaptive.rmse.push_back(o.adaptive.rmse);
    adaptive.k.push_back(o.adaptive.k);
    adaptive.u.push_back(o.u);
  }
  report.methods.push_back(std::move(adaptive));
  if (with_oracle) {
    MethodSummary oracle{Algorithm::RBoosting, Protocol::Oracle, {}, {}, {}};
    for (const auto& o : outcomes) {
      const auto i = *o.oracle.best_u_index;
      oracle.rmse.push_back(o.oracle.per_u[i].rmse);
      oracle.k.push_back(o.oracle.per_u[i].k);
      oracle.u.push_back(grid[i]);
    }
    report.methods.push_back(std::move(oracle));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      std::vector<double> r;
      for (const auto& o : outcomes) r.push_back(o.oracle.per_u[i].rmse);
      const auto st = mean_std(r);
      report.ucurve.push_back({grid[i], st.mean, st.std});
    }
  }
  return report;
}

} // namespace rboost

#endif // RBOOST_BENCH_HPP
