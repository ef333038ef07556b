#ifndef RBOOST_REPORTING_HPP
#define RBOOST_REPORTING_HPP

#include "rboost/bench.hpp"
#include "rboost/io.hpp"
#include "rboost/realdata.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace rboost {

namespace detail {

inline std::string fixed4(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline std::string mean_paren_std(double mean, double sd) { return fixed4(mean) + "(" + fixed4(sd) + ")"; }

} // namespace detail

/// One row per (target, sigma, algorithm, protocol, trial) plus a "mean" row per method.
inline ResultTable trial_rows(const TrialReport& report) {
  using detail::format_double;
  ResultTable t;
  t.columns = {"target", "sigma", "algorithm", "protocol", "trial", "rmse", "rmse_std", "k", "u", "u_std"};
  t.column_docs = {"synthetic regression function id (m1..m9)",
                   "noise standard deviation of training targets",
                   "Boosting | RBoosting | DDRBoosting",
                   "oracle: k (and u) chosen on the test set; adaptive: chosen on a validation split",
                   "trial index, or 'mean' for the aggregate over trials",
                   "test RMSE on noiseless targets (aggregate: mean)",
                   "sample standard deviation of rmse over trials (aggregate rows only)",
                   "selected iteration count (aggregate: mean)",
                   "selected re-scale parameter u (RBoosting; aggregate: mean)",
                   "sample standard deviation of u (aggregate rows only)"};
  const auto target = "m" + std::to_string(report.spec.target_id);
  const auto sigma = format_double(report.spec.noise_sigma);
  for (const auto& m : report.methods) {
    const std::string algo(to_string(m.algorithm));
    const std::string proto(to_string(m.protocol));
    const bool has_u = !m.u.empty();
    for (std::size_t i = 0; i < m.rmse.size(); ++i)
      t.rows.push_back({target, sigma, algo, proto, std::to_string(i), format_double(m.rmse[i]), "",
                        std::to_string(m.k[i]), has_u ? std::to_string(m.u[i]) : "", ""});
    const auto rs = m.rmse_stats();
    double mean_k = 0.0;
    for (auto k : m.k) mean_k += static_cast<double>(k);
    mean_k /= static_cast<double>(std::max<std::size_t>(m.k.size(), 1));
    const auto us = m.u_stats();
    t.rows.push_back({target, sigma, algo, proto, "mean", format_double(rs.mean), format_double(rs.std),
                      format_double(mean_k), has_u ? format_double(us.mean) : "", has_u ? format_double(us.std) : ""});
  }
  return t;
}

inline ResultTable curve_rows(const std::vector<CurvePoint>& curve) {
  using detail::format_double;
  ResultTable t;
  t.columns = {"u", "mean_rmse", "std_rmse"};
  t.column_docs = {"re-scale parameter u (alpha_k = 2/(k+u))",
                   "RBoosting test RMSE with test-selected k, mean over trials",
                   "sample standard deviation over trials"};
  for (const auto& p : curve) t.rows.push_back({std::to_string(p.u), format_double(p.mean_rmse), format_double(p.std_rmse)});
  return t;
}

inline ResultTable realdata_rows(const RealDataReport& report) {
  using detail::format_double;
  ResultTable t;
  t.columns = {"algorithm", "test_rmse", "k", "u", "train_size", "test_size"};
  t.column_docs = {"Boosting | RBoosting | DDRBoosting", "RMSE on the held-out half",
                   "iteration count chosen on a validation split of the training half",
                   "re-scale parameter u chosen on the validation split (RBoosting)", "rows used for training",
                   "rows used for testing"};
  for (const auto& r : report.results)
    t.rows.push_back({std::string(to_string(r.algorithm)), format_double(r.test_rmse), std::to_string(r.k),
                      r.algorithm == Algorithm::RBoosting ? std::to_string(r.u) : "",
                      std::to_string(report.train_size), std::to_string(report.test_size)});
  return t;
}

/// Aggregate rows of a delimited trial file rendered as "mean(std)" cells, one
/// line per method and one column per (target, sigma) setting.
inline ResultTable summary_table(const ResultTable& rows) {
  auto col = [&](const std::string& name) -> std::size_t {
    for (std::size_t c = 0; c < rows.columns.size(); ++c)
      if (rows.columns[c] == name) return c;
    throw InvalidInput("report: column '" + name + "' missing");
  };
  const auto c_target = col("target"), c_sigma = col("sigma"), c_algo = col("algorithm"), c_proto = col("protocol"),
             c_trial = col("trial"), c_rmse = col("rmse"), c_std = col("rmse_std"), c_u = col("u"), c_ustd = col("u_std");

  std::vector<std::string> settings;
  std::vector<std::string> methods;
  auto index_of = [](std::vector<std::string>& v, const std::string& s) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] == s) return i;
    v.push_back(s);
    return v.size() - 1;
  };
  struct Cell {
    std::size_t method, setting;
    std::string text;
  };
  std::vector<Cell> cells;
  for (const auto& r : rows.rows) {
    if (r.size() != rows.columns.size() || r[c_trial] != "mean") continue;
    const auto setting = index_of(settings, r[c_target] + " sigma=" + r[c_sigma]);
    const auto method = index_of(methods, r[c_algo] + "/" + r[c_proto]);
    std::string text = detail::mean_paren_std(std::stod(r[c_rmse]), std::stod(r[c_std]));
    if (!r[c_u].empty()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " u=%.0f(%.0f)", std::stod(r[c_u]), std::stod(r[c_ustd]));
      text += buf;
    }
    cells.push_back({method, setting, std::move(text)});
  }
  ResultTable t;
  t.columns.push_back("method");
  for (const auto& s : settings) t.columns.push_back(s);
  for (std::size_t m = 0; m < methods.size(); ++m) {
    std::vector<std::string> line(settings.size() + 1);
    line[0] = methods[m];
    for (const auto& c : cells)
      if (c.method == m) line[c.setting + 1] = c.text;
    t.rows.push_back(std::move(line));
  }
  return t;
}

} // namespace rboost

#endif // RBOOST_REPORTING_HPP
