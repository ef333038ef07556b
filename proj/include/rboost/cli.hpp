#ifndef RBOOST_CLI_HPP
#define RBOOST_CLI_HPP

#include "rboost/rboost.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace rboost::cli {

struct GridSpec {
  std::size_t count = 20;
  double lo = 1.0;
  double hi = 1e6;

  std::vector<std::int64_t> values() const { return u_grid(count, lo, hi); }
  std::string text() const {
    return std::to_string(count) + ":" + detail::format_double(lo) + ":" + detail::format_double(hi);
  }
};

/// "COUNT:LO:HI", e.g. "20:1:1e6".
inline GridSpec parse_grid(const std::string& s) {
  const auto parts = detail::split_line(s, ':');
  if (parts.size() != 3) throw InvalidInput("--grid expects COUNT:LO:HI, got '" + s + "'");
  const auto count = detail::parse_double(parts[0]);
  const auto lo = detail::parse_double(parts[1]);
  const auto hi = detail::parse_double(parts[2]);
  if (!count || !lo || !hi || *count < 2 || *count != static_cast<double>(static_cast<std::size_t>(*count)))
    throw InvalidInput("--grid expects COUNT:LO:HI with integer COUNT >= 2, got '" + s + "'");
  GridSpec g{static_cast<std::size_t>(*count), *lo, *hi};
  (void)g.values();
  return g;
}

inline std::vector<Algorithm> parse_algos(const std::string& s) {
  if (s == "all") return {Algorithm::Boosting, Algorithm::RBoosting, Algorithm::DDRBoosting};
  return {parse_algorithm(s)};
}

inline std::vector<std::string> algo_names(const std::vector<Algorithm>& algos) {
  std::vector<std::string> out;
  for (auto a : algos) out.emplace_back(to_string(a));
  return out;
}

struct Options {
  std::vector<int> targets{1};
  std::vector<double> sigmas{0.0};
  std::size_t trials = 20;
  std::size_t splits = 4;
  std::size_t k_max = kDefaultMaxIterations;
  std::string grid = "20:1:1e6";
  std::uint64_t seed = 0;
  std::string algo = "all";
  std::optional<std::int64_t> u;
  std::optional<double> clip;
  std::vector<std::string> pre_split;
  std::string out_dir;
  std::size_t train_m = 500;
  std::size_t test_m = 1000;
  std::size_t threads = 0;
  bool no_oracle = false;

  std::string data_path;
  std::string model_path;
  bool no_header = false;
  std::string target_col;
  char delimiter = ',';
  bool has_target = false;

  std::string report_path;
  bool report_all = false;
};

namespace detail {

inline SyntheticSpec spec_for(const Options& o, int target, double sigma) {
  SyntheticSpec s;
  s.target_id = target;
  s.noise_sigma = sigma;
  s.trials = o.trials;
  s.splits = o.splits;
  s.seed_base = o.seed;
  s.train_m = o.train_m;
  s.test_m = o.test_m;
  return s;
}

inline nlohmann::json bench_config(const Options& o) {
  return {{"targets", o.targets}, {"sigmas", o.sigmas},   {"trials", o.trials}, {"j", o.splits},
          {"k_max", o.k_max},     {"grid", o.grid},       {"algo", o.algo},     {"train_m", o.train_m},
          {"test_m", o.test_m},   {"oracle", !o.no_oracle}};
}

inline CsvSchema schema_for(const Options& o, bool features_only) {
  CsvSchema s;
  s.has_header = !o.no_header;
  s.delimiter = o.delimiter;
  s.features_only = features_only;
  if (!o.target_col.empty()) {
    if (const auto idx = rboost::detail::parse_double(o.target_col); idx && *idx >= 0 && *idx == static_cast<double>(static_cast<std::size_t>(*idx)))
      s.target_column = static_cast<std::size_t>(*idx);
    else
      s.target_column = o.target_col;
  }
  return s;
}

/// Writes result tables and the manifest into --out, when given.
class Emitter {
public:
  Emitter(const Options& o, std::string command, nlohmann::json config) : dir_(o.out_dir) {
    manifest_.command = std::move(command);
    manifest_.config = std::move(config);
    manifest_.seeds = {o.seed};
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  bool active() const { return !dir_.empty(); }

  void table(const std::string& file, const ResultTable& t) {
    if (!active()) return;
    emit_results(t, TableFormat::Delimited, dir_ / file, "manifest.json");
    manifest_.outputs.push_back(file);
  }

  void text(const std::string& file, const std::string& body) {
    if (!active()) return;
    write_text(dir_ / file, body);
    manifest_.outputs.push_back(file);
  }

  const RunManifest& manifest() const { return manifest_; }

  void finish() {
    if (!active()) return;
    write_text(dir_ / "manifest.json", manifest_.to_json().dump(2) + "\n");
  }

private:
  std::filesystem::path dir_;
  RunManifest manifest_;
};

inline ResultTable concat(const std::vector<ResultTable>& parts) {
  ResultTable out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out.rows.insert(out.rows.end(), parts[i].rows.begin(), parts[i].rows.end());
  return out;
}

inline int run_simulate(const Options& o, std::ostream& out) {
  const auto algos = parse_algos(o.algo);
  const auto grid = parse_grid(o.grid).values();
  Emitter em(o, "simulate", bench_config(o));
  std::vector<ResultTable> parts;
  for (int t : o.targets)
    for (double s : o.sigmas) {
      const auto report = run_comparison(spec_for(o, t, s), algos, o.k_max, grid, o.threads);
      parts.push_back(trial_rows(report));
    }
  const auto rows = concat(parts);
  out << render_table(summary_table(rows), TableFormat::Aligned);
  em.table("simulate.csv", rows);
  em.finish();
  return 0;
}

inline int run_ucurve_cmd(const Options& o, std::ostream& out) {
  const auto grid = parse_grid(o.grid).values();
  auto config = bench_config(o);
  config.erase("algo");
  Emitter em(o, "ucurve", config);
  for (int t : o.targets)
    for (double s : o.sigmas) {
      const auto curve = run_ucurve(spec_for(o, t, s), grid, o.k_max, o.threads);
      const auto rows = curve_rows(curve);
      out << "m" << t << " sigma=" << rboost::detail::format_double(s) << "\n" << render_table(rows, TableFormat::Aligned);
      em.table("ucurve_m" + std::to_string(t) + "_sigma" + rboost::detail::format_double(s) + ".csv", rows);
    }
  em.finish();
  return 0;
}

inline int run_adaptive_cmd(const Options& o, std::ostream& out) {
  const auto grid = parse_grid(o.grid).values();
  auto config = bench_config(o);
  config.erase("algo");
  Emitter em(o, "adaptive", config);
  std::vector<ResultTable> parts;
  for (int t : o.targets)
    for (double s : o.sigmas)
      parts.push_back(trial_rows(run_adaptive_eval(spec_for(o, t, s), grid, o.k_max, !o.no_oracle, o.threads)));
  const auto rows = concat(parts);
  out << render_table(summary_table(rows), TableFormat::Aligned);
  em.table("adaptive.csv", rows);
  em.finish();
  return 0;
}

inline int run_fit(const Options& o, std::ostream& out) {
  if (o.data_path.empty() || o.model_path.empty()) throw InvalidInput("fit needs --data and --model");
  const auto table = load_csv_table(o.data_path, schema_for(o, false));
  const auto& data = table.data;
  std::clog << "loaded " << data.size() << " rows, " << data.dim() << " features, target '" << table.target_name
            << "'\n";

  TrainConfig cfg;
  cfg.algorithm = parse_algorithm(o.algo == "all" ? "rboost" : o.algo);
  cfg.max_iterations = o.k_max;
  cfg.learner = TreeLearnerSpec{o.splits};
  cfg.clip_bound = o.clip;
  cfg.seed = o.seed;

  nlohmann::json config = {{"data", o.data_path}, {"algo", std::string(to_string(cfg.algorithm))},
                           {"j", o.splits},       {"k_max", o.k_max}};
  Ensemble model;
  if (cfg.algorithm == Algorithm::RBoosting && !o.u) {
    const auto grid = parse_grid(o.grid).values();
    auto sel = adaptive_select(data, grid, o.k_max, cfg, true, o.seed);
    out << "selected u=" << sel.chosen_u << " k=" << sel.chosen_k << " validation_mse="
        << rboost::detail::format_double(sel.validation_risk) << "\n";
    config["selected_u"] = sel.chosen_u;
    config["selected_k"] = sel.chosen_k;
    config["grid"] = o.grid;
    model = std::move(sel.final_model);
  } else {
    if (o.u) {
      cfg.u = *o.u;
      config["u"] = *o.u;
    }
    auto run = train(data, cfg);
    out << "trained " << run.model.size() << " stages, training mse="
        << rboost::detail::format_double(run.trace.records.empty() ? empirical_risk(std::vector<double>(data.size(), 0.0), data.targets())
                                                                   : run.trace.records.back().risk)
        << "\n";
    model = std::move(run.model);
  }
  RunManifest manifest;
  manifest.command = "fit";
  manifest.config = config;
  manifest.seeds = {o.seed};
  manifest.outputs = {std::filesystem::path(o.model_path).filename().string()};
  save_model(model, o.model_path, manifest.to_json());
  return 0;
}

inline int run_predict(const Options& o, std::ostream& out) {
  if (o.data_path.empty() || o.model_path.empty()) throw InvalidInput("predict needs --data and --model");
  const auto model = load_model(o.model_path);
  const bool features_only = !o.has_target && o.target_col.empty();
  const auto data = load_csv_table(o.data_path, schema_for(o, features_only)).data;
  if (!model.empty()) {
    const auto* tree = model.stages().front().learner.tree();
    if (tree && tree->dim() != data.dim())
      throw InvalidInput("model expects " + std::to_string(tree->dim()) + " features, data has " +
                         std::to_string(data.dim()));
  }
  const auto pred = model.predict(data, o.clip);
  std::ostringstream body;
  body << "prediction\n";
  for (double p : pred) body << rboost::detail::format_double(p) << "\n";
  if (!o.out_dir.empty()) {
    Emitter em(o, "predict", {{"model", o.model_path}, {"data", o.data_path}});
    em.text("predictions.csv", "# manifest: manifest.json\n" + body.str());
    em.finish();
  } else {
    out << body.str();
  }
  if (!features_only) out << "rmse " << rboost::detail::format_double(rmse(pred, data.targets())) << "\n";
  return 0;
}

inline int run_realdata(const Options& o, std::ostream& out) {
  RealDataConfig cfg;
  cfg.splits = o.splits;
  cfg.k_max = o.k_max;
  cfg.grid = parse_grid(o.grid).values();
  cfg.seed = o.seed;
  cfg.clip_bound = o.clip;
  cfg.algorithms = parse_algos(o.algo);
  nlohmann::json config = {{"j", o.splits}, {"k_max", o.k_max}, {"grid", o.grid}, {"algo", o.algo}};
  RealDataReport report;
  if (!o.pre_split.empty()) {
    if (o.pre_split.size() != 2) throw InvalidInput("--pre-split expects TRAIN TEST");
    report = realdata_experiment(load_csv(o.pre_split[0], schema_for(o, false)),
                                 load_csv(o.pre_split[1], schema_for(o, false)), cfg);
    config["pre_split"] = o.pre_split;
  } else {
    if (o.data_path.empty()) throw InvalidInput("realdata needs --data or --pre-split");
    report = realdata_experiment(load_csv(o.data_path, schema_for(o, false)), cfg);
    config["data"] = o.data_path;
  }
  if (o.clip) config["clip"] = *o.clip;
  Emitter em(o, "realdata", config);
  const auto rows = realdata_rows(report);
  out << render_table(rows, TableFormat::Aligned);
  em.table("realdata.csv", rows);
  em.finish();
  return 0;
}

inline int run_report(const Options& o, std::ostream& out) {
  const auto rows = read_results(o.report_path);
  const bool trial_file = std::find(rows.columns.begin(), rows.columns.end(), "trial") != rows.columns.end();
  if (trial_file && !o.report_all)
    out << render_table(summary_table(rows), TableFormat::Aligned);
  else
    out << render_table(rows, TableFormat::Aligned);
  return 0;
}

} // namespace detail

/// Parses argv and runs one subcommand. Returns the process exit status:
/// 0 success, 1 runtime failure, 2 usage error.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Boosting, re-scaled boosting and data-driven re-scaled boosting for L2 regression", "rboost"};
  app.require_subcommand(1);
  Options o;

  auto add_bench = [&](CLI::App* sc) {
    sc->add_option("--target", o.targets, "synthetic function id(s), 1..9")->delimiter(',')->check(CLI::Range(1, 9));
    sc->add_option("--sigma", o.sigmas, "noise level(s)")->delimiter(',');
    sc->add_option("--trials", o.trials, "independent trials")->check(CLI::PositiveNumber);
    sc->add_option("--j", o.splits, "CART splits per tree")->check(CLI::PositiveNumber);
    sc->add_option("--k-max", o.k_max, "iteration budget")->check(CLI::PositiveNumber);
    sc->add_option("--grid", o.grid, "u grid COUNT:LO:HI (log-spaced)");
    sc->add_option("--seed", o.seed, "base seed");
    sc->add_option("--train-m", o.train_m, "training set size")->check(CLI::Range(2ul, 100000000ul));
    sc->add_option("--test-m", o.test_m, "test set size")->check(CLI::PositiveNumber);
    sc->add_option("--threads", o.threads, "worker threads (0: all cores); output does not depend on it");
    sc->add_option("--out", o.out_dir, "directory for delimited results and manifest");
  };
  auto add_csv = [&](CLI::App* sc) {
    sc->add_flag("--no-header", o.no_header, "first line is data");
    sc->add_option("--target-col", o.target_col, "target column name or 0-based index (default: last)");
    sc->add_option("--delimiter", o.delimiter, "field separator");
  };

  auto* simulate = app.add_subcommand("simulate", "compare the three boosters on synthetic targets (oracle k/u)");
  add_bench(simulate);
  simulate->add_option("--algo", o.algo, "boost, rboost, ddr or all")->check(CLI::IsMember({"boost", "rboost", "ddr", "all"}));

  auto* ucurve = app.add_subcommand("ucurve", "RBoosting test RMSE against u");
  add_bench(ucurve);

  auto* adaptive = app.add_subcommand("adaptive", "validation-based selection of u and k");
  add_bench(adaptive);
  adaptive->add_flag("--no-oracle", o.no_oracle, "skip the oracle reference rows");

  auto* fit = app.add_subcommand("fit", "train on a CSV file and save the model");
  fit->add_option("--data", o.data_path, "training CSV")->required();
  fit->add_option("--model", o.model_path, "output model file")->required();
  fit->add_option("--algo", o.algo, "boost, rboost or ddr")->check(CLI::IsMember({"boost", "rboost", "ddr"}));
  fit->add_option("--u", o.u, "fixed u for rboost (otherwise chosen on a validation split)")->check(CLI::PositiveNumber);
  fit->add_option("--grid", o.grid, "u grid COUNT:LO:HI");
  fit->add_option("--j", o.splits, "CART splits per tree")->check(CLI::PositiveNumber);
  fit->add_option("--k-max", o.k_max, "iteration budget")->check(CLI::PositiveNumber);
  fit->add_option("--clip", o.clip, "clip predictions to [-M, M]")->check(CLI::PositiveNumber);
  fit->add_option("--seed", o.seed, "seed for the validation split");
  add_csv(fit);

  auto* predict = app.add_subcommand("predict", "apply a saved model to a CSV file");
  predict->add_option("--model", o.model_path, "model file")->required();
  predict->add_option("--data", o.data_path, "feature CSV")->required();
  predict->add_flag("--has-target", o.has_target, "the file also holds the target (last column unless --target-col)");
  predict->add_option("--clip", o.clip, "clip predictions to [-M, M]")->check(CLI::PositiveNumber);
  predict->add_option("--out", o.out_dir, "directory for predictions.csv and manifest");
  add_csv(predict);

  auto* realdata = app.add_subcommand("realdata", "half/half train-test comparison on a CSV dataset");
  realdata->add_option("--data", o.data_path, "dataset CSV");
  realdata->add_option("--pre-split", o.pre_split, "TRAIN TEST files split beforehand")->expected(2);
  realdata->add_option("--j", o.splits, "CART splits per tree (default: stumps)")->check(CLI::PositiveNumber);
  realdata->add_option("--k-max", o.k_max, "iteration budget")->check(CLI::PositiveNumber);
  realdata->add_option("--grid", o.grid, "u grid COUNT:LO:HI");
  realdata->add_option("--seed", o.seed, "seed for splits");
  realdata->add_option("--algo", o.algo, "boost, rboost, ddr or all")->check(CLI::IsMember({"boost", "rboost", "ddr", "all"}));
  realdata->add_option("--clip", o.clip, "clip predictions to [-M, M]")->check(CLI::PositiveNumber);
  realdata->add_option("--out", o.out_dir, "directory for delimited results and manifest");
  add_csv(realdata);

  auto* report = app.add_subcommand("report", "render a delimited result file as an aligned table");
  report->add_option("file", o.report_path, "result file")->required()->check(CLI::ExistingFile);
  report->add_flag("--all", o.report_all, "every row instead of the mean(std) summary");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }
  if (realdata->parsed()) o.splits = realdata->count("--j") ? o.splits : 1;

  try {
    if (simulate->parsed()) return detail::run_simulate(o, out);
    if (ucurve->parsed()) return detail::run_ucurve_cmd(o, out);
    if (adaptive->parsed()) return detail::run_adaptive_cmd(o, out);
    if (fit->parsed()) return detail::run_fit(o, out);
    if (predict->parsed()) return detail::run_predict(o, out);
    if (realdata->parsed()) return detail::run_realdata(o, out);
    if (report->parsed()) return detail::run_report(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

} // namespace rboost::cli

#endif // RBOOST_CLI_HPP
