// Copyright 2026 The AOSOBoost Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AOSO_TOOLS_CLI_HPP_
#define AOSO_TOOLS_CLI_HPP_

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aoso/aoso.hpp"

// Command-line front end: train, predict, eval and bench subcommands.
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

namespace aoso::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

struct DataFlags {
  std::string format = "auto";
  int label_column = -1;

  DataFormat Format() const {
    if (format == "csv") return DataFormat::kCsv;
    if (format == "libsvm") return DataFormat::kLibsvm;
    return DataFormat::kAuto;
  }

  void Register(CLI::App& app) {
    app.add_option("--format", format, "Data format")->check(CLI::IsMember({"auto", "libsvm", "csv"}));
    app.add_option("--label-col", label_column, "CSV label column, 0-based; negative counts from the end");
  }
};

struct TrainFlags {
  std::string algo = "aoso";
  std::string train_path;
  std::string test_path;
  std::int64_t trees = 10000;
  int leaves = 20;
  double shrinkage = 0.1;
  std::string pair_rule = "second";
  std::string abc_base = "exhaustive";
  std::size_t min_node = 1;
  std::int64_t eval_every = 50;
  int bins = 0;
  int threads = 1;
  std::uint64_t seed = 0;
  double stop_eps = 1e-16;
  std::string model_out;
  std::string metrics_out;
  bool quiet = false;
  DataFlags data;

  void RegisterShared(CLI::App& app, bool require_test) {
    app.add_option("--train", train_path, "Training data (libsvm or .csv)")->required();
    auto* test = app.add_option("--test", test_path, "Test data for error tracking");
    if (require_test) test->required();
    app.add_option("-J,--leaves", leaves, "Leaves per tree");
    app.add_option("-v,--shrinkage", shrinkage, "Shrinkage factor in (0, 1]");
    app.add_option("--pair-rule", pair_rule, "AOSO class-pair rule")->check(CLI::IsMember({"first", "second"}));
    app.add_option("--abc-base", abc_base, "ABC base-class rule")->check(CLI::IsMember({"exhaustive", "worst"}));
    app.add_option("--min-node", min_node, "Minimum examples per child");
    app.add_option("--eval-every", eval_every, "Metrics row interval in trees");
    app.add_option("--bins", bins, "Quantile bins per feature, 0 = exact");
    app.add_option("--threads", threads, "Split-search workers");
    app.add_option("--seed", seed, "Seed (reserved for data splitting)");
    app.add_option("--stop-eps", stop_eps, "Stop when training loss falls to this value");
    app.add_flag("-q,--quiet", quiet, "No progress output");
    data.Register(app);
  }

  TrainConfig Config() const {
    TrainConfig c;
    c.algorithm = ParseAlgorithm(algo);
    c.max_iterations = trees;
    c.leaves = leaves;
    c.shrinkage = shrinkage;
    c.pair_rule = ParsePairRule(pair_rule);
    c.abc_base_rule = ParseAbcBaseRule(abc_base);
    c.min_node_size = min_node;
    c.eval_every = eval_every;
    c.bins = bins;
    c.threads = threads;
    c.seed = seed;
    c.stop_eps = stop_eps;
    c.Validate();
    return c;
  }
};

struct LoadedData {
  Dataset train;
  std::optional<Dataset> test;
};

inline LoadedData LoadTrainTest(const TrainFlags& f, std::ostream& err) {
  LoadOptions opts;
  opts.label_column = f.data.label_column;
  Dataset train = LoadDataset(f.train_path, f.data.Format(), opts);
  if (auto report = train.label_map().RemapReport(); !report.empty() && !f.quiet) err << report << '\n';
  std::optional<Dataset> test;
  if (!f.test_path.empty()) {
    opts.label_map = train.label_map();
    opts.min_features = train.num_features();
    test = LoadDataset(f.test_path, f.data.Format(), opts);
    if (test->num_features() != train.num_features()) {
      throw InvalidInput("test data has " + std::to_string(test->num_features()) + " features, training data " +
                         std::to_string(train.num_features()));
    }
  }
  if (train.num_classes() < 2) throw InvalidInput("training data needs at least 2 classes");
  return {std::move(train), std::move(test)};
}

inline TrainHooks ProgressHooks(bool quiet, std::ostream& err, std::int64_t every) {
  TrainHooks hooks;
  if (quiet) return hooks;
  hooks.on_iteration = [&err, every, last = std::int64_t{0}](const BoostState& s) mutable {
    if (s.trees_built / every != last / every) {
      err << "trees=" << s.trees_built << " train_loss=" << FormatDouble(s.train_loss) << '\n';
    }
    last = s.trees_built;
  };
  return hooks;
}

inline void WriteMetricsFile(const std::string& path, const BoostState& state) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metrics file '" + path + "'");
  WriteMetricsCsv(state.loss_history, out);
}

inline std::string SummaryLine(const BoostState& state, std::optional<std::int64_t> test_errors,
                               std::optional<std::size_t> test_count) {
  std::ostringstream s;
  s << "trees=" << state.trees_built << " train_loss=" << FormatDouble(state.train_loss) << " test_errors=";
  if (test_errors) {
    s << *test_errors << '/' << *test_count;
  } else {
    s << "-/-";
  }
  return s.str();
}

inline int CmdTrain(const TrainFlags& f, std::ostream& out, std::ostream& err) {
  const TrainConfig config = f.Config();
  LoadedData data = LoadTrainTest(f, err);
  const Dataset* test = data.test ? &*data.test : nullptr;
  const TrainHooks hooks = ProgressHooks(f.quiet, err, f.eval_every);
  auto [model, state] = Train(data.train, config, test, hooks);
  if (!f.model_out.empty()) SaveModel(model, f.model_out);
  if (!f.metrics_out.empty()) WriteMetricsFile(f.metrics_out, state);
  std::optional<std::int64_t> errors;
  std::optional<std::size_t> count;
  if (test) {
    errors = CountErrors(model, *test);
    count = test->num_examples();
  }
  out << SummaryLine(state, errors, count) << '\n';
  return kExitOk;
}

struct PredictFlags {
  std::string model_path;
  std::string data_path;
  std::string out_path;
  bool proba = false;
  DataFlags data;
};

inline int CmdPredict(const PredictFlags& f, std::ostream& out) {
  const Model model = LoadModel(f.model_path);
  LoadOptions opts;
  opts.label_column = f.data.label_column;
  if (ResolveFormat(f.data_path, f.data.Format()) == DataFormat::kLibsvm) opts.min_features = model.num_features;
  const Dataset data = LoadDataset(f.data_path, f.data.Format(), opts);
  if (data.num_features() != model.num_features) {
    throw InvalidInput("data has " + std::to_string(data.num_features()) + " features, model expects " +
                       std::to_string(model.num_features));
  }
  const auto scores = PredictScores(model, data);
  const auto k = static_cast<std::size_t>(model.num_classes);
  std::ofstream file;
  if (!f.out_path.empty()) {
    file.open(f.out_path);
    if (!file) throw std::runtime_error("cannot write '" + f.out_path + "'");
  }
  std::ostream& dst = f.out_path.empty() ? out : file;
  std::vector<double> probs(k);
  for (std::size_t i = 0; i < data.num_examples(); ++i) {
    const auto row = std::span<const double>(scores).subspan(i * k, k);
    dst << model.label_map.LabelOf(detail::ArgmaxClass(row));
    if (f.proba) {
      LinkInto(row, probs);
      for (double p : probs) dst << ' ' << FormatDouble(p);
    }
    dst << '\n';
  }
  return kExitOk;
}

struct EvalFlags {
  std::string pred_path;
  std::string truth_path;
  bool truth_is_labels = false;
  DataFlags data;
};

inline std::vector<std::int64_t> ReadLabelColumn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::vector<std::int64_t> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first)) continue;
    auto label = detail::ParseLabel(first);
    if (!label) throw ParseError(path + ": non-integer label '" + first + "'", line_no);
    labels.push_back(*label);
  }
  return labels;
}

inline int CmdEval(const EvalFlags& f, std::ostream& out) {
  const auto predicted = ReadLabelColumn(f.pred_path);
  std::vector<std::int64_t> truth;
  if (f.truth_is_labels) {
    truth = ReadLabelColumn(f.truth_path);
  } else {
    LoadOptions opts;
    opts.label_column = f.data.label_column;
    const Dataset data = LoadDataset(f.truth_path, f.data.Format(), opts);
    truth.assign(data.raw_labels().begin(), data.raw_labels().end());
  }
  const ErrorSummary s = SummarizeErrors(predicted, truth);
  out << "errors=" << s.errors << " total=" << s.total << " error_rate=" << FormatDouble(s.error_rate) << '\n';
  out << "confusion (rows: truth, columns: predicted)\n";
  out << std::setw(8) << "";
  for (auto c : s.classes) out << std::setw(8) << c;
  out << '\n';
  for (std::size_t t = 0; t < s.classes.size(); ++t) {
    out << std::setw(8) << s.classes[t];
    for (auto n : s.confusion[t]) out << std::setw(8) << n;
    out << '\n';
  }
  return kExitOk;
}

struct BenchFlags {
  std::string algo_a = "abc";
  std::string algo_b = "aoso";
  std::string report_out;
  std::string metrics_prefix;
  TrainFlags shared;
};

struct BenchSide {
  Algorithm algorithm;
  std::int64_t iterations = 0;
  std::int64_t trees = 0;
  double train_loss = 0.0;
  std::int64_t test_errors = 0;
  StopReason stop = StopReason::kNone;
};

/// Runs both algorithms at the same tree budget, (K - 1) * M trees, where M
/// is --trees read as an ABC iteration count.
inline int CmdBench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
  TrainConfig base = f.shared.Config();
  const Algorithm algo_a = ParseAlgorithm(f.algo_a);
  const Algorithm algo_b = ParseAlgorithm(f.algo_b);
  LoadedData data = LoadTrainTest(f.shared, err);
  const Dataset& test = *data.test;
  const int k = data.train.num_classes();

  std::vector<BenchSide> sides;
  std::vector<BoostState> states;
  for (Algorithm algo : {algo_a, algo_b}) {
    TrainConfig c = base;
    c.algorithm = algo;
    c.max_iterations = TreeEqualIterations(algo, k, base.max_iterations);
    if (!f.shared.quiet) {
      err << "bench: " << ToString(algo) << " for at most " << c.max_iterations << " iterations\n";
    }
    auto [model, state] = Train(data.train, c, &test, ProgressHooks(f.shared.quiet, err, c.eval_every));
    BenchSide side{algo, state.iterations, state.trees_built, state.train_loss, CountErrors(model, test),
                   state.stop_reason};
    if (!f.metrics_prefix.empty()) {
      WriteMetricsFile(f.metrics_prefix + std::string(ToString(algo)) + (sides.empty() ? "_a" : "_b") + ".csv",
                       state);
    }
    sides.push_back(side);
    states.push_back(std::move(state));
  }
  const BenchSide& a = sides[0];
  const BenchSide& b = sides[1];
  const double ratio = a.trees > 0 ? static_cast<double>(b.trees) / static_cast<double>(a.trees) : 1.0;
  const auto reach = TreesToReachLoss(states[1], a.train_loss);
  const SignificanceResult sig =
      SignificanceTest(a.test_errors, b.test_errors, static_cast<std::int64_t>(test.num_examples()));

  for (const char* tag : {"a", "b"}) {
    const BenchSide& s = tag[0] == 'a' ? a : b;
    out << "algo_" << tag << '=' << ToString(s.algorithm) << " trees_" << tag << '=' << s.trees << " iterations_"
        << tag << '=' << s.iterations << " train_loss_" << tag << '=' << FormatDouble(s.train_loss) << " test_errors_"
        << tag << '=' << s.test_errors << '/' << test.num_examples() << " stop_" << tag << '=' << ToString(s.stop)
        << '\n';
  }
  out << "R=" << FormatDouble(ratio) << " trees_b_to_loss_a=" << (reach ? std::to_string(*reach) : "-")
      << " p_value=" << FormatDouble(sig.p_value) << " z_stat=" << FormatDouble(sig.z_stat) << '\n';

  if (!f.report_out.empty()) {
    nlohmann::ordered_json report;
    for (const char* tag : {"a", "b"}) {
      const BenchSide& s = tag[0] == 'a' ? a : b;
      report[tag] = {{"algorithm", std::string(ToString(s.algorithm))},
                     {"trees", s.trees},
                     {"iterations", s.iterations},
                     {"train_loss", s.train_loss},
                     {"test_errors", s.test_errors},
                     {"stop_reason", std::string(ToString(s.stop))}};
    }
    report["test_count"] = test.num_examples();
    report["R"] = ratio;
    report["trees_b_to_loss_a"] = reach ? nlohmann::ordered_json(*reach) : nlohmann::ordered_json(nullptr);
    report["p_value"] = sig.p_value;
    report["z_stat"] = sig.z_stat;
    std::ofstream rep(f.report_out);
    if (!rep) throw std::runtime_error("cannot write report '" + f.report_out + "'");
    rep << report.dump(2) << '\n';
  }
  return kExitOk;
}

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
inline int Run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Multi-class LogitBoost: AOSO, ABC and original LogitBoost"};
  app.require_subcommand(1);

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--algo", train.algo, "Algorithm")->check(CLI::IsMember({"aoso", "abc", "logitboost"}));
  train_cmd->add_option("-M,--trees", train.trees, "Maximum boosting iterations");
  train_cmd->add_option("--model-out", train.model_out, "Model output path");
  train_cmd->add_option("--metrics-out", train.metrics_out, "Metrics CSV output path");
  train.RegisterShared(*train_cmd, false);

  PredictFlags predict;
  auto* predict_cmd = app.add_subcommand("predict", "Predict labels with a saved model");
  predict_cmd->add_option("--model", predict.model_path, "Model file")->required();
  predict_cmd->add_option("--data", predict.data_path, "Data to label")->required();
  predict_cmd->add_option("--out", predict.out_path, "Output path (default stdout)");
  predict_cmd->add_flag("--proba", predict.proba, "Append class probabilities");
  predict.data.Register(*predict_cmd);

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against ground truth");
  eval_cmd->add_option("--pred", eval.pred_path, "Predictions, label first on each line")->required();
  eval_cmd->add_option("--truth", eval.truth_path, "Labelled data file")->required();
  eval_cmd->add_flag("--truth-labels", eval.truth_is_labels, "--truth holds one label per line");
  eval.data.Register(*eval_cmd);

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Compare two algorithms at equal tree budgets");
  bench_cmd->add_option("--algo-a", bench.algo_a, "Reference algorithm")
      ->check(CLI::IsMember({"aoso", "abc", "logitboost"}));
  bench_cmd->add_option("--algo-b", bench.algo_b, "Challenger algorithm")
      ->check(CLI::IsMember({"aoso", "abc", "logitboost"}));
  bench_cmd->add_option("-M,--trees", bench.shared.trees, "ABC-equivalent iteration budget M; (K-1)*M trees each");
  bench_cmd->add_option("--report-out", bench.report_out, "JSON report path");
  bench_cmd->add_option("--metrics-prefix", bench.metrics_prefix, "Write <prefix><algo>_{a,b}.csv metrics");
  bench.shared.RegisterShared(*bench_cmd, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return CmdTrain(train, out, err);
    if (predict_cmd->parsed()) return CmdPredict(predict, out);
    if (eval_cmd->parsed()) return CmdEval(eval, out);
    if (bench_cmd->parsed()) return CmdBench(bench, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace aoso::cli

#endif  // AOSO_TOOLS_CLI_HPP_
