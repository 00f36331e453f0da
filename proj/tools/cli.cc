#include "cli.h"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "decole/dataset.h"
#include "decole/errors.h"
#include "decole/eval.h"
#include "decole/experiment.h"
#include "decole/prune.h"
#include "decole/report.h"
#include "decole/rng.h"
#include "decole/synth.h"
#include "json.hpp"

namespace decole {

namespace {

using nlohmann::json;

constexpr const char* kOutputDirEnv = "DECOLE_OUTPUT_DIR";
constexpr const char* kDefaultOutputDir = "decole_output";

const char* KindOf(ExitCode code) {
  switch (code) {
    case ExitCode::kOk:
      return "ok";
    case ExitCode::kUsage:
      return "usage";
    case ExitCode::kData:
      return "data";
    case ExitCode::kNumerical:
      return "numerical";
  }
  return "data";
}

int ReportError(ExitCode code, const std::string& message,
                const DataError* data = nullptr) {
  json error = {{"kind", KindOf(code)}, {"message", message}};
  if (data != nullptr) {
    if (data->row()) error["row"] = *data->row();
    if (data->column()) error["column"] = *data->column();
  }
  std::cerr << json({{"error", error}}).dump() << "\n";
  return static_cast<int>(code);
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    WriteFileAtomically(path, text);
  }
}

struct SynthArgs {
  std::string config;
  std::string output;
  std::optional<std::int64_t> n;
  std::optional<double> majority_fraction;
  std::optional<double> positive_fraction;
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
  std::string noise_mode;
  bool no_noise = false;
};

int RunSynth(const SynthArgs& args) {
  ExperimentConfig config;
  if (!args.config.empty()) config = ReadExperimentConfig(args.config);
  SynthConfig& synth = config.synth;
  if (args.n) synth.n = *args.n;
  if (args.majority_fraction) synth.majority_fraction = *args.majority_fraction;
  if (args.positive_fraction) {
    synth.within_group_positive_fraction = *args.positive_fraction;
  }
  if (args.sigma) synth.sigma = *args.sigma;
  if (args.seed) synth.seed = *args.seed;
  if (!args.noise_mode.empty()) {
    config.noise.mode = args.noise_mode == "bernoulli"
                            ? NoiseMode::kBernoulli
                            : NoiseMode::kExactCount;
  }
  LabeledDataset data = GeneratePopulation(synth);
  if (!args.no_noise) {
    data = InjectNoise(data, config.noise, DeriveSeed(synth.seed, "noise"));
  }
  WriteCsv(data, args.output);
  std::cerr << fmt::format("wrote {} rows to {}\n", data.size(), args.output);
  return 0;
}

struct PruneArgs {
  std::string method;
  std::string input;
  std::string config;
  std::string output_retained;
  std::string output_report;
  std::optional<int> folds;
  std::uint64_t seed = 0;
  std::optional<double> l2_lambda;
  std::optional<int> max_iterations;
  std::optional<double> tolerance;
  std::optional<std::size_t> count;
  std::string group_feature;
  bool parallel = false;
};

int RunPrune(const PruneArgs& args) {
  const PruneMethod method = ParseMethod(args.method);
  ExperimentConfig defaults;
  if (!args.config.empty()) defaults = ReadExperimentConfig(args.config);
  PruneConfig config;
  config.learner = defaults.learner;
  config.folds = defaults.folds;
  config.group_feature = defaults.group_feature;
  config.seed = args.seed;
  config.parallel_folds = args.parallel;
  if (args.folds) config.folds = *args.folds;
  if (args.l2_lambda) config.learner.l2_lambda = *args.l2_lambda;
  if (args.max_iterations) config.learner.max_iterations = *args.max_iterations;
  if (args.tolerance) config.learner.tolerance = *args.tolerance;
  if (!args.group_feature.empty()) {
    config.group_feature = ParseGroupFeature(args.group_feature);
  }
  config.learner.Validate();
  if (config.folds < 2) throw ConfigError("--folds must be at least 2");
  if (method == PruneMethod::kRandom && !args.count) {
    throw ConfigError("--count is required for --method random");
  }

  const LabeledDataset data = ReadCsv(args.input);
  Validate(data);
  PruneResult result;
  switch (method) {
    case PruneMethod::kDecole:
      result = DecolePrune(data, config);
      break;
    case PruneMethod::kCl:
      result = ClPrune(data, config);
      break;
    case PruneMethod::kRandom:
      result = RandomPrune(data, *args.count, args.seed);
      break;
  }
  WriteText(args.output_report, PruneReportJson(result));
  if (!args.output_retained.empty()) {
    WriteCsv(Retain(data, result), args.output_retained);
  }
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << fmt::format("{}: pruned {} of {} rows\n", MethodName(method),
                           result.pruned_ids.size(), data.size());
  return 0;
}

struct EvalArgs {
  std::string original;
  std::string report;
  std::string retained;
  std::string output;
  std::string output_csv;
};

json TallyJson(const PruneTally& t) {
  return {{"hits", t.hits}, {"pruned", t.pruned}, {"errors", t.errors}};
}

json RateJson(const RateTally& t) {
  return {{"wrong", t.wrong}, {"total", t.total}};
}

int RunEval(const EvalArgs& args) {
  const LabeledDataset original = ReadCsv(args.original);
  Validate(original);
  const PruneResult result = ParsePruneReport(ReadText(args.report));
  LabeledDataset retained = args.retained.empty() ? Retain(original, result)
                                                  : ReadCsv(args.retained);
  if (!retained.gold) {
    throw DataError("retained dataset has no gold labels", std::nullopt,
                    "gold");
  }
  const ErrorMask mask = ComputeErrorMask(original);
  const PruneQuality pq = ComputePruneQuality(original, mask, result);
  const LabelQuality lq = ComputeLabelQuality(retained);
  MetricBundle bundle;
  AppendPruneMetrics(pq, bundle);
  AppendLabelMetrics(lq, bundle);

  json groups = json::object();
  json counts = {{"overall", TallyJson(pq.overall)}};
  json rates = {{"overall", {{"fpr", RateJson(lq.fpr)}, {"fnr", RateJson(lq.fnr)}}}};
  for (int g = 0; g < original.num_groups; ++g) {
    const std::string scope = "g" + std::to_string(g);
    const auto gi = static_cast<std::size_t>(g);
    groups[scope] = original.GroupValue(g);
    counts[scope] = TallyJson(pq.per_group[gi]);
    counts[scope + ".fn"] = TallyJson(pq.false_negative[gi]);
    counts[scope + ".fp"] = TallyJson(pq.false_positive[gi]);
    if (gi < lq.group_fpr.size()) {
      rates[scope] = {{"fpr", RateJson(lq.group_fpr[gi])},
                      {"fnr", RateJson(lq.group_fnr[gi])}};
    }
  }
  const json out = {
      {"method", MethodName(result.method)},
      {"seed", result.seed},
      {"groups", groups},
      {"prune_counts", counts},
      {"label_counts", rates},
      {"metrics", json::parse(MetricsJson(bundle))},
  };
  WriteText(args.output, out.dump(2) + "\n");
  if (!args.output_csv.empty()) WriteText(args.output_csv, MetricsCsv(bundle));
  return 0;
}

struct ExperimentArgs {
  std::string config;
  std::string output_dir;
};

int RunExperimentCommand(const ExperimentArgs& args) {
  ExperimentConfig config;
  if (!args.config.empty()) config = ReadExperimentConfig(args.config);
  if (!args.output_dir.empty()) {
    config.output_dir = args.output_dir;
  } else if (config.output_dir.empty()) {
    const char* env = std::getenv(kOutputDirEnv);
    config.output_dir = env != nullptr && *env != '\0' ? env : kDefaultOutputDir;
  }
  const ExperimentResult result = RunExperiment(config);
  std::cerr << fmt::format("{} seeds x {} methods written to {}\n",
                           result.seeds.size(), config.methods.size(),
                           config.output_dir.string());
  return 0;
}

}  // namespace

int RunCli(int argc, char** argv) {
  CLI::App app{"Group-aware label-error pruning (DeCoLe), with confident "
               "learning and random baselines."};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate the two-group Gaussian population with label noise");
  synth_cmd->add_option("--output,-o", synth.output, "Output CSV")->required();
  synth_cmd->add_option("--config", synth.config,
                        "JSON config (synth and noise sections)")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--n", synth.n, "Population size");
  synth_cmd->add_option("--majority-fraction", synth.majority_fraction,
                        "Fraction of rows in group 1");
  synth_cmd->add_option("--positive-fraction", synth.positive_fraction,
                        "Within-group fraction of gold positives");
  synth_cmd->add_option("--sigma", synth.sigma, "Cluster standard deviation");
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--noise-mode", synth.noise_mode, "exact or bernoulli")
      ->check(CLI::IsMember({"exact", "bernoulli"}));
  synth_cmd->add_flag("--no-noise", synth.no_noise,
                      "Write observed labels equal to gold");

  PruneArgs prune;
  auto* prune_cmd =
      app.add_subcommand("prune", "Detect and remove suspected label errors");
  prune_cmd->add_option("--method", prune.method, "decole, cl or random")
      ->required()
      ->check(CLI::IsMember({"decole", "cl", "random"}));
  prune_cmd->add_option("--input", prune.input, "Input CSV")
      ->required()
      ->check(CLI::ExistingFile);
  prune_cmd->add_option("--config", prune.config,
                        "JSON config (learner section)")
      ->check(CLI::ExistingFile);
  prune_cmd->add_option("--folds", prune.folds, "Cross-validation folds");
  prune_cmd->add_option("--seed", prune.seed, "Random seed");
  prune_cmd->add_option("--l2-lambda", prune.l2_lambda, "Ridge penalty");
  prune_cmd->add_option("--max-iterations", prune.max_iterations,
                        "Optimizer iteration cap");
  prune_cmd->add_option("--tolerance", prune.tolerance,
                        "Gradient infinity-norm tolerance");
  prune_cmd->add_option("--count", prune.count, "Rows to prune (random only)");
  prune_cmd->add_option("--group-feature", prune.group_feature,
                        "auto, include or exclude")
      ->check(CLI::IsMember({"auto", "include", "exclude"}));
  prune_cmd->add_flag("--parallel", prune.parallel,
                      "Fit cross-validation folds on separate threads");
  prune_cmd->add_option("--output-retained", prune.output_retained,
                        "CSV of rows kept");
  prune_cmd->add_option("--output-report", prune.output_report,
                        "JSON report (default: stdout)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand(
      "eval", "Score a pruning report against gold labels");
  eval_cmd->add_option("--original", eval.original, "Pre-pruning CSV with gold")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--report", eval.report, "JSON report from prune")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--retained", eval.retained,
                       "Retained CSV with gold (default: derived)")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--output", eval.output, "Metrics JSON (default: stdout)");
  eval_cmd->add_option("--output-csv", eval.output_csv,
                       "Flat metric,scope,value table");

  ExperimentArgs experiment;
  auto* experiment_cmd = app.add_subcommand(
      "experiment", "Run the multi-seed method comparison on synthetic data");
  experiment_cmd->add_option("--config", experiment.config, "JSON config")
      ->check(CLI::ExistingFile);
  experiment_cmd->add_option(
      "--output-dir", experiment.output_dir,
      std::string("Output directory (default: $") + kOutputDirEnv + " or " +
          kDefaultOutputDir + ")");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << app.help() << "\n";
    return ReportError(ExitCode::kUsage, e.what());
  }

  try {
    if (synth_cmd->parsed()) return RunSynth(synth);
    if (prune_cmd->parsed()) return RunPrune(prune);
    if (eval_cmd->parsed()) return RunEval(eval);
    if (experiment_cmd->parsed()) return RunExperimentCommand(experiment);
  } catch (const DataError& e) {
    return ReportError(ExitCodeOf(e), e.what(), &e);
  } catch (const std::exception& e) {
    return ReportError(ExitCodeOf(e), e.what());
  }
  return ReportError(ExitCode::kUsage, "no subcommand");
}

}  // namespace decole
