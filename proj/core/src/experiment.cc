#include "decole/experiment.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "decole/errors.h"
#include "decole/report.h"
#include "decole/rng.h"
#include "json.hpp"
#include "json_util.h"

namespace decole {

using nlohmann::json;

namespace {

constexpr const char* kPrePruning = "pre_pruning";

void RejectUnknownKeys(const json& object, std::initializer_list<const char*> known,
                       const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : object.items()) {
    if (std::none_of(known.begin(), known.end(),
                     [&key](const char* k) { return key == k; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void ReadIfPresent(const json& object, const char* key, T& out) {
  if (object.contains(key)) out = object.at(key).get<T>();
}

Cell ParseCell(const json& entry) {
  const int group = entry.at("group").get<int>();
  const int cls = entry.at("class").get<int>();
  if (group < 0 || cls < 0 || cls > 1) {
    throw ConfigError("cell (group " + std::to_string(group) + ", class " +
                      std::to_string(cls) + ") out of range");
  }
  return {group, static_cast<Label>(cls)};
}

const char* GroupFeatureName(GroupFeature g) {
  switch (g) {
    case GroupFeature::kAuto:
      return "auto";
    case GroupFeature::kInclude:
      return "include";
    case GroupFeature::kExclude:
      return "exclude";
  }
  return "auto";
}

// Rethrows the active library exception with a context prefix, keeping its
// category (and so its exit code).
template <typename F>
auto WithContext(const std::string& context, F&& body) {
  try {
    return body();
  } catch (const InsufficientDataError& e) {
    throw InsufficientDataError(context + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(context + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(context + ": " + e.what());
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json SummaryToJson(const MetricSummary& s) {
  json values = json::array();
  for (const auto& v : s.values) {
    values.push_back(v ? json(*v) : json(nullptr));
  }
  auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  return {{"mean", opt(s.mean)},
          {"sd", opt(s.sd)},
          {"half_width", opt(s.half_width)},
          {"runs", s.runs},
          {"values", std::move(values)}};
}

json AggregateToJson(const AggregateReport& report) {
  json out = json::object();
  for (const auto& [key, summary] : report.metrics) {
    out[key.first][key.second] = SummaryToJson(summary);
  }
  return out;
}

std::string CsvCell(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

}  // namespace

GroupFeature ParseGroupFeature(std::string_view name) {
  if (name == "auto") return GroupFeature::kAuto;
  if (name == "include") return GroupFeature::kInclude;
  if (name == "exclude") return GroupFeature::kExclude;
  throw ConfigError("group_feature must be auto, include or exclude, got '" +
                    std::string(name) + "'");
}

void ExperimentConfig::Validate() const {
  synth.Validate();
  noise.Validate();
  learner.Validate();
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() !=
      seeds.size()) {
    throw ConfigError("seeds must be distinct");
  }
  if (std::set<PruneMethod>(methods.begin(), methods.end()).size() !=
      methods.size()) {
    throw ConfigError("methods must be distinct");
  }
  if (folds < 2) throw ConfigError("folds must be at least 2");
}

ExperimentConfig ParseExperimentConfig(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  ExperimentConfig config;
  try {
    RejectUnknownKeys(root,
                      {"synth", "noise", "methods", "seeds", "learner", "random",
                       "output_dir"},
                      "config");
    if (root.contains("synth")) {
      const json& s = root.at("synth");
      RejectUnknownKeys(s,
                        {"n", "majority_fraction",
                         "within_group_positive_fraction", "sigma", "seed",
                         "cluster_means"},
                        "synth");
      ReadIfPresent(s, "n", config.synth.n);
      ReadIfPresent(s, "majority_fraction", config.synth.majority_fraction);
      ReadIfPresent(s, "within_group_positive_fraction",
                    config.synth.within_group_positive_fraction);
      ReadIfPresent(s, "sigma", config.synth.sigma);
      ReadIfPresent(s, "seed", config.synth.seed);
      if (s.contains("cluster_means")) {
        for (const auto& entry : s.at("cluster_means")) {
          RejectUnknownKeys(entry, {"group", "class", "mean"}, "cluster_means");
          const auto mean = entry.at("mean").get<std::vector<double>>();
          if (mean.size() != 2) {
            throw ConfigError("cluster mean must have two coordinates");
          }
          config.synth.cluster_means[ParseCell(entry)] = {mean[0], mean[1]};
        }
      }
    }
    if (root.contains("noise")) {
      const json& nz = root.at("noise");
      RejectUnknownKeys(nz, {"mode", "rates"}, "noise");
      if (nz.contains("mode")) {
        const auto mode = nz.at("mode").get<std::string>();
        if (mode == "exact") {
          config.noise.mode = NoiseMode::kExactCount;
        } else if (mode == "bernoulli") {
          config.noise.mode = NoiseMode::kBernoulli;
        } else {
          throw ConfigError("noise mode must be exact or bernoulli");
        }
      }
      if (nz.contains("rates")) {
        for (const auto& entry : nz.at("rates")) {
          RejectUnknownKeys(entry, {"group", "class", "rate"}, "noise.rates");
          config.noise.rates[ParseCell(entry)] = entry.at("rate").get<double>();
        }
      }
    }
    if (root.contains("methods")) {
      config.methods.clear();
      for (const auto& m : root.at("methods")) {
        config.methods.push_back(ParseMethod(m.get<std::string>()));
      }
    }
    ReadIfPresent(root, "seeds", config.seeds);
    if (root.contains("learner")) {
      const json& l = root.at("learner");
      RejectUnknownKeys(l,
                        {"l2_lambda", "max_iterations", "tolerance", "folds",
                         "group_feature"},
                        "learner");
      ReadIfPresent(l, "l2_lambda", config.learner.l2_lambda);
      ReadIfPresent(l, "max_iterations", config.learner.max_iterations);
      ReadIfPresent(l, "tolerance", config.learner.tolerance);
      ReadIfPresent(l, "folds", config.folds);
      if (l.contains("group_feature")) {
        config.group_feature =
            ParseGroupFeature(l.at("group_feature").get<std::string>());
      }
    }
    if (root.contains("random")) {
      const json& r = root.at("random");
      RejectUnknownKeys(r, {"match_decole_count", "count"}, "random");
      ReadIfPresent(r, "match_decole_count", config.match_random_count);
      ReadIfPresent(r, "count", config.random_count);
    }
    if (root.contains("output_dir")) {
      config.output_dir = root.at("output_dir").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
  config.Validate();
  return config;
}

ExperimentConfig ReadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseExperimentConfig(buffer.str());
}

std::string ExperimentConfigJson(const ExperimentConfig& config) {
  json means = json::array();
  for (const auto& [cell, mean] : config.synth.cluster_means) {
    means.push_back({{"group", cell.first},
                     {"class", cell.second},
                     {"mean", {mean[0], mean[1]}}});
  }
  json rates = json::array();
  for (const auto& [cell, rate] : config.noise.rates) {
    rates.push_back(
        {{"group", cell.first}, {"class", cell.second}, {"rate", rate}});
  }
  json methods = json::array();
  for (const auto m : config.methods) methods.push_back(MethodName(m));
  const json root = {
      {"synth",
       {{"n", config.synth.n},
        {"majority_fraction", config.synth.majority_fraction},
        {"within_group_positive_fraction",
         config.synth.within_group_positive_fraction},
        {"sigma", config.synth.sigma},
        {"seed", config.synth.seed},
        {"cluster_means", std::move(means)}}},
      {"noise",
       {{"mode",
         config.noise.mode == NoiseMode::kExactCount ? "exact" : "bernoulli"},
        {"rates", std::move(rates)}}},
      {"methods", std::move(methods)},
      {"seeds", config.seeds},
      {"learner",
       {{"l2_lambda", config.learner.l2_lambda},
        {"max_iterations", config.learner.max_iterations},
        {"tolerance", config.learner.tolerance},
        {"folds", config.folds},
        {"group_feature", GroupFeatureName(config.group_feature)}}},
      {"random",
       {{"match_decole_count", config.match_random_count},
        {"count", config.random_count}}},
  };
  return root.dump(2) + "\n";
}

std::string ConfigFingerprint(const ExperimentConfig& config) {
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(
                    Fnv1a64(ExperimentConfigJson(config))));
  return hex;
}

SeedOutcome RunSeed(const ExperimentConfig& config, std::uint64_t seed) {
  const std::string where = "seed " + std::to_string(seed);
  SeedOutcome outcome;
  outcome.seed = seed;

  const LabeledDataset noisy = WithContext(where + ", stage synth", [&] {
    SynthConfig synth = config.synth;
    synth.seed = DeriveSeed(seed, "population");
    return InjectNoise(GeneratePopulation(synth), config.noise,
                       DeriveSeed(seed, "noise"));
  });
  const ErrorMask mask = ComputeErrorMask(noisy);
  AppendLabelMetrics(ComputeLabelQuality(noisy), outcome.pre_pruning);

  auto prune_config = [&](PruneMethod method) {
    PruneConfig pc;
    pc.learner = config.learner;
    pc.folds = config.folds;
    pc.group_feature = config.group_feature;
    pc.seed = DeriveSeed(seed, std::string("prune.") + MethodName(method));
    return pc;
  };
  auto run_method = [&](PruneMethod method) -> PruneResult {
    const std::string context =
        where + ", method " + MethodName(method) + ", stage prune";
    return WithContext(context, [&] {
      switch (method) {
        case PruneMethod::kDecole:
          return DecolePrune(noisy, prune_config(method));
        case PruneMethod::kCl:
          return ClPrune(noisy, prune_config(method));
        case PruneMethod::kRandom:
          break;
      }
      std::size_t count = config.random_count;
      if (config.match_random_count) {
        const auto it = outcome.methods.find(PruneMethod::kDecole);
        count = it != outcome.methods.end()
                    ? it->second.result.pruned_ids.size()
                    : DecolePrune(noisy, prune_config(PruneMethod::kDecole))
                          .pruned_ids.size();
      }
      return RandomPrune(noisy, count, prune_config(method).seed);
    });
  };

  // DeCoLe first: random pruning may borrow its count.
  std::vector<PruneMethod> order = config.methods;
  std::stable_sort(order.begin(), order.end());
  for (const PruneMethod method : order) {
    MethodOutcome mo;
    mo.result = run_method(method);
    WithContext(where + ", method " + MethodName(method) + ", stage eval",
                [&] {
                  AppendPruneMetrics(ComputePruneQuality(noisy, mask, mo.result),
                                     mo.metrics);
                  AppendLabelMetrics(
                      ComputeLabelQuality(Retain(noisy, mo.result)),
                      mo.metrics);
                  return 0;
                });
    outcome.methods.emplace(method, std::move(mo));
  }
  return outcome;
}

ExperimentResult ComputeExperiment(const ExperimentConfig& config) {
  config.Validate();
  ExperimentResult result;
  result.fingerprint = ConfigFingerprint(config);
  for (const std::uint64_t seed : config.seeds) {
    result.seeds.push_back(RunSeed(config, seed));
  }
  if (config.seeds.size() >= 2) {
    std::vector<MetricBundle> pre;
    for (const auto& s : result.seeds) pre.push_back(s.pre_pruning);
    result.aggregates[kPrePruning] = Aggregate(pre);
    for (const PruneMethod method : config.methods) {
      std::vector<MetricBundle> runs;
      for (const auto& s : result.seeds) {
        runs.push_back(s.methods.at(method).metrics);
      }
      result.aggregates[MethodName(method)] =
          WithContext(std::string("method ") + MethodName(method) +
                          ", stage aggregate",
                      [&] { return Aggregate(runs); });
    }
  }
  return result;
}

std::string SeedReportJson(const ExperimentConfig& config,
                           const SeedOutcome& outcome, PruneMethod method) {
  const auto& mo = outcome.methods.at(method);
  json report = {
      {"config_fingerprint", ConfigFingerprint(config)},
      {"seed", outcome.seed},
      {"method", MethodName(method)},
      {"prune", json::parse(PruneReportJson(mo.result))},
      {"pre_pruning", MetricsToJson(outcome.pre_pruning)},
      {"metrics", MetricsToJson(mo.metrics)},
  };
  return report.dump(2) + "\n";
}

std::string AggregateJson(const ExperimentConfig& config,
                          const ExperimentResult& result) {
  json aggregates = json::object();
  for (const auto& [name, report] : result.aggregates) {
    aggregates[name] = AggregateToJson(report);
  }
  const json root = {
      {"config_fingerprint", result.fingerprint},
      {"run_count", result.seeds.size()},
      {"seeds", config.seeds},
      {"aggregates", std::move(aggregates)},
  };
  return root.dump(2) + "\n";
}

std::map<std::string, AggregateReport> ParseAggregate(std::string_view text) {
  const json root = ParseJsonOrThrow(text, "aggregate");
  std::map<std::string, AggregateReport> out;
  try {
    const auto run_count = root.at("run_count").get<std::size_t>();
    for (const auto& [name, metrics] : root.at("aggregates").items()) {
      AggregateReport& report = out[name];
      report.run_count = run_count;
      for (const auto& [metric, scopes] : metrics.items()) {
        for (const auto& [scope, s] : scopes.items()) {
          MetricSummary summary;
          auto opt = [](const json& v) {
            return v.is_null() ? std::nullopt
                               : std::optional<double>(v.get<double>());
          };
          summary.mean = opt(s.at("mean"));
          summary.sd = opt(s.at("sd"));
          summary.half_width = opt(s.at("half_width"));
          summary.runs = s.at("runs").get<std::size_t>();
          for (const auto& v : s.at("values")) summary.values.push_back(opt(v));
          report.metrics.emplace(MetricKey{metric, scope}, std::move(summary));
        }
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed aggregate: ") + e.what());
  }
  return out;
}

std::map<std::string, AggregateReport> AggregateFromSeedReports(
    const std::filesystem::path& dir) {
  const ExperimentConfig config =
      ParseExperimentConfig(ReadFile(dir / "config.json"));
  std::map<std::string, std::vector<MetricBundle>> runs;
  for (const std::uint64_t seed : config.seeds) {
    const auto seed_dir = dir / ("seed_" + std::to_string(seed));
    bool first = true;
    for (const PruneMethod method : config.methods) {
      const json report = ParseJsonOrThrow(
          ReadFile(seed_dir / (std::string(MethodName(method)) + ".json")),
          "seed report");
      runs[MethodName(method)].push_back(MetricsFromJson(report.at("metrics")));
      if (first) {
        runs[kPrePruning].push_back(MetricsFromJson(report.at("pre_pruning")));
        first = false;
      }
    }
  }
  std::map<std::string, AggregateReport> out;
  for (const auto& [name, bundles] : runs) out[name] = Aggregate(bundles);
  return out;
}

void WriteExperiment(const ExperimentConfig& config,
                     const ExperimentResult& result,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  auto write = [&](const std::filesystem::path& relative,
                   std::string_view contents) {
    const auto path = dir / relative;
    std::filesystem::create_directories(path.parent_path());
    WriteFileAtomically(path, contents);
    files.push_back(relative.generic_string());
  };
  WriteFileAtomically(dir / "manifest.json",
                      json({{"status", "incomplete"}}).dump(2) + "\n");

  write("config.json", ExperimentConfigJson(config));
  std::string per_seed = "seed,method,metric,scope,value\n";
  for (const auto& outcome : result.seeds) {
    const std::string seed = std::to_string(outcome.seed);
    for (const auto& [key, value] : outcome.pre_pruning) {
      per_seed += seed + "," + kPrePruning + "," + key.first + "," +
                  key.second + "," + CsvCell(value) + "\n";
    }
    for (const PruneMethod method : config.methods) {
      write(std::filesystem::path("seed_" + seed) /
                (std::string(MethodName(method)) + ".json"),
            SeedReportJson(config, outcome, method));
      for (const auto& [key, value] : outcome.methods.at(method).metrics) {
        per_seed += seed + "," + MethodName(method) + "," + key.first + "," +
                    key.second + "," + CsvCell(value) + "\n";
      }
    }
  }
  write("per_seed.csv", per_seed);

  if (!result.aggregates.empty()) {
    write("aggregate.json", AggregateJson(config, result));
    std::string table = "method,metric,scope,mean,sd,half_width,runs\n";
    for (const auto& [name, report] : result.aggregates) {
      for (const auto& [key, s] : report.metrics) {
        table += name + "," + key.first + "," + key.second + "," +
                 CsvCell(s.mean) + "," + CsvCell(s.sd) + "," +
                 CsvCell(s.half_width) + "," + std::to_string(s.runs) + "\n";
      }
    }
    write("aggregate.csv", table);
  }

  std::sort(files.begin(), files.end());
  WriteFileAtomically(
      dir / "manifest.json",
      json({{"status", "complete"},
                    {"config_fingerprint", result.fingerprint},
                    {"files", files}})
              .dump(2) +
          "\n");
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  if (config.output_dir.empty()) {
    throw ConfigError("experiment output directory not set");
  }
  std::filesystem::create_directories(config.output_dir);
  try {
    ExperimentResult result = ComputeExperiment(config);
    WriteExperiment(config, result, config.output_dir);
    return result;
  } catch (const std::exception& e) {
    WriteFileAtomically(
        config.output_dir / "manifest.json",
        json({{"status", "incomplete"}, {"error", e.what()}}).dump(2) +
            "\n");
    throw;
  }
}

}  // namespace decole
