#include "decole/eval.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "decole/errors.h"
#include "decole/prune.h"
#include "decole/synth.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace decole {
namespace {

using ::decole::testing::MakeDataset;
using ::decole::testing::RandomTinyDataset;

PruneResult PruneRows(const LabeledDataset& d,
                      const std::vector<std::size_t>& rows) {
  PruneResult r;
  r.method = PruneMethod::kRandom;
  r.pruned_rows = rows;
  for (const std::size_t i : rows) r.pruned_ids.push_back(d.ids[i]);
  return r;
}

std::vector<std::size_t> ErrorRows(const LabeledDataset& d) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.observed[i] != (*d.gold)[i]) rows.push_back(i);
  }
  return rows;
}

TEST(ComputePruneQuality, OraclePruner) {
  std::mt19937_64 gen(1);
  const LabeledDataset d = RandomTinyDataset(gen, 40, 2);
  const PruneQuality q =
      ComputePruneQuality(d, ComputeErrorMask(d), PruneRows(d, ErrorRows(d)));
  auto check = [](const PruneTally& t) {
    if (t.errors > 0) EXPECT_EQ(*t.recall(), 1.0);
    if (t.pruned > 0) EXPECT_EQ(*t.precision(), 1.0);
  };
  check(q.overall);
  for (int g = 0; g < 2; ++g) {
    check(q.per_group[g]);
    check(q.false_negative[g]);
    check(q.false_positive[g]);
  }
}

TEST(ComputePruneQuality, NullPruner) {
  std::mt19937_64 gen(2);
  const LabeledDataset d = RandomTinyDataset(gen, 40, 2);
  const PruneQuality q =
      ComputePruneQuality(d, ComputeErrorMask(d), PruneRows(d, {}));
  ASSERT_GT(q.overall.errors, 0u);
  EXPECT_EQ(*q.overall.recall(), 0.0);
  EXPECT_FALSE(q.overall.precision().has_value());
  for (int g = 0; g < 2; ++g) {
    if (q.per_group[g].errors > 0) EXPECT_EQ(*q.per_group[g].recall(), 0.0);
    EXPECT_FALSE(q.per_group[g].precision().has_value());
  }
}

TEST(ComputePruneQuality, HandCountedExample) {
  // Rows 0..3 are errors; the pruner removes rows 1, 2, 3, 7 and 8.
  const std::vector<Label> gold = {1, 1, 0, 0, 1, 1, 0, 0, 1, 0};
  std::vector<Label> observed = gold;
  for (int i = 0; i < 4; ++i) observed[i] = 1 - gold[i];
  std::vector<std::vector<double>> rows(10, std::vector<double>{0.0});
  const LabeledDataset d =
      MakeDataset(rows, std::vector<int>(10, 0), observed, gold);
  const PruneQuality q = ComputePruneQuality(d, ComputeErrorMask(d),
                                             PruneRows(d, {1, 2, 3, 7, 8}));
  EXPECT_EQ(q.overall, (PruneTally{.hits = 3, .pruned = 5, .errors = 4}));
  EXPECT_DOUBLE_EQ(*q.overall.recall(), 0.75);
  EXPECT_DOUBLE_EQ(*q.overall.precision(), 0.6);
}

TEST(ComputePruneQuality, Errors) {
  std::mt19937_64 gen(3);
  const LabeledDataset d = RandomTinyDataset(gen, 10, 2);
  const ErrorMask mask = ComputeErrorMask(d);
  PruneResult bad;
  bad.pruned_ids = {"nope"};
  EXPECT_THROW(ComputePruneQuality(d, mask, bad), DataError);
  ErrorMask shorter = mask;
  shorter.is_error.pop_back();
  shorter.error_type.pop_back();
  EXPECT_THROW(ComputePruneQuality(d, shorter, PruneRows(d, {})), DataError);
}

// Exhaustive recount straight from the definitions.
TEST(ComputePruneQuality, MatchesBruteForceRecount) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(gen() % 3);
    const LabeledDataset d = RandomTinyDataset(gen, 1 + gen() % 30, k);
    std::vector<std::size_t> pruned;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (gen() % 3 == 0) pruned.push_back(i);
    }
    const PruneQuality q =
        ComputePruneQuality(d, ComputeErrorMask(d), PruneRows(d, pruned));
    auto is_pruned = [&](std::size_t i) {
      return std::find(pruned.begin(), pruned.end(), i) != pruned.end();
    };
    auto recount = [&](auto in_scope) {
      PruneTally t;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (!in_scope(i)) continue;
        const bool err = d.observed[i] != (*d.gold)[i];
        t.errors += err;
        t.pruned += is_pruned(i);
        t.hits += err && is_pruned(i);
      }
      return t;
    };
    ASSERT_EQ(q.overall, recount([](std::size_t) { return true; }));
    PruneTally sum;
    for (int g = 0; g < d.num_groups; ++g) {
      ASSERT_EQ(q.per_group[g],
                recount([&](std::size_t i) { return d.groups[i] == g; }));
      ASSERT_EQ(q.false_negative[g], recount([&](std::size_t i) {
                  return d.groups[i] == g && d.observed[i] == 0;
                }));
      ASSERT_EQ(q.false_positive[g], recount([&](std::size_t i) {
                  return d.groups[i] == g && d.observed[i] == 1;
                }));
      sum += q.per_group[g];
    }
    ASSERT_EQ(sum, q.overall);
  }
}

TEST(ComputeLabelQuality, MatchesBruteForceRecount) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(gen() % 3);
    const LabeledDataset d = RandomTinyDataset(gen, 1 + gen() % 30, k);
    const LabelQuality q = ComputeLabelQuality(d);
    RateTally fpr, fnr;
    for (int g = 0; g < d.num_groups; ++g) {
      RateTally gfpr, gfnr;
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.groups[i] != g) continue;
        const Label y = (*d.gold)[i];
        if (y == 0) {
          ++gfpr.total;
          gfpr.wrong += d.observed[i] == 1;
        } else {
          ++gfnr.total;
          gfnr.wrong += d.observed[i] == 0;
        }
      }
      ASSERT_EQ(q.group_fpr[g], gfpr);
      ASSERT_EQ(q.group_fnr[g], gfnr);
      fpr.wrong += gfpr.wrong;
      fpr.total += gfpr.total;
      fnr.wrong += gfnr.wrong;
      fnr.total += gfnr.total;
    }
    ASSERT_EQ(q.fpr, fpr);
    ASSERT_EQ(q.fnr, fnr);
  }
}

TEST(ComputeLabelQuality, CleanAndPerfectlyPruned) {
  std::mt19937_64 gen(6);
  LabeledDataset d = RandomTinyDataset(gen, 30, 2);
  const LabeledDataset pruned = Retain(d, PruneRows(d, ErrorRows(d)));
  for (const LabeledDataset* data : {&pruned}) {
    const LabelQuality q = ComputeLabelQuality(*data);
    EXPECT_EQ(q.fpr.wrong, 0u);
    EXPECT_EQ(q.fnr.wrong, 0u);
  }
  d.observed = *d.gold;
  const LabelQuality clean = ComputeLabelQuality(d);
  EXPECT_EQ(*clean.fpr.rate(), 0.0);
  EXPECT_EQ(*clean.fnr.rate(), 0.0);
}

TEST(ComputeLabelQuality, UnprunedDefaultEqualsConfiguredRates) {
  const LabeledDataset clean = GeneratePopulation(SynthConfig{});
  const NoiseSpec spec = NoiseSpec::Default();
  const LabeledDataset d = InjectNoise(clean, spec, 123);
  const LabelQuality q = ComputeLabelQuality(d);
  const auto sizes = CellSizes(SynthConfig{});
  for (int g = 0; g < 2; ++g) {
    const std::int64_t m0 = sizes.at({g, 0});
    const std::int64_t m1 = sizes.at({g, 1});
    EXPECT_EQ(*q.group_fpr[g].rate(),
              static_cast<double>(FlipCount(spec.Rate(g, 0), m0)) / m0);
    EXPECT_EQ(*q.group_fnr[g].rate(),
              static_cast<double>(FlipCount(spec.Rate(g, 1), m1)) / m1);
  }
}

TEST(ComputeLabelQuality, RequiresGold) {
  LabeledDataset d = MakeDataset({{0.0}}, {0}, {1});
  try {
    ComputeLabelQuality(d);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.column(), "gold");
  }
}

TEST(AppendMetrics, ScopeNames) {
  std::mt19937_64 gen(7);
  const LabeledDataset d = RandomTinyDataset(gen, 20, 2);
  MetricBundle bundle;
  AppendPruneMetrics(
      ComputePruneQuality(d, ComputeErrorMask(d), PruneRows(d, {0, 1})),
      bundle);
  AppendLabelMetrics(ComputeLabelQuality(d), bundle);
  for (const char* scope : {"overall", "g0", "g1", "g0.fn", "g1.fp"}) {
    EXPECT_TRUE(bundle.count({"recall", scope})) << scope;
    EXPECT_TRUE(bundle.count({"precision", scope})) << scope;
  }
  for (const char* scope : {"overall", "g0", "g1"}) {
    EXPECT_TRUE(bundle.count({"fpr", scope})) << scope;
    EXPECT_TRUE(bundle.count({"fnr", scope})) << scope;
  }
  EXPECT_EQ(bundle.size(), 2u * 7 + 2u * 3);
}

MetricBundle One(double v) { return {{{"recall", "overall"}, v}}; }

TEST(Aggregate, TwoRuns) {
  const std::vector<MetricBundle> runs = {One(0.6), One(0.8)};
  const MetricSummary s = Aggregate(runs).metrics.at({"recall", "overall"});
  const double sd = std::sqrt(0.02);  // sample variance of {0.6, 0.8}
  EXPECT_NEAR(*s.mean, 0.7, 1e-15);
  EXPECT_NEAR(*s.sd, sd, 1e-15);
  EXPECT_NEAR(*s.half_width, 12.706204736174698 * sd / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(*s.half_width, 1.2706, 1e-4);
  EXPECT_EQ(s.runs, 2u);
}

TEST(Aggregate, FiveRuns) {
  std::vector<MetricBundle> runs;
  for (const double v : {0.5, 0.6, 0.7, 0.8, 0.9}) runs.push_back(One(v));
  const AggregateReport report = Aggregate(runs);
  const MetricSummary& s = report.metrics.at({"recall", "overall"});
  const double sd = std::sqrt(0.025);
  EXPECT_EQ(report.run_count, 5u);
  EXPECT_NEAR(*s.mean, 0.7, 1e-15);
  EXPECT_NEAR(*s.sd, sd, 1e-15);
  EXPECT_NEAR(*s.half_width, 2.7764451051977987 * sd / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(*s.half_width, 0.1963, 1e-4);
}

TEST(Aggregate, IdenticalValuesHaveZeroSpread) {
  const std::vector<MetricBundle> runs = {One(0.3), One(0.3), One(0.3)};
  const MetricSummary s = Aggregate(runs).metrics.at({"recall", "overall"});
  EXPECT_EQ(*s.mean, 0.3);
  EXPECT_EQ(*s.sd, 0.0);
  EXPECT_EQ(*s.half_width, 0.0);
}

TEST(Aggregate, AbsentValues) {
  std::vector<MetricBundle> runs = {One(0.2), One(0.4), One(0.6)};
  runs[1][{"recall", "overall"}] = std::nullopt;
  const MetricSummary s = Aggregate(runs).metrics.at({"recall", "overall"});
  EXPECT_EQ(s.runs, 2u);
  EXPECT_EQ(s.values.size(), 3u);
  EXPECT_FALSE(s.values[1].has_value());
  EXPECT_NEAR(*s.mean, 0.4, 1e-15);

  std::vector<MetricBundle> sparse = {One(0.2), One(0.4)};
  sparse[0][{"recall", "overall"}] = std::nullopt;
  const MetricSummary lone = Aggregate(sparse).metrics.at({"recall", "overall"});
  EXPECT_EQ(*lone.mean, 0.4);
  EXPECT_FALSE(lone.sd.has_value());
  EXPECT_FALSE(lone.half_width.has_value());
}

TEST(Aggregate, PermutationInvariant) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<MetricBundle> runs;
    for (int r = 0; r < 7; ++r) {
      runs.push_back({{{"recall", "overall"}, value(gen)},
                      {{"precision", "g0"}, value(gen)}});
    }
    const AggregateReport a = Aggregate(runs);
    std::shuffle(runs.begin(), runs.end(), gen);
    const AggregateReport b = Aggregate(runs);
    for (const auto& [key, s] : a.metrics) {
      const MetricSummary& t = b.metrics.at(key);
      EXPECT_EQ(s.mean, t.mean);
      EXPECT_EQ(s.sd, t.sd);
      EXPECT_EQ(s.half_width, t.half_width);
    }
  }
}

TEST(Aggregate, Errors) {
  EXPECT_THROW(Aggregate(std::vector<MetricBundle>{One(0.1)}), DataError);
  std::vector<MetricBundle> mixed = {One(0.1), One(0.2)};
  mixed[1][{"precision", "overall"}] = 0.5;
  EXPECT_THROW(Aggregate(mixed), DataError);
}

TEST(StudentT975, TableValues) {
  EXPECT_NEAR(StudentT975(1), 12.706, 1e-3);
  EXPECT_NEAR(StudentT975(4), 2.776, 1e-3);
  EXPECT_NEAR(StudentT975(30), 2.042, 1e-3);
  EXPECT_THROW(StudentT975(0), DataError);
}

}  // namespace
}  // namespace decole
