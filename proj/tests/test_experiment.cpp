#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "rsched/experiment.h"

using namespace rsched;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig config;
  config.sizes = {{6, 10}, {8, 12}};
  config.instances = 2;
  config.rollouts = 40;
  config.stability_samples = 40;
  config.seed = 123;
  config.threads = 2;
  return config;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_results_csv(rows, out);
  return out.str();
}

}  // namespace

TEST(Sizes, ParseAndFormat) {
  const auto sizes = parse_sizes("8x12,20x30");
  ASSERT_EQ(sizes.size(), 2u);
  EXPECT_EQ(sizes[1], (SizeSpec{20, 30}));
  EXPECT_EQ(format_sizes(sizes), "8x12,20x30");
  EXPECT_THROW(parse_sizes("8by12"), std::invalid_argument);
  EXPECT_THROW(parse_sizes("8x1"), std::invalid_argument);
  EXPECT_THROW(parse_sizes("8x12x"), std::invalid_argument);
  EXPECT_THROW(parse_sizes(""), std::invalid_argument);
}

TEST(Config, Validation) {
  ExperimentConfig config = small_config();
  EXPECT_NO_THROW(config.validate());
  config.instances = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = small_config();
  config.sizes = {{1, 4}};
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config.families = {FamilyTag::kDenseBase};
  EXPECT_NO_THROW(config.validate());
}

TEST(Seeds, CellSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (const SizeSpec& s : kFullSizes) {
    for (int k = 0; k < 30; ++k) EXPECT_TRUE(seen.insert(cell_seed(1, s, k)).second);
  }
  EXPECT_NE(cell_seed(1, {8, 12}, 0), cell_seed(2, {8, 12}, 0));
}

TEST(Experiment, EmitsEveryMetricAndValidates) {
  const auto rows = run_experiment(small_config());
  std::set<std::pair<std::string, std::string>> metrics;
  for (const ResultRow& r : rows) metrics.insert({to_string(r.model), r.metric});
  for (const char* m : {"expected_stab", "alpha_pes", "dlp_p", "lp_dpes", "dual_bound_dsrse", "policy_ratio",
                        "policy_weight", "dp_value"}) {
    EXPECT_TRUE(metrics.count({"dsrse", m})) << m;
  }
  for (const char* m : {"expected_stab", "alpha_pes", "cdlp_p", "pstar_bound", "policy_ratio", "policy_weight",
                        "dp_value"}) {
    EXPECT_TRUE(metrics.count({"cdsrse", m})) << m;
  }
  EXPECT_TRUE(validate_results(rows).empty());
  for (const ResultRow& r : rows) {
    if (r.metric == "dp_value" && r.size_n > 6) {
      // Sparse families keep half the tasks.
      EXPECT_TRUE(r.family == FamilyTag::kSparseBase || r.family == FamilyTag::kSparseLong);
    }
    if (r.instance >= 0 && r.metric == "expected_stab") {
      ASSERT_TRUE(r.normalized);
      EXPECT_DOUBLE_EQ(*r.normalized, 1.0);
    }
  }
}

TEST(Experiment, ThreadCountDoesNotChangeOutput) {
  ExperimentConfig config = small_config();
  config.threads = 1;
  const std::string one = to_csv(run_experiment(config));
  config.threads = 5;
  EXPECT_EQ(to_csv(run_experiment(config)), one);
  config.seed = 124;
  EXPECT_NE(to_csv(run_experiment(config)), one);
}

TEST(Experiment, PointMassInstancesNormalizeToOne) {
  ExperimentConfig config = small_config();
  config.generator = InstanceGenerator::kPointMass;
  config.policies = {};
  config.dp_limits = {0, 0};
  config.policies.push_back(PolicyKind::kWeight);
  const auto rows = run_experiment(config);
  int checked = 0;
  for (const ResultRow& r : rows) {
    if (r.metric == "alpha_pes" || r.metric == "dlp_p" || r.metric == "cdlp_p" || r.metric == "lp_dpes" ||
        r.metric == "dual_bound_dsrse" || r.metric == "pstar_bound") {
      ASSERT_TRUE(r.normalized) << r.metric;
      EXPECT_NEAR(*r.normalized, 1.0, 1e-6) << r.metric;
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Experiment, SlowSizesSkipDlpWithoutFlag) {
  ExperimentConfig config;
  config.sizes = {{40, 60}};
  config.instances = 1;
  config.rollouts = 5;
  config.stability_samples = 5;
  config.families = {FamilyTag::kSparseBase};
  config.models = {ModelKind::kDSRSE};
  config.policies = {PolicyKind::kRatio};
  std::ostringstream log;
  const auto rows = run_experiment(config, &log);
  bool saw_dpes = false;
  for (const ResultRow& r : rows) {
    EXPECT_NE(r.metric, "dlp_p");
    saw_dpes = saw_dpes || r.metric == "lp_dpes";
  }
  EXPECT_TRUE(saw_dpes);
  EXPECT_NE(log.str().find("allow-slow"), std::string::npos);
}

TEST(Csv, RoundTripIsByteIdentical) {
  const auto rows = run_experiment(small_config());
  const std::string text = to_csv(rows);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  std::istringstream in(text);
  const auto back = read_results_csv(in);
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_EQ(to_csv(back), text);
  EXPECT_TRUE(validate_results(back).empty());
}

TEST(Csv, MissingValuesStayEmpty) {
  ResultRow r;
  r.size_n = 8;
  r.size_m = 12;
  r.metric = "dlp_p";
  r.instance = 0;
  const std::string text = to_csv({r});
  EXPECT_NE(text.find("dlp_p,,,"), std::string::npos);
  std::istringstream in(text);
  const auto back = read_results_csv(in);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_FALSE(back[0].value.has_value());
  EXPECT_FALSE(back[0].normalized.has_value());
}

TEST(Csv, RejectsBadHeaderAndFields) {
  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(read_results_csv(bad_header), ParseError);
  std::istringstream bad_row(std::string(kCsvHeader) + "\n8,12,dense-base,dsrse,0,alpha_pes,abc,,0,1\n");
  EXPECT_THROW(read_results_csv(bad_row), ParseError);
}

TEST(Validation, DetectsTampering) {
  auto rows = run_experiment(small_config());
  ASSERT_TRUE(validate_results(rows).empty());

  auto changed = rows;
  for (ResultRow& r : changed) {
    if (r.instance == 0 && r.metric == "alpha_pes") {
      *r.value += 0.25;
      break;
    }
  }
  EXPECT_FALSE(validate_results(changed).empty());

  auto aggregate = rows;
  for (ResultRow& r : aggregate) {
    if (r.instance == -1 && r.metric == "policy_weight") {
      *r.normalized += 0.01;
      break;
    }
  }
  EXPECT_FALSE(validate_results(aggregate).empty());

  auto dropped = rows;
  for (auto it = dropped.begin(); it != dropped.end(); ++it) {
    if (it->instance == -1) {
      dropped.erase(it);
      break;
    }
  }
  EXPECT_FALSE(validate_results(dropped).empty());
}

TEST(Aggregate, MeansOverInstances) {
  std::vector<ResultRow> rows;
  for (int k = 0; k < 3; ++k) {
    ResultRow stab;
    stab.size_n = 4;
    stab.size_m = 6;
    stab.instance = k;
    stab.metric = "expected_stab";
    stab.value = 2.0;
    stab.normalized = 1.0;
    rows.push_back(stab);
    ResultRow a = stab;
    a.metric = "alpha_pes";
    a.value = 1.0 + k;
    a.normalized = (1.0 + k) / 2.0;
    rows.push_back(a);
  }
  const auto agg = aggregate_rows(rows, 5);
  bool found = false;
  for (const ResultRow& r : agg) {
    if (r.metric != "alpha_pes") continue;
    found = true;
    EXPECT_EQ(r.instance, -1);
    EXPECT_DOUBLE_EQ(*r.value, 2.0);
    EXPECT_DOUBLE_EQ(*r.normalized, 1.0);
    EXPECT_NEAR(r.std_error, std::sqrt(0.25 / 3.0), 1e-12);
  }
  EXPECT_TRUE(found);
}
