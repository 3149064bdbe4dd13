#pragma once

// The computational experiment: instance grid, metrics, CSV results and
// their validation.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rsched/dynamics.h"
#include "rsched/gen.h"
#include "rsched/oracle.h"
#include "rsched/policies.h"

namespace rsched {

struct SizeSpec {
  int n = 0;
  int m = 0;
  friend bool operator==(const SizeSpec&, const SizeSpec&) = default;
};

// "8x12,10x15" -> {(8,12), (10,15)}.
std::vector<SizeSpec> parse_sizes(const std::string& text);
std::string format_sizes(const std::vector<SizeSpec>& sizes);

inline const std::vector<SizeSpec> kFullSizes = {{8, 12},  {10, 15}, {14, 21}, {16, 24}, {18, 27},
                                                  {19, 29}, {20, 30}, {40, 60}, {80, 120}};
inline const std::vector<SizeSpec> kDeskSizes = {{8, 12},  {10, 15}, {14, 21}, {16, 24},
                                                 {18, 27}, {19, 29}, {20, 30}};

enum class InstanceGenerator { kUniform, kPointMass };

struct ExperimentConfig {
  std::vector<SizeSpec> sizes = kDeskSizes;
  int instances = 30;
  long rollouts = 1000;
  long stability_samples = 1000;
  std::uint64_t seed = 1;
  std::vector<FamilyTag> families{std::begin(kAllFamilies), std::end(kAllFamilies)};
  std::vector<ModelKind> models{ModelKind::kDSRSE, ModelKind::kCDSRSE};
  std::vector<PolicyKind> policies{PolicyKind::kRatio, PolicyKind::kWeight};
  InstanceGenerator generator = InstanceGenerator::kUniform;
  bool solve_lps = true;
  bool box = false;
  bool static_ratio = false;
  bool allow_slow = false;  // DLP-P for sizes with n >= kSlowN
  OracleLimits dp_limits;   // dp_value rows for instances within these limits
  int threads = 0;          // 0: hardware concurrency

  void validate() const;
};

inline constexpr int kSlowN = 40;

struct ResultRow {
  int size_n = 0;
  int size_m = 0;
  FamilyTag family = FamilyTag::kDenseBase;
  ModelKind model = ModelKind::kDSRSE;
  int instance = 0;  // -1 for aggregate rows
  std::string metric;
  std::optional<double> value;
  std::optional<double> normalized;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

// Metric names as written to the CSV.
std::string policy_metric(PolicyKind kind);

// Per-cell rows followed by aggregates, sorted. Solver failures leave the
// value empty and are reported on `log` when given.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

// Mean over instances of value and normalized value per (size, family,
// model, metric); std_error is the standard error of the normalized values.
std::vector<ResultRow> aggregate_rows(const std::vector<ResultRow>& instance_rows,
                                      std::uint64_t seed);

void sort_rows(std::vector<ResultRow>& rows);

inline constexpr const char* kCsvHeader =
    "size_n,size_m,family,model,instance,metric,value,normalized,stderr,seed";

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out);
std::vector<ResultRow> read_results_csv(std::istream& in);

// Consistency checks of a results table: normalization against the
// instance's expected_stab row and aggregate rows against their instances.
std::vector<std::string> validate_results(const std::vector<ResultRow>& rows);

// Seed of the base instance of one grid cell.
std::uint64_t cell_seed(std::uint64_t master, SizeSpec size, int instance);

}  // namespace rsched
