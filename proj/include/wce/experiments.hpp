#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wce/core.hpp"

namespace wce {

// Data values an estimator is scored against.
struct DatasetSpec {
  enum class Kind { kConstant, kIntergroup, kIntragroup, kSpatial, kVector, kWorstLinf, kWorstL2 };
  Kind kind = Kind::kConstant;
  std::string label;
  int split = 0;              // intergroup: +1 below split, -1 from split on
  std::vector<double> values;  // spatial / vector datasets

  static DatasetSpec constant();
  static DatasetSpec intergroup(int split);
  static DatasetSpec intragroup();
  static DatasetSpec spatial(const std::vector<std::array<double, 2>>& points);
  static DatasetSpec vector(std::string label, std::vector<double> values);
  static DatasetSpec worst_linf();
  static DatasetSpec worst_l2();
};

// Squared-error metric: fixed data through fixed_data_error, worst cases
// through the sdp_inf / sdp2 subproblem solvers.
double evaluate_dataset(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                        const DatasetSpec& dataset, double eps, std::uint64_t seed);

struct ExperimentOptions {
  std::string name;  // importance | snowball | selective
  std::uint64_t seed = 0;
  std::optional<int> m;  // pairs per generated distribution (not used by selective)
  double eps = 0.01;
  int t_max = 1000;
  int replicates = 1;  // seeds seed, seed + 1, ...
  bool overlapping_windows = false;
  bool clip_windows = false;
  bool snowball_shared_start = false;
  bool snowball_recruit_unincluded = false;
};

struct ExperimentTable {
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // replicate mean, rows x columns
  std::vector<std::vector<std::vector<double>>> replicate_values;
  nlohmann::json provenance;

  double at(const std::string& row, const std::string& column) const;
};

ExperimentTable run_experiment(const ExperimentOptions& options);

// Header row then one line per data-value row, six decimals.
std::string table_to_csv(const ExperimentTable& table);

}  // namespace wce
