#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "wce/baselines.hpp"
#include "wce/core.hpp"

namespace wce {

struct ImportanceOptions {
  int n = 50;
  int split = 25;                      // indices [0, split) form the first group
  std::array<double, 2> probs{0.1, 0.5};
  int m = 2000;
  std::uint64_t seed = 0;
};

struct ImportanceSetting {
  SampleTargetDistribution distribution;
  GroupStructure groups;
};

// Independent Bernoulli inclusions, full-population target.
ImportanceSetting gen_importance(const ImportanceOptions& options);

struct SnowballOptions {
  int n = 50;
  int k = 25;
  int num_neighbors = 5;
  int recruit = 2;
  int m = 2000;
  std::uint64_t seed = 0;
  // One start vertex drawn per distribution and shared by every pair,
  // instead of a fresh start per pair.
  bool shared_start = false;
  // Recruit among neighbours not yet in the sample rather than drawing from
  // all neighbours and skipping members.
  bool recruit_unincluded = false;
};

struct SnowballSetting {
  SampleTargetDistribution distribution;
  std::vector<std::array<double, 2>> points;
};

// Points uniform in the unit square centred at the origin, so coordinate
// sums lie in [-1, 1]; each sample grows breadth-first from a
// random start, each dequeued point recruiting `recruit` distinct members of
// its nearest neighbours. Target is the full population.
SnowballSetting gen_snowball(const SnowballOptions& options);

struct SelectiveOptions {
  int n = 32;
  std::vector<int> windows{1, 2, 4, 8, 16};
  // false: B = {t, ..., t+w-1}, disjoint from A = {0, ..., t-1}.
  // true:  B = {t-1, ..., t+w-1}, sharing the last sampled step.
  bool overlapping = false;
  // false: pairs with t + w > n are left out. true: their window is cut at n.
  bool clip_windows = false;
};

struct SelectiveSetting {
  SampleTargetDistribution distribution;
  std::vector<int> windows;  // w for each pair
};

// Enumerates every (t, w) with 1 <= t < n; windows running past n are
// dropped or clipped according to clip_windows.
SelectiveSetting gen_selective(const SelectiveOptions& options);

SampleTargetDistribution load_distribution(const std::filesystem::path& path);

// Sidecar metadata written next to generated distributions.
nlohmann::json importance_metadata(const ImportanceOptions& options, const GroupStructure& groups);
nlohmann::json snowball_metadata(const SnowballOptions& options,
                                 const std::vector<std::array<double, 2>>& points);
nlohmann::json selective_metadata(const SelectiveOptions& options, const std::vector<int>& windows);

GroupStructure groups_from_metadata(const nlohmann::json& meta);
std::vector<std::array<double, 2>> points_from_metadata(const nlohmann::json& meta);
std::vector<int> windows_from_metadata(const nlohmann::json& meta);

}  // namespace wce
