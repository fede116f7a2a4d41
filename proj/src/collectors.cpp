#include "wce/collectors.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <queue>
#include <string>

#include "wce/io.hpp"

namespace wce {

using nlohmann::json;

namespace {

std::vector<int> full_population(int n) {
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  return all;
}

std::vector<std::vector<int>> nearest_neighbors(const std::vector<std::array<double, 2>>& points,
                                                int count) {
  const int n = static_cast<int>(points.size());
  std::vector<std::vector<int>> out(points.size());
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = points[i][0] - points[j][0];
      const double dy = points[i][1] - points[j][1];
      order.emplace_back(dx * dx + dy * dy, j);
    }
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(count), order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end());
    for (std::size_t r = 0; r < keep; ++r) out[i].push_back(order[r].second);
  }
  return out;
}

}  // namespace

ImportanceSetting gen_importance(const ImportanceOptions& options) {
  if (options.n < 1 || options.m < 1) fail(ErrorCode::kInvalidArgument, "n and m must be positive");
  if (options.split < 0 || options.split > options.n) {
    fail(ErrorCode::kInvalidArgument, "group split must lie in [0, n]");
  }
  for (double p : options.probs) {
    if (!(p > 0.0 && p <= 1.0)) fail(ErrorCode::kInvalidArgument, "probabilities must lie in (0, 1]");
  }
  GroupStructure groups;
  groups.inclusion_prob.resize(static_cast<std::size_t>(options.n));
  std::vector<int> first, second;
  for (int j = 0; j < options.n; ++j) {
    const bool in_first = j < options.split;
    (in_first ? first : second).push_back(j);
    groups.inclusion_prob[j] = options.probs[in_first ? 0 : 1];
  }
  if (!first.empty()) groups.groups.push_back(std::move(first));
  if (!second.empty()) groups.groups.push_back(std::move(second));

  Rng rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<int> target = full_population(options.n);
  std::vector<SamplePair> pairs;
  pairs.reserve(static_cast<std::size_t>(options.m));
  for (int i = 0; i < options.m; ++i) {
    SamplePair pair;
    for (int j = 0; j < options.n; ++j) {
      if (unit(rng) < groups.inclusion_prob[j]) pair.sample.push_back(j);
    }
    pair.target = target;
    pairs.push_back(std::move(pair));
  }
  return {SampleTargetDistribution(options.n, std::move(pairs)), std::move(groups)};
}

SnowballSetting gen_snowball(const SnowballOptions& options) {
  if (options.n < 1 || options.m < 1) fail(ErrorCode::kInvalidArgument, "n and m must be positive");
  if (options.k < 1 || options.k > options.n) {
    fail(ErrorCode::kInvalidArgument, "sample size k must lie in [1, n]");
  }
  if (options.num_neighbors < 1 || options.recruit < 1) {
    fail(ErrorCode::kInvalidArgument, "neighbour and recruit counts must be positive");
  }
  Rng rng(options.seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  std::vector<std::array<double, 2>> points(static_cast<std::size_t>(options.n));
  for (auto& p : points) {
    p[0] = unit(rng);
    p[1] = unit(rng);
  }
  const auto neighbors = nearest_neighbors(points, options.num_neighbors);
  const std::vector<int> target = full_population(options.n);
  std::optional<int> shared;
  if (options.shared_start) {
    shared = std::uniform_int_distribution<int>(0, options.n - 1)(rng);
  }

  std::vector<SamplePair> pairs;
  pairs.reserve(static_cast<std::size_t>(options.m));
  std::vector<char> included(points.size());
  std::vector<int> candidates;
  for (int i = 0; i < options.m; ++i) {
    std::fill(included.begin(), included.end(), 0);
    SamplePair pair;
    std::queue<int> frontier;
    auto add = [&](int v) {
      included[v] = 1;
      pair.sample.push_back(v);
      frontier.push(v);
    };
    if (shared) add(*shared);
    while (static_cast<int>(pair.sample.size()) < options.k) {
      if (frontier.empty()) {
        // Fresh start, uniform over the points not yet included.
        candidates.clear();
        for (int v = 0; v < options.n; ++v) {
          if (!included[v]) candidates.push_back(v);
        }
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        add(candidates[pick(rng)]);
        continue;
      }
      const int v = frontier.front();
      frontier.pop();
      candidates = neighbors[v];
      if (options.recruit_unincluded) {
        std::erase_if(candidates, [&](int u) { return included[u] != 0; });
      }
      const auto draws = std::min<std::size_t>(static_cast<std::size_t>(options.recruit),
                                               candidates.size());
      for (std::size_t r = 0; r < draws; ++r) {
        std::uniform_int_distribution<std::size_t> pick(r, candidates.size() - 1);
        std::swap(candidates[r], candidates[pick(rng)]);
        const int u = candidates[r];
        if (!included[u] && static_cast<int>(pair.sample.size()) < options.k) add(u);
      }
    }
    std::sort(pair.sample.begin(), pair.sample.end());
    pair.target = target;
    pairs.push_back(std::move(pair));
  }
  return {SampleTargetDistribution(options.n, std::move(pairs)), std::move(points)};
}

SelectiveSetting gen_selective(const SelectiveOptions& options) {
  if (options.n < 2) fail(ErrorCode::kInvalidArgument, "selective prediction needs n >= 2");
  if (options.windows.empty()) fail(ErrorCode::kInvalidArgument, "no window lengths given");
  std::vector<SamplePair> pairs;
  std::vector<int> windows;
  for (int w : options.windows) {
    if (w < 1 || w >= options.n) {
      fail(ErrorCode::kInvalidArgument, "window length " + std::to_string(w) + " does not fit in n");
    }
    const int last_t = options.clip_windows ? options.n - 1 : options.n - w;
    for (int t = 1; t <= last_t; ++t) {
      SamplePair pair;
      pair.sample.resize(static_cast<std::size_t>(t));
      std::iota(pair.sample.begin(), pair.sample.end(), 0);
      const int first = options.overlapping ? t - 1 : t;
      for (int j = first; j < std::min(t + w, options.n); ++j) pair.target.push_back(j);
      pairs.push_back(std::move(pair));
      windows.push_back(w);
    }
  }
  return {SampleTargetDistribution(options.n, std::move(pairs)), std::move(windows)};
}

SampleTargetDistribution load_distribution(const std::filesystem::path& path) {
  return io::distribution_from_json(io::read_json(path));
}

json importance_metadata(const ImportanceOptions& options, const GroupStructure& groups) {
  return {{"generator", "importance"},
          {"args",
           {{"n", options.n},
            {"split", options.split},
            {"probs", options.probs},
            {"m", options.m}}},
          {"seed", options.seed},
          {"groups", groups.groups},
          {"inclusion_prob", groups.inclusion_prob}};
}

json snowball_metadata(const SnowballOptions& options,
                       const std::vector<std::array<double, 2>>& points) {
  return {{"generator", "snowball"},
          {"args",
           {{"n", options.n},
            {"k", options.k},
            {"num_neighbors", options.num_neighbors},
            {"recruit", options.recruit},
            {"m", options.m},
            {"shared_start", options.shared_start},
            {"recruit_unincluded", options.recruit_unincluded}}},
          {"seed", options.seed},
          {"points", points}};
}

json selective_metadata(const SelectiveOptions& options, const std::vector<int>& windows) {
  return {{"generator", "selective"},
          {"args",
           {{"n", options.n}, {"windows", options.windows}, {"overlapping", options.overlapping},
            {"clip_windows", options.clip_windows}}},
          {"seed", nullptr},
          {"pair_windows", windows}};
}

GroupStructure groups_from_metadata(const json& meta) {
  if (!meta.contains("groups") || !meta.contains("inclusion_prob")) {
    fail(ErrorCode::kMalformedInput, "metadata carries no group structure");
  }
  try {
    return {meta["groups"].get<std::vector<std::vector<int>>>(),
            meta["inclusion_prob"].get<std::vector<double>>()};
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedInput, std::string("bad group structure: ") + e.what());
  }
}

std::vector<std::array<double, 2>> points_from_metadata(const json& meta) {
  if (!meta.contains("points")) fail(ErrorCode::kMalformedInput, "metadata carries no points");
  try {
    return meta["points"].get<std::vector<std::array<double, 2>>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedInput, std::string("bad points: ") + e.what());
  }
}

std::vector<int> windows_from_metadata(const json& meta) {
  if (!meta.contains("pair_windows")) {
    fail(ErrorCode::kMalformedInput, "metadata carries no window lengths");
  }
  try {
    return meta["pair_windows"].get<std::vector<int>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformedInput, std::string("bad window lengths: ") + e.what());
  }
}

}  // namespace wce
