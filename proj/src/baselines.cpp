#include "wce/baselines.hpp"

#include <string>

namespace wce {

void GroupStructure::validate(int n) const {
  if (inclusion_prob.size() != static_cast<std::size_t>(n)) {
    fail(ErrorCode::kDimensionMismatch, "inclusion probabilities must have one entry per index");
  }
  for (double p : inclusion_prob) {
    if (!(p > 0.0 && p <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "inclusion probabilities must lie in (0, 1]");
    }
  }
  std::vector<int> owner(static_cast<std::size_t>(n), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int j : groups[g]) {
      if (j < 0 || j >= n) fail(ErrorCode::kIndexOutOfRange, "group index out of range");
      if (owner[j] != -1) fail(ErrorCode::kInvalidArgument, "groups overlap at index " + std::to_string(j));
      owner[j] = static_cast<int>(g);
    }
  }
  for (int o : owner) {
    if (o == -1) fail(ErrorCode::kInvalidArgument, "groups do not cover the population");
  }
}

namespace {

void require_full_targets(const SampleTargetDistribution& dist, const char* name) {
  for (std::size_t i = 0; i < dist.m(); ++i) {
    if (dist.pair(i).target.size() != static_cast<std::size_t>(dist.n())) {
      fail(ErrorCode::kInvalidArgument, std::string(name) +
                                            " requires full-population targets; pair " +
                                            std::to_string(i) + " differs");
    }
  }
}

}  // namespace

SemilinearEstimator reweighting_estimator(const SampleTargetDistribution& dist,
                                          const GroupStructure& groups) {
  groups.validate(dist.n());
  require_full_targets(dist, "reweighting");
  const double n = dist.n();
  std::vector<std::vector<double>> weights(dist.m());
  for (std::size_t i = 0; i < dist.m(); ++i) {
    for (int j : dist.pair(i).sample) weights[i].push_back(1.0 / (n * groups.inclusion_prob[j]));
  }
  return SemilinearEstimator(dist, std::move(weights));
}

SemilinearEstimator subgroup_estimator(const SampleTargetDistribution& dist,
                                       const GroupStructure& groups, EmptyGroupRule rule) {
  groups.validate(dist.n());
  require_full_targets(dist, "subgroup estimation");
  std::vector<int> owner(static_cast<std::size_t>(dist.n()));
  for (std::size_t g = 0; g < groups.groups.size(); ++g) {
    for (int j : groups.groups[g]) owner[j] = static_cast<int>(g);
  }
  std::vector<std::vector<double>> weights(dist.m());
  std::vector<int> counts(groups.groups.size());
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto& sample = dist.pair(i).sample;
    std::fill(counts.begin(), counts.end(), 0);
    for (int j : sample) ++counts[owner[j]];
    int averaged = 0;
    for (std::size_t g = 0; g < counts.size(); ++g) {
      if (counts[g] > 0 || rule == EmptyGroupRule::kZeroMean) ++averaged;
    }
    weights[i].assign(sample.size(), 0.0);
    for (std::size_t k = 0; k < sample.size(); ++k) {
      weights[i][k] = 1.0 / (static_cast<double>(averaged) * counts[owner[sample[k]]]);
    }
  }
  return SemilinearEstimator(dist, std::move(weights));
}

SemilinearEstimator sample_mean_estimator(const SampleTargetDistribution& dist) {
  std::vector<std::vector<double>> weights(dist.m());
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto size = dist.pair(i).sample.size();
    weights[i].assign(size, size == 0 ? 0.0 : 1.0 / static_cast<double>(size));
  }
  return SemilinearEstimator(dist, std::move(weights));
}

SemilinearEstimator selective_prediction_estimator(const SampleTargetDistribution& dist,
                                                   const std::vector<int>& windows) {
  if (windows.size() != dist.m()) {
    fail(ErrorCode::kDimensionMismatch, "need one window length per pair");
  }
  std::vector<std::vector<double>> weights(dist.m());
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto& sample = dist.pair(i).sample;
    for (std::size_t k = 0; k < sample.size(); ++k) {
      if (sample[k] != static_cast<int>(k)) {
        fail(ErrorCode::kInvalidArgument,
             "pair " + std::to_string(i) + ": sample is not a prefix {0, ..., t-1}");
      }
    }
    if (windows[i] < 1) fail(ErrorCode::kInvalidArgument, "window length must be positive");
    const std::size_t t = sample.size();
    const std::size_t used = std::min(t, static_cast<std::size_t>(windows[i]));
    weights[i].assign(t, 0.0);
    for (std::size_t k = t - used; k < t; ++k) weights[i][k] = 1.0 / static_cast<double>(used);
  }
  return SemilinearEstimator(dist, std::move(weights));
}

}  // namespace wce
