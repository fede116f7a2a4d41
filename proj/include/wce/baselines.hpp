#pragma once

#include <vector>

#include "wce/core.hpp"

namespace wce {

// Partition of the population into groups plus per-index inclusion
// probabilities (importance sampling design).
struct GroupStructure {
  std::vector<std::vector<int>> groups;
  std::vector<double> inclusion_prob;

  // Throws unless groups partition [0, n) and every probability is in (0, 1].
  void validate(int n) const;
};

// How the subgroup estimator treats a group with no sampled member.
enum class EmptyGroupRule {
  kZeroMean,   // the group's mean counts as 0 in the average over all groups
  kDropGroup,  // average only over groups that were sampled
};

// Weight 1/(n p_j) on every sampled index. Requires full-population targets.
SemilinearEstimator reweighting_estimator(const SampleTargetDistribution& dist,
                                          const GroupStructure& groups);

// Average of per-group sample means. Requires full-population targets.
SemilinearEstimator subgroup_estimator(const SampleTargetDistribution& dist,
                                       const GroupStructure& groups,
                                       EmptyGroupRule rule = EmptyGroupRule::kZeroMean);

SemilinearEstimator sample_mean_estimator(const SampleTargetDistribution& dist);

// Mean of the last min(w_i, t) sampled points. Requires every sample to be a
// prefix {0, ..., t-1}.
SemilinearEstimator selective_prediction_estimator(const SampleTargetDistribution& dist,
                                                   const std::vector<int>& windows);

}  // namespace wce
