#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wce/core.hpp"

namespace wce {

// Witness that a distribution is alpha-non-expanding with respect to S.
struct NonExpansionCertificate {
  std::vector<int> subset;  // S, sorted
  double alpha = 0.0;
  std::size_t side1_count = 0;  // A subset of S, B disjoint from S
  std::size_t side2_count = 0;  // A disjoint from S, B subset of S
};

NonExpansionCertificate check_non_expanding(const SampleTargetDistribution& dist,
                                            std::span<const int> subset);

inline constexpr int kMaxBruteForceN = 22;

// Exhaustive search over all 2^n subsets; ties go to the lexicographically
// smallest sorted index list.
NonExpansionCertificate best_S_bruteforce(const SampleTargetDistribution& dist);

// Any estimator: maps (pair index, sampled values aligned with A_i) to an
// estimate of mean(x_{B_i}).
using BlackBoxEstimator = std::function<double(std::size_t, std::span<const double>)>;

BlackBoxEstimator as_black_box(const SemilinearEstimator& a);

struct Adversary {
  DataValues x;
  double achieved_error = 0.0;
  double median = 0.0;             // c
  std::size_t restricted_pairs = 0;
  std::size_t selected_pairs = 0;  // |E|
  bool complemented = false;       // S was swapped for its complement
};

// Data values with |x|_inf = 1 forcing error >= alpha/4 on `estimator`.
Adversary adversarial_values(const SampleTargetDistribution& dist, std::span<const int> subset,
                             const BlackBoxEstimator& estimator);

// (1/m) sum_i (f(x_{A_i}) - mean(x_{B_i}))^2
double black_box_error(const SampleTargetDistribution& dist, const BlackBoxEstimator& estimator,
                       std::span<const double> x);

}  // namespace wce
