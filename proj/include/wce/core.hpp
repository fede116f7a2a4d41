#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wce/error.hpp"

namespace wce {

// Every randomized routine takes an explicitly seeded generator.
using Rng = std::mt19937_64;

// One (sample, target) pair. Both index lists are sorted, 0-based and
// duplicate free.
struct SamplePair {
  std::vector<int> sample;
  std::vector<int> target;
};

// Uniform distribution over m sample/target pairs on a population of size n.
class SampleTargetDistribution {
 public:
  // Validates every invariant; throws wce::Error on violation.
  SampleTargetDistribution(int n, std::vector<SamplePair> pairs);

  int n() const noexcept { return n_; }
  std::size_t m() const noexcept { return pairs_.size(); }
  const SamplePair& pair(std::size_t i) const { return pairs_.at(i); }
  const std::vector<SamplePair>& pairs() const noexcept { return pairs_; }

 private:
  int n_;
  std::vector<SamplePair> pairs_;
};

// Weights of a semilinear estimator. weights[i][k] is the weight placed on
// index pair(i).sample[k], so support(a_i) is contained in A_i by
// construction.
class SemilinearEstimator {
 public:
  SemilinearEstimator() = default;
  SemilinearEstimator(const SampleTargetDistribution& dist,
                      std::vector<std::vector<double>> weights);

  // Builds from (index, weight) lists; rejects any index outside A_i.
  static SemilinearEstimator from_sparse(
      const SampleTargetDistribution& dist,
      const std::vector<std::vector<std::pair<int, double>>>& sparse);

  static SemilinearEstimator zeros(const SampleTargetDistribution& dist);

  int n() const noexcept { return n_; }
  std::size_t m() const noexcept { return weights_.size(); }
  std::span<const double> weights(std::size_t i) const { return weights_.at(i); }
  std::span<double> weights(std::size_t i) { return weights_.at(i); }

  // Dense length-n copy of a_i.
  Eigen::VectorXd dense(std::size_t i, const SampleTargetDistribution& dist) const;

  // Throws kDimensionMismatch unless this estimator was built for `dist`.
  void check_consistent(const SampleTargetDistribution& dist) const;

 private:
  int n_ = 0;
  std::vector<std::vector<double>> weights_;
};

// M(a) = (1/m) sum_i (a_i - b_i)(a_i - b_i)^T, held as pre-scaled rows
// r_i = (a_i - b_i)/sqrt(m) so that M = R^T R.
class LossMatrix {
 public:
  LossMatrix(Eigen::MatrixXd rows, bool materialize_dense);

  int dim() const noexcept { return static_cast<int>(rows_.cols()); }
  std::size_t num_rows() const noexcept { return static_cast<std::size_t>(rows_.rows()); }
  const Eigen::MatrixXd& rows() const noexcept { return rows_; }

  bool has_dense() const noexcept { return dense_.has_value(); }
  // Returns the materialized matrix if present, otherwise computes R^T R.
  Eigen::MatrixXd dense() const;

  // M w, through the dense form when materialized and R^T (R w) otherwise.
  Eigen::VectorXd apply(const Eigen::VectorXd& w) const;
  double quadratic_form(const Eigen::VectorXd& x) const;
  double trace() const;
  bool all_finite() const;

 private:
  Eigen::MatrixXd rows_;
  std::optional<Eigen::MatrixXd> dense_;
};

enum class NormRegime { kLinf, kL2 };

// Data values admissible under one of the two normalizations.
class DataValues {
 public:
  DataValues(std::vector<double> x, NormRegime regime);

  NormRegime regime() const noexcept { return regime_; }
  const std::vector<double>& values() const noexcept { return x_; }
  Eigen::VectorXd vector() const;

 private:
  std::vector<double> x_;
  NormRegime regime_;
};

// b_i as (index, weight) entries: 1/|B_i| on every target index.
std::vector<std::pair<int, double>> target_vector(const SampleTargetDistribution& dist,
                                                  std::size_t i);

// Residual matrix D with rows a_i - b_i (unscaled), m x n.
Eigen::MatrixXd residual_rows(const SemilinearEstimator& a, const SampleTargetDistribution& dist);

LossMatrix build_loss_matrix(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                             bool materialize_dense = false);

// (1/m) sum_i (<a_i, x> - mean(x_{B_i}))^2 for one fixed data vector.
double fixed_data_error(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                        std::span<const double> x);

// <a_i, x> using only observed coordinates; `observed` is a list of
// (index, value) entries that must cover support(a_i).
double evaluate_pointwise(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                          std::size_t i, std::span<const std::pair<int, double>> observed);

}  // namespace wce
