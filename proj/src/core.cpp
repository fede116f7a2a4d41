#include "wce/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wce {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kMalformedInput: return "malformed input";
    case ErrorCode::kIndexOutOfRange: return "index out of range";
    case ErrorCode::kEmptyTarget: return "empty target";
    case ErrorCode::kUnsortedIndices: return "unsorted indices";
    case ErrorCode::kDuplicateIndex: return "duplicate index";
    case ErrorCode::kEmptyDistribution: return "empty distribution";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kSupportViolation: return "support violation";
    case ErrorCode::kMissingObservation: return "missing observation";
    case ErrorCode::kNonFinite: return "non-finite value";
    case ErrorCode::kInfeasibleBall: return "infeasible ball";
    case ErrorCode::kNotConverged: return "not converged";
    case ErrorCode::kNoCertificate: return "no certificate";
    case ErrorCode::kTooLarge: return "instance too large";
    case ErrorCode::kIo: return "i/o error";
  }
  return "unknown";
}

namespace {

void validate_index_list(const std::vector<int>& idx, int n, std::size_t pair, const char* which) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= n) {
      fail(ErrorCode::kIndexOutOfRange, "pair " + std::to_string(pair) + ": " + which + " index " +
                                            std::to_string(idx[k]) + " outside [0, " +
                                            std::to_string(n) + ")");
    }
    if (k > 0 && idx[k] == idx[k - 1]) {
      fail(ErrorCode::kDuplicateIndex, "pair " + std::to_string(pair) + ": duplicate " + which +
                                           " index " + std::to_string(idx[k]));
    }
    if (k > 0 && idx[k] < idx[k - 1]) {
      fail(ErrorCode::kUnsortedIndices, "pair " + std::to_string(pair) + ": " + which +
                                            " indices not sorted");
    }
  }
}

}  // namespace

SampleTargetDistribution::SampleTargetDistribution(int n, std::vector<SamplePair> pairs)
    : n_(n), pairs_(std::move(pairs)) {
  if (n_ <= 0) fail(ErrorCode::kInvalidArgument, "population size must be positive");
  if (pairs_.empty()) fail(ErrorCode::kEmptyDistribution, "distribution has no pairs");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    validate_index_list(pairs_[i].sample, n_, i, "sample");
    validate_index_list(pairs_[i].target, n_, i, "target");
    if (pairs_[i].target.empty()) {
      fail(ErrorCode::kEmptyTarget, "pair " + std::to_string(i) + ": empty target");
    }
  }
}

SemilinearEstimator::SemilinearEstimator(const SampleTargetDistribution& dist,
                                         std::vector<std::vector<double>> weights)
    : n_(dist.n()), weights_(std::move(weights)) {
  check_consistent(dist);
}

SemilinearEstimator SemilinearEstimator::from_sparse(
    const SampleTargetDistribution& dist,
    const std::vector<std::vector<std::pair<int, double>>>& sparse) {
  if (sparse.size() != dist.m()) {
    fail(ErrorCode::kDimensionMismatch, "estimator has " + std::to_string(sparse.size()) +
                                            " weight vectors, distribution has " +
                                            std::to_string(dist.m()) + " pairs");
  }
  std::vector<std::vector<double>> weights(dist.m());
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto& sample = dist.pair(i).sample;
    weights[i].assign(sample.size(), 0.0);
    if (sparse[i].size() > sample.size()) {
      fail(ErrorCode::kSupportViolation,
           "pair " + std::to_string(i) + ": more weights than sample indices");
    }
    for (const auto& [index, value] : sparse[i]) {
      const auto it = std::lower_bound(sample.begin(), sample.end(), index);
      if (it == sample.end() || *it != index) {
        fail(ErrorCode::kSupportViolation, "pair " + std::to_string(i) + ": weight on index " +
                                               std::to_string(index) + " outside the sample");
      }
      weights[i][static_cast<std::size_t>(it - sample.begin())] = value;
    }
  }
  return SemilinearEstimator(dist, std::move(weights));
}

SemilinearEstimator SemilinearEstimator::zeros(const SampleTargetDistribution& dist) {
  std::vector<std::vector<double>> weights(dist.m());
  for (std::size_t i = 0; i < dist.m(); ++i) weights[i].assign(dist.pair(i).sample.size(), 0.0);
  return SemilinearEstimator(dist, std::move(weights));
}

Eigen::VectorXd SemilinearEstimator::dense(std::size_t i,
                                           const SampleTargetDistribution& dist) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  const auto& sample = dist.pair(i).sample;
  for (std::size_t k = 0; k < sample.size(); ++k) out[sample[k]] = weights_[i][k];
  return out;
}

void SemilinearEstimator::check_consistent(const SampleTargetDistribution& dist) const {
  if (n_ != dist.n() || weights_.size() != dist.m()) {
    fail(ErrorCode::kDimensionMismatch, "estimator does not match distribution shape");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i].size() != dist.pair(i).sample.size()) {
      fail(ErrorCode::kDimensionMismatch,
           "pair " + std::to_string(i) + ": weight count differs from sample size");
    }
  }
}

LossMatrix::LossMatrix(Eigen::MatrixXd rows, bool materialize_dense) : rows_(std::move(rows)) {
  if (materialize_dense) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows_.cols(), rows_.cols());
    m.selfadjointView<Eigen::Lower>().rankUpdate(rows_.transpose());
    m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    dense_ = std::move(m);
  }
}

Eigen::MatrixXd LossMatrix::dense() const {
  if (dense_) return *dense_;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows_.cols(), rows_.cols());
  m.selfadjointView<Eigen::Lower>().rankUpdate(rows_.transpose());
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
  return m;
}

Eigen::VectorXd LossMatrix::apply(const Eigen::VectorXd& w) const {
  if (dense_) return *dense_ * w;
  return rows_.transpose() * (rows_ * w);
}

double LossMatrix::quadratic_form(const Eigen::VectorXd& x) const {
  return (rows_ * x).squaredNorm();
}

double LossMatrix::trace() const { return rows_.squaredNorm(); }

bool LossMatrix::all_finite() const { return rows_.allFinite(); }

DataValues::DataValues(std::vector<double> x, NormRegime regime)
    : x_(std::move(x)), regime_(regime) {
  for (double v : x_) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "data value is not finite");
  }
  constexpr double kSlack = 1e-12;
  if (regime_ == NormRegime::kLinf) {
    for (double v : x_) {
      if (std::abs(v) > 1.0 + kSlack) {
        fail(ErrorCode::kInvalidArgument, "data value exceeds the l-infinity bound");
      }
    }
  } else {
    double sq = 0.0;
    for (double v : x_) sq += v * v;
    const double n = static_cast<double>(x_.size());
    if (std::sqrt(sq) > std::sqrt(n) * (1.0 + kSlack)) {
      fail(ErrorCode::kInvalidArgument, "data vector exceeds the l2 bound sqrt(n)");
    }
  }
}

Eigen::VectorXd DataValues::vector() const {
  return Eigen::Map<const Eigen::VectorXd>(x_.data(), static_cast<Eigen::Index>(x_.size()));
}

std::vector<std::pair<int, double>> target_vector(const SampleTargetDistribution& dist,
                                                  std::size_t i) {
  if (i >= dist.m()) {
    fail(ErrorCode::kIndexOutOfRange, "pair index " + std::to_string(i) + " out of range");
  }
  const auto& target = dist.pair(i).target;
  const double w = 1.0 / static_cast<double>(target.size());
  std::vector<std::pair<int, double>> out;
  out.reserve(target.size());
  for (int j : target) out.emplace_back(j, w);
  return out;
}

Eigen::MatrixXd residual_rows(const SemilinearEstimator& a, const SampleTargetDistribution& dist) {
  a.check_consistent(dist);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dist.m()), dist.n());
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto& pair = dist.pair(i);
    const auto w = a.weights(i);
    for (std::size_t k = 0; k < pair.sample.size(); ++k) d(row, pair.sample[k]) += w[k];
    const double bj = 1.0 / static_cast<double>(pair.target.size());
    for (int j : pair.target) d(row, j) -= bj;
  }
  return d;
}

LossMatrix build_loss_matrix(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                             bool materialize_dense) {
  Eigen::MatrixXd rows = residual_rows(a, dist);
  rows /= std::sqrt(static_cast<double>(dist.m()));
  return LossMatrix(std::move(rows), materialize_dense);
}

double fixed_data_error(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                        std::span<const double> x) {
  a.check_consistent(dist);
  if (x.size() != static_cast<std::size_t>(dist.n())) {
    fail(ErrorCode::kDimensionMismatch, "data vector length differs from population size");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto& pair = dist.pair(i);
    const auto w = a.weights(i);
    double estimate = 0.0;
    for (std::size_t k = 0; k < pair.sample.size(); ++k) estimate += w[k] * x[pair.sample[k]];
    double mean = 0.0;
    for (int j : pair.target) mean += x[j];
    mean /= static_cast<double>(pair.target.size());
    total += (estimate - mean) * (estimate - mean);
  }
  return total / static_cast<double>(dist.m());
}

double evaluate_pointwise(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                          std::size_t i, std::span<const std::pair<int, double>> observed) {
  a.check_consistent(dist);
  if (i >= dist.m()) {
    fail(ErrorCode::kIndexOutOfRange, "pair index " + std::to_string(i) + " out of range");
  }
  const auto& sample = dist.pair(i).sample;
  const auto w = a.weights(i);
  double value = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    if (w[k] == 0.0) continue;
    const auto it = std::find_if(observed.begin(), observed.end(),
                                 [&](const auto& e) { return e.first == sample[k]; });
    if (it == observed.end()) {
      fail(ErrorCode::kMissingObservation,
           "no observed value for supported index " + std::to_string(sample[k]));
    }
    value += w[k] * it->second;
  }
  return value;
}

}  // namespace wce
