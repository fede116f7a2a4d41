#pragma once

#include "wce/core.hpp"

namespace wce {

// Approximate top eigenpair of a loss matrix.
struct EigenResult {
  Eigen::VectorXd vector;  // unit norm
  double rayleigh = 0.0;   // v^T M v
  int iterations_used = 0;
};

// Feasible point X = V^T V of the unit-diagonal SDP, kept in factor form.
// Columns of `factor` have unit norm.
struct PsdAssignment {
  Eigen::MatrixXd factor;  // k x n
  double objective = 0.0;  // <M, X>
  int sweeps = 0;

  int rank() const noexcept { return static_cast<int>(factor.rows()); }
  Eigen::MatrixXd gram() const { return factor.transpose() * factor; }
};

struct SdpOptions {
  int max_sweeps = 20000;
};

// Raised when coordinate ascent hits its sweep cap. Carries the best
// feasible point found, which is still a valid lower bound.
class SdpNotConverged : public Error {
 public:
  SdpNotConverged(const std::string& what, PsdAssignment best)
      : Error(ErrorCode::kNotConverged, what), best_(std::move(best)) {}
  const PsdAssignment& best() const noexcept { return best_; }

 private:
  PsdAssignment best_;
};

struct Sdp2Result {
  double value = 0.0;  // n * rayleigh
  DataValues adversary;
  int iterations_used = 0;
};

struct SignRounding {
  DataValues x;
  double value = 0.0;  // x^T M x
};

// Power iteration from a Gaussian start. Stops after
// ceil(40 ln(n + 10) / eps) products or once the Rayleigh quotient changes
// by less than eps/100 (relative) over 10 iterations.
EigenResult top_eigen(const LossMatrix& loss, double eps, Rng& rng);

// l2 worst case n * lambda_max(M(a)) and the adversary x = sqrt(n) v.
Sdp2Result sdp2_value(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                      double eps, Rng& rng);

// max <M, X> s.t. X PSD, X_jj = 1, by low-rank coordinate ascent on
// X = V^T V with rank ceil(sqrt(2n)) + 1. Each sweep sets every column to
// the normalized direction sum_{l != j} M_jl V_l; a zero direction leaves
// the column in place. Converged once a sweep gains less than
// eps/20 * max(objective, trace M).
PsdAssignment sdp_inf_solve(const LossMatrix& loss, double eps, Rng& rng,
                            const SdpOptions& options = {});

// Convenience: sdp_inf_solve(build_loss_matrix(a)).objective
double sdp_inf_value(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                     double eps, Rng& rng);

// Random-hyperplane sign rounding of X; keeps the best of `trials` draws.
SignRounding round_sign(const PsdAssignment& assignment, const LossMatrix& loss, int trials,
                        Rng& rng);

}  // namespace wce
