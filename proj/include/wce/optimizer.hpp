#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wce/core.hpp"
#include "wce/subproblems.hpp"

namespace wce {

struct OgdConfig {
  double eps = 0.01;
  int t_max = 1000;
  std::optional<double> p_init;         // defaults to 1/n
  std::optional<int> p_doublings_max;   // defaults to ceil(log2 n) + 2
  NormRegime regime = NormRegime::kL2;
  std::uint64_t seed = 0;

  void validate() const;
  double resolved_p_init(int n) const;
  int resolved_doublings_max(int n) const;
};

struct OgdRecord {
  int t = 0;
  double eta = 0.0;
  double f_t = 0.0;     // <M(a^(t)), X^(t)>
  double lambda = 1.0;  // projection coefficient applied to a^(t+1)
  double elapsed_ms = 0.0;
};

struct OgdTrace {
  std::vector<OgdRecord> records;
  int best_t = 0;
  double best_value = std::numeric_limits<double>::infinity();
  double p = 0.0;
  double radius = 0.0;
  double beta = 0.0;
  // Iteration count at which the regret analysis certifies eps accuracy.
  double theoretical_iterations = 0.0;
  // 3 G D / (2 sqrt(T)) for the iterations actually run.
  double regret_bound = 0.0;
  // The regret analysis assumes every inner solve met its (1 + eps/10)
  // contract. Coordinate ascent for the l-infinity SDP carries no such
  // certificate, so this flag is set on that path.
  bool heuristic_subproblem = false;
  int subproblem_failures = 0;
};

// Ball B_r(b) intersected with the feasible subspace W.
struct BallGeometry {
  double radius = 0.0;
  double beta = 0.0;  // sum_i |Pi_{W_i^perp} b_i|^2
  // Pi_{W_i} b_i, aligned with each pair's sample indices.
  std::vector<std::vector<double>> center;

  double slack() const noexcept { return radius * radius - beta; }
  bool feasible() const noexcept { return slack() >= 0.0; }
};

BallGeometry make_ball_geometry(const SampleTargetDistribution& dist, double radius);

struct Projection {
  SemilinearEstimator estimator;
  double lambda = 1.0;
};

// Euclidean projection onto the ball within W: shrink towards the center
// by lambda = min(1, sqrt((r^2 - beta) / sum_i |a_i - Pi b_i|^2)).
Projection project_to_ball(const SemilinearEstimator& a, const BallGeometry& geom);

// sum_i |a_i - Pi_{W_i} b_i|^2
double distance_to_center_sq(const SemilinearEstimator& a, const BallGeometry& geom);

// X in factor form: X = V^T V with V of shape k x n. A rank-one eigenvector
// solution is V = x^T.
double cost_value(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                  const Eigen::MatrixXd& factor);
// Gradient of a -> <M(a), X>, aligned with sample indices:
// (2/m) Pi_{W_i} X (a_i - b_i).
std::vector<std::vector<double>> cost_gradient(const SemilinearEstimator& a,
                                               const SampleTargetDistribution& dist,
                                               const Eigen::MatrixXd& factor);

// One gradient step with eta_t = m / (n sqrt(t)) followed by projection.
Projection ogd_step(const SemilinearEstimator& a, const Eigen::MatrixXd& factor, int t,
                    const BallGeometry& geom, const SampleTargetDistribution& dist);

// a_i^(1): b_i when the target is fully sampled, the sample mean otherwise
// (zero for an empty sample).
SemilinearEstimator initial_estimator(const SampleTargetDistribution& dist);

struct OgdRun {
  SemilinearEstimator estimator;  // a^(t*)
  OgdTrace trace;
};

// Online gradient descent for a fixed optimum bound p = cfg.p_init.
// Throws kInfeasibleBall when the ball misses the subspace.
OgdRun minimize_sdp2(const SampleTargetDistribution& dist, const OgdConfig& cfg);
OgdRun minimize_sdp_inf(const SampleTargetDistribution& dist, const OgdConfig& cfg);

struct DoublingAttempt {
  double p = 0.0;
  bool infeasible = false;
  double best_value = std::numeric_limits<double>::infinity();
};

struct DoublingResult {
  OgdRun run;
  double p_final = 0.0;
  int doublings = 0;
  bool certified = false;  // best objective <= p for the accepted run
  std::vector<DoublingAttempt> attempts;
};

// Runs the regime's minimizer at p = p_init, 2 p_init, ... and accepts the
// first run whose best objective is <= p.
DoublingResult run_with_doubling(const SampleTargetDistribution& dist, const OgdConfig& cfg);

// CSV with columns t,eta,f_t,lambda,elapsed_ms.
std::string trace_to_csv(const OgdTrace& trace);

}  // namespace wce
