#include "wce/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace wce {

void OgdConfig::validate() const {
  if (!(eps > 0.0)) fail(ErrorCode::kInvalidArgument, "eps must be positive");
  if (t_max < 1) fail(ErrorCode::kInvalidArgument, "t_max must be at least 1");
  if (p_init && !(*p_init > 0.0)) fail(ErrorCode::kInvalidArgument, "p_init must be positive");
  if (p_doublings_max && *p_doublings_max < 0) {
    fail(ErrorCode::kInvalidArgument, "p_doublings_max must be non-negative");
  }
}

double OgdConfig::resolved_p_init(int n) const { return p_init.value_or(1.0 / n); }

int OgdConfig::resolved_doublings_max(int n) const {
  return p_doublings_max.value_or(static_cast<int>(std::ceil(std::log2(std::max(n, 1)))) + 2);
}

BallGeometry make_ball_geometry(const SampleTargetDistribution& dist, double radius) {
  BallGeometry geom;
  geom.radius = radius;
  geom.center.resize(dist.m());
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto& pair = dist.pair(i);
    const double bj = 1.0 / static_cast<double>(pair.target.size());
    auto& c = geom.center[i];
    c.assign(pair.sample.size(), 0.0);
    std::size_t outside = 0;
    // Both lists are sorted: merge to find the target indices in the sample.
    std::size_t k = 0;
    for (int j : pair.target) {
      while (k < pair.sample.size() && pair.sample[k] < j) ++k;
      if (k < pair.sample.size() && pair.sample[k] == j) {
        c[k] = bj;
      } else {
        ++outside;
      }
    }
    geom.beta += static_cast<double>(outside) * bj * bj;
  }
  return geom;
}

double distance_to_center_sq(const SemilinearEstimator& a, const BallGeometry& geom) {
  double total = 0.0;
  for (std::size_t i = 0; i < geom.center.size(); ++i) {
    const auto w = a.weights(i);
    const auto& c = geom.center[i];
    for (std::size_t k = 0; k < c.size(); ++k) total += (w[k] - c[k]) * (w[k] - c[k]);
  }
  return total;
}

namespace {

double projection_lambda(double dist_sq, const BallGeometry& geom) {
  if (dist_sq <= 0.0) return 1.0;
  return std::min(1.0, std::sqrt(geom.slack() / dist_sq));
}

void shrink_towards_center(SemilinearEstimator& a, const BallGeometry& geom, double lambda) {
  if (lambda == 1.0) return;
  for (std::size_t i = 0; i < geom.center.size(); ++i) {
    auto w = a.weights(i);
    const auto& c = geom.center[i];
    for (std::size_t k = 0; k < c.size(); ++k) w[k] = lambda * w[k] + (1.0 - lambda) * c[k];
  }
}

void require_feasible(const BallGeometry& geom) {
  if (!geom.feasible()) {
    fail(ErrorCode::kInfeasibleBall, "ball of radius^2 " + std::to_string(geom.radius * geom.radius) +
                                         " misses the feasible subspace (beta = " +
                                         std::to_string(geom.beta) + ")");
  }
}

// X (a_i - b_i) for every i, as rows of an m x n matrix.
Eigen::MatrixXd applied_cost(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                             const Eigen::MatrixXd& factor) {
  if (factor.cols() != dist.n()) {
    fail(ErrorCode::kDimensionMismatch, "cost factor width differs from population size");
  }
  const Eigen::MatrixXd residuals = residual_rows(a, dist);
  return (residuals * factor.transpose()) * factor;
}

}  // namespace

Projection project_to_ball(const SemilinearEstimator& a, const BallGeometry& geom) {
  require_feasible(geom);
  if (a.m() != geom.center.size()) {
    fail(ErrorCode::kDimensionMismatch, "estimator and ball have different pair counts");
  }
  Projection out{a, projection_lambda(distance_to_center_sq(a, geom), geom)};
  shrink_towards_center(out.estimator, geom, out.lambda);
  return out;
}

double cost_value(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                  const Eigen::MatrixXd& factor) {
  if (factor.cols() != dist.n()) {
    fail(ErrorCode::kDimensionMismatch, "cost factor width differs from population size");
  }
  const Eigen::MatrixXd residuals = residual_rows(a, dist);
  return (residuals * factor.transpose()).squaredNorm() / static_cast<double>(dist.m());
}

std::vector<std::vector<double>> cost_gradient(const SemilinearEstimator& a,
                                               const SampleTargetDistribution& dist,
                                               const Eigen::MatrixXd& factor) {
  const Eigen::MatrixXd applied = applied_cost(a, dist, factor);
  const double scale = 2.0 / static_cast<double>(dist.m());
  std::vector<std::vector<double>> grad(dist.m());
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto& sample = dist.pair(i).sample;
    grad[i].resize(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) {
      grad[i][k] = scale * applied(static_cast<Eigen::Index>(i), sample[k]);
    }
  }
  return grad;
}

Projection ogd_step(const SemilinearEstimator& a, const Eigen::MatrixXd& factor, int t,
                    const BallGeometry& geom, const SampleTargetDistribution& dist) {
  if (t < 1) fail(ErrorCode::kInvalidArgument, "iteration index starts at 1");
  require_feasible(geom);
  const Eigen::MatrixXd applied = applied_cost(a, dist, factor);
  // eta_t * 2/m with eta_t = m / (n sqrt(t)).
  const double step = 2.0 / (static_cast<double>(dist.n()) * std::sqrt(static_cast<double>(t)));
  SemilinearEstimator next = a;
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto& sample = dist.pair(i).sample;
    auto w = next.weights(i);
    for (std::size_t k = 0; k < sample.size(); ++k) {
      w[k] -= step * applied(static_cast<Eigen::Index>(i), sample[k]);
    }
  }
  const double lambda = projection_lambda(distance_to_center_sq(next, geom), geom);
  shrink_towards_center(next, geom, lambda);
  return {std::move(next), lambda};
}

SemilinearEstimator initial_estimator(const SampleTargetDistribution& dist) {
  std::vector<std::vector<double>> weights(dist.m());
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto& pair = dist.pair(i);
    auto& w = weights[i];
    if (pair.sample.empty()) continue;
    if (std::includes(pair.sample.begin(), pair.sample.end(), pair.target.begin(),
                      pair.target.end())) {
      w.assign(pair.sample.size(), 0.0);
      const double bj = 1.0 / static_cast<double>(pair.target.size());
      std::size_t k = 0;
      for (int j : pair.target) {
        while (pair.sample[k] < j) ++k;
        w[k] = bj;
      }
    } else {
      w.assign(pair.sample.size(), 1.0 / static_cast<double>(pair.sample.size()));
    }
  }
  return SemilinearEstimator(dist, std::move(weights));
}

namespace {

struct InnerSolution {
  Eigen::MatrixXd factor;
  double value = 0.0;
  bool converged = true;
};

OgdRun minimize(const SampleTargetDistribution& dist, const OgdConfig& cfg, NormRegime regime) {
  cfg.validate();
  const int n = dist.n();
  const double m = static_cast<double>(dist.m());
  const double p = cfg.resolved_p_init(n);
  const double radius_sq = regime == NormRegime::kL2 ? m * p : std::numbers::pi * m * p / 2.0;
  const BallGeometry geom = make_ball_geometry(dist, std::sqrt(radius_sq));
  require_feasible(geom);

  OgdRun run{project_to_ball(initial_estimator(dist), geom).estimator, {}};
  OgdTrace& trace = run.trace;
  trace.p = p;
  trace.radius = geom.radius;
  trace.beta = geom.beta;
  const double np = static_cast<double>(n) * p;
  trace.theoretical_iterations = 36.0 * np * np / (cfg.eps * cfg.eps);
  if (regime == NormRegime::kLinf) {
    trace.theoretical_iterations *= std::numbers::pi * std::numbers::pi;
    trace.heuristic_subproblem = true;
  }

  Rng rng(cfg.seed);
  const bool dense = dist.m() > static_cast<std::size_t>(n);
  SemilinearEstimator current = run.estimator;
  const auto start = std::chrono::steady_clock::now();

  for (int t = 1; t <= cfg.t_max; ++t) {
    const LossMatrix loss = build_loss_matrix(current, dist, dense);
    InnerSolution inner;
    if (regime == NormRegime::kL2) {
      const EigenResult eig = top_eigen(loss, cfg.eps, rng);
      inner.factor = std::sqrt(static_cast<double>(n)) * eig.vector.transpose();
      inner.value = static_cast<double>(n) * eig.rayleigh;
    } else {
      PsdAssignment sdp;
      try {
        sdp = sdp_inf_solve(loss, cfg.eps, rng);
      } catch (const SdpNotConverged& e) {
        sdp = e.best();
        inner.converged = false;
        ++trace.subproblem_failures;
      }
      inner.factor = std::move(sdp.factor);
      inner.value = sdp.objective;
    }

    OgdRecord record;
    record.t = t;
    record.eta = m / (static_cast<double>(n) * std::sqrt(static_cast<double>(t)));
    record.f_t = inner.value;
    if (inner.value < trace.best_value) {
      trace.best_value = inner.value;
      trace.best_t = t;
      run.estimator = current;
    }

    const bool at_optimum = inner.value <= 0.0;
    if (!at_optimum) {
      Projection next = ogd_step(current, inner.factor, t, geom, dist);
      record.lambda = next.lambda;
      current = std::move(next.estimator);
    }
    record.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    trace.records.push_back(record);
    // A zero cost means M(a) = 0: the gradient vanishes and every later
    // iterate is identical.
    if (at_optimum) break;
  }

  const double iterations = static_cast<double>(trace.records.size());
  const double gradient_bound = 2.0 * n * geom.radius / m;
  const double diameter = 2.0 * geom.radius;
  trace.regret_bound = 3.0 * gradient_bound * diameter / (2.0 * std::sqrt(iterations));
  return run;
}

}  // namespace

OgdRun minimize_sdp2(const SampleTargetDistribution& dist, const OgdConfig& cfg) {
  if (cfg.regime != NormRegime::kL2) {
    fail(ErrorCode::kInvalidArgument, "minimize_sdp2 requires the l2 regime");
  }
  return minimize(dist, cfg, NormRegime::kL2);
}

OgdRun minimize_sdp_inf(const SampleTargetDistribution& dist, const OgdConfig& cfg) {
  if (cfg.regime != NormRegime::kLinf) {
    fail(ErrorCode::kInvalidArgument, "minimize_sdp_inf requires the l-infinity regime");
  }
  return minimize(dist, cfg, NormRegime::kLinf);
}

DoublingResult run_with_doubling(const SampleTargetDistribution& dist, const OgdConfig& cfg) {
  cfg.validate();
  const int max_doublings = cfg.resolved_doublings_max(dist.n());
  double p = cfg.resolved_p_init(dist.n());

  std::optional<DoublingResult> best;
  std::vector<DoublingAttempt> attempts;
  for (int doubling = 0; doubling <= max_doublings; ++doubling, p *= 2.0) {
    OgdConfig attempt_cfg = cfg;
    attempt_cfg.p_init = p;
    DoublingAttempt attempt{p, false, std::numeric_limits<double>::infinity()};
    try {
      OgdRun run = cfg.regime == NormRegime::kL2 ? minimize_sdp2(dist, attempt_cfg)
                                                 : minimize_sdp_inf(dist, attempt_cfg);
      attempt.best_value = run.trace.best_value;
      attempts.push_back(attempt);
      const bool certified = run.trace.best_value <= p;
      if (!best || run.trace.best_value < best->run.trace.best_value || certified) {
        best = DoublingResult{std::move(run), p, doubling, certified, {}};
      }
      if (certified) break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInfeasibleBall) throw;
      attempt.infeasible = true;
      attempts.push_back(attempt);
    }
  }
  if (!best) {
    fail(ErrorCode::kInfeasibleBall, "every doubling of p left the ball infeasible");
  }
  best->attempts = std::move(attempts);
  return std::move(*best);
}

std::string trace_to_csv(const OgdTrace& trace) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(6);
  out << "t,eta,f_t,lambda,elapsed_ms\n";
  for (const auto& r : trace.records) {
    out << r.t << ',' << r.eta << ',' << r.f_t << ',' << r.lambda << ',' << r.elapsed_ms << '\n';
  }
  return out.str();
}

}  // namespace wce
