#include "wce/subproblems.hpp"

#include <cmath>
#include <deque>

namespace wce {

namespace {

Eigen::VectorXd gaussian_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = normal(rng);
  return v;
}

Eigen::VectorXd random_unit_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd v = gaussian_vector(n, rng);
  const double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / norm;
}

double factor_objective(const Eigen::MatrixXd& dense, const Eigen::MatrixXd& factor) {
  return (factor * dense).cwiseProduct(factor).sum();
}

}  // namespace

EigenResult top_eigen(const LossMatrix& loss, double eps, Rng& rng) {
  if (!(eps > 0.0)) fail(ErrorCode::kInvalidArgument, "eps must be positive");
  if (!loss.all_finite()) fail(ErrorCode::kNonFinite, "loss matrix has non-finite entries");

  const int n = loss.dim();
  EigenResult result;
  result.vector = random_unit_vector(n, rng);
  if (loss.trace() == 0.0) return result;

  const int cap = static_cast<int>(std::ceil(40.0 * std::log(n + 10.0) / eps));
  constexpr int kWindow = 10;
  std::deque<double> history;
  Eigen::VectorXd v = result.vector;
  int it = 0;
  while (it < cap) {
    ++it;
    const Eigen::VectorXd w = loss.apply(v);
    const double rho = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
    history.push_back(rho);
    if (static_cast<int>(history.size()) > kWindow) {
      const double old = history.front();
      history.pop_front();
      if (std::abs(rho - old) < eps / 100.0 * std::abs(rho)) break;
    }
  }
  result.vector = v;
  result.rayleigh = std::max(0.0, loss.quadratic_form(v));
  result.iterations_used = it;
  return result;
}

Sdp2Result sdp2_value(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                      double eps, Rng& rng) {
  const LossMatrix loss = build_loss_matrix(a, dist, dist.m() > static_cast<std::size_t>(dist.n()));
  const EigenResult eig = top_eigen(loss, eps, rng);
  const double n = dist.n();
  Eigen::VectorXd x = std::sqrt(n) * eig.vector;
  return {n * eig.rayleigh, DataValues(std::vector<double>(x.data(), x.data() + x.size()),
                                       NormRegime::kL2),
          eig.iterations_used};
}

PsdAssignment sdp_inf_solve(const LossMatrix& loss, double eps, Rng& rng,
                            const SdpOptions& options) {
  if (!(eps > 0.0)) fail(ErrorCode::kInvalidArgument, "eps must be positive");
  if (!loss.all_finite()) fail(ErrorCode::kNonFinite, "loss matrix has non-finite entries");

  const int n = loss.dim();
  const int rank = static_cast<int>(std::ceil(std::sqrt(2.0 * n))) + 1;
  const Eigen::MatrixXd dense = loss.dense();
  const double trace = dense.trace();

  PsdAssignment out;
  out.factor.resize(rank, n);
  for (int j = 0; j < n; ++j) out.factor.col(j) = random_unit_vector(rank, rng);
  out.objective = factor_objective(dense, out.factor);

  Eigen::VectorXd direction(rank);
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    for (int j = 0; j < n; ++j) {
      direction.noalias() = out.factor * dense.col(j);
      direction -= dense(j, j) * out.factor.col(j);
      const double norm = direction.norm();
      if (norm > 0.0) out.factor.col(j) = direction / norm;
    }
    const double objective = factor_objective(dense, out.factor);
    const double gain = objective - out.objective;
    out.objective = objective;
    out.sweeps = sweep;
    if (gain <= eps / 20.0 * std::max(objective, trace)) return out;
  }
  throw SdpNotConverged("coordinate ascent hit the sweep cap", std::move(out));
}

double sdp_inf_value(const SemilinearEstimator& a, const SampleTargetDistribution& dist,
                     double eps, Rng& rng) {
  return sdp_inf_solve(build_loss_matrix(a, dist, true), eps, rng).objective;
}

SignRounding round_sign(const PsdAssignment& assignment, const LossMatrix& loss, int trials,
                        Rng& rng) {
  if (trials < 1) fail(ErrorCode::kInvalidArgument, "trials must be at least 1");
  if (!loss.all_finite() || !assignment.factor.allFinite()) {
    fail(ErrorCode::kNonFinite, "rounding input has non-finite entries");
  }
  if (assignment.factor.cols() != loss.dim()) {
    fail(ErrorCode::kDimensionMismatch, "factor width differs from loss dimension");
  }
  const Eigen::Index n = assignment.factor.cols();
  Eigen::VectorXd best_x = Eigen::VectorXd::Ones(n);
  double best_value = -1.0;
  Eigen::VectorXd x(n);
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::VectorXd g = gaussian_vector(assignment.factor.rows(), rng);
    const Eigen::VectorXd projections = assignment.factor.transpose() * g;
    for (Eigen::Index j = 0; j < n; ++j) x[j] = projections[j] >= 0.0 ? 1.0 : -1.0;
    const double value = loss.quadratic_form(x);
    if (value > best_value) {
      best_value = value;
      best_x = x;
    }
  }
  return {DataValues(std::vector<double>(best_x.data(), best_x.data() + n), NormRegime::kLinf),
          best_value};
}

}  // namespace wce
