#include <doctest.h>

#include <cmath>
#include <iterator>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "wce/baselines.hpp"
#include "wce/optimizer.hpp"

using namespace wce;
using oracle::thrown_code;

namespace {

OgdConfig config(NormRegime regime, int t_max = 200) {
  OgdConfig cfg;
  cfg.regime = regime;
  cfg.t_max = t_max;
  cfg.seed = 5;
  return cfg;
}

// Distribution where every sample contains its target.
SampleTargetDistribution covered(std::mt19937_64& rng, int n, int m) {
  std::vector<SamplePair> pairs;
  for (int i = 0; i < m; ++i) {
    auto b = oracle::random_subset(n, 0.3, rng, true);
    auto extra = oracle::random_subset(n, 0.3, rng, false);
    std::vector<int> a;
    std::set_union(b.begin(), b.end(), extra.begin(), extra.end(), std::back_inserter(a));
    pairs.push_back({a, b});
  }
  return SampleTargetDistribution(n, std::move(pairs));
}

}  // namespace

TEST_CASE("config validation") {
  OgdConfig cfg;
  cfg.eps = 0.0;
  CHECK(thrown_code([&] { cfg.validate(); }) == ErrorCode::kInvalidArgument);
  cfg = OgdConfig{};
  cfg.t_max = 0;
  CHECK(thrown_code([&] { cfg.validate(); }) == ErrorCode::kInvalidArgument);
  cfg = OgdConfig{};
  cfg.p_init = -1.0;
  CHECK(thrown_code([&] { cfg.validate(); }) == ErrorCode::kInvalidArgument);
  cfg = OgdConfig{};
  CHECK(cfg.resolved_p_init(50) == doctest::Approx(0.02));
  CHECK(cfg.resolved_doublings_max(50) == 8);
  CHECK(cfg.t_max == 1000);
}

TEST_CASE("ball geometry") {
  SampleTargetDistribution d(3, {{{0, 1}, {1, 2}}, {{}, {0}}});
  auto g = make_ball_geometry(d, 2.0);
  CHECK(g.beta == doctest::Approx(0.25 + 1.0));
  CHECK(g.center[0] == std::vector<double>{0.0, 0.5});
  CHECK(g.center[1].empty());
  CHECK(g.slack() == doctest::Approx(4.0 - 1.25));
}

TEST_CASE("project_to_ball examples") {
  SampleTargetDistribution d(1, {{{0}, {0}}});
  auto g = make_ball_geometry(d, 1.0);
  auto far = SemilinearEstimator::from_sparse(d, {{{0, 3.0}}});
  auto p = project_to_ball(far, g);
  CHECK(p.lambda == doctest::Approx(0.5));
  CHECK(p.estimator.weights(0)[0] == doctest::Approx(2.0));

  auto inside = SemilinearEstimator::from_sparse(d, {{{0, 1.5}}});
  auto q = project_to_ball(inside, g);
  CHECK(q.lambda == 1.0);
  CHECK(q.estimator.weights(0)[0] == 1.5);

  auto center = SemilinearEstimator::from_sparse(d, {{{0, 1.0}}});
  auto c = project_to_ball(center, g);
  CHECK(c.lambda == 1.0);
  CHECK(c.estimator.weights(0)[0] == 1.0);

  SampleTargetDistribution off(2, {{{0}, {1}}});
  auto tight = make_ball_geometry(off, 0.5);
  CHECK(thrown_code([&] { project_to_ball(SemilinearEstimator::zeros(off), tight); }) ==
        ErrorCode::kInfeasibleBall);
}

TEST_CASE("property: projection matches the 1-D oracle and is idempotent") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    auto d = oracle::random_distribution(6, 5, rng, 0.6);
    auto geom0 = make_ball_geometry(d, 0.0);
    const double radius = std::sqrt(geom0.beta + 2.0 * u(rng));
    auto geom = make_ball_geometry(d, radius);
    auto a = oracle::random_estimator(d, rng, 1.0);
    const double dist_sq = distance_to_center_sq(a, geom);
    const double lambda = oracle::projection_lambda(dist_sq, geom.slack());
    auto p = project_to_ball(a, geom);
    for (std::size_t i = 0; i < d.m(); ++i) {
      auto w = a.weights(i);
      auto v = p.estimator.weights(i);
      for (std::size_t k = 0; k < w.size(); ++k) {
        const double expected = lambda * w[k] + (1.0 - lambda) * geom.center[i][k];
        CHECK(std::abs(v[k] - expected) <= 1e-6);
      }
    }
    CHECK(distance_to_center_sq(p.estimator, geom) <= geom.slack() + 1e-9);
    auto again = project_to_ball(p.estimator, geom);
    for (std::size_t i = 0; i < d.m(); ++i) {
      auto v = p.estimator.weights(i);
      auto w2 = again.estimator.weights(i);
      for (std::size_t k = 0; k < v.size(); ++k) CHECK(std::abs(v[k] - w2[k]) <= 1e-12);
    }
  }
}

TEST_CASE("property: projection is the nearest point of the ball") {
  // Any other feasible point of the ball is at least as far from a.
  std::mt19937_64 rng(32);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto d = oracle::random_distribution(5, 4, rng, 0.6);
    auto geom = make_ball_geometry(d, std::sqrt(make_ball_geometry(d, 0).beta + 0.5));
    auto a = oracle::random_estimator(d, rng, 2.0);
    auto p = project_to_ball(a, geom);
    auto gap = [&](const SemilinearEstimator& b) {
      double s = 0.0;
      for (std::size_t i = 0; i < d.m(); ++i) {
        for (std::size_t k = 0; k < a.weights(i).size(); ++k) {
          s += std::pow(a.weights(i)[k] - b.weights(i)[k], 2);
        }
      }
      return s;
    };
    const double best = gap(p.estimator);
    for (int s = 0; s < 50; ++s) {
      auto other = project_to_ball(oracle::random_estimator(d, rng, 2.0), geom).estimator;
      CHECK(gap(other) >= best - 1e-9);
    }
  }
}

TEST_CASE("property: gradient matches central finite differences") {
  std::mt19937_64 rng(33);
  const double delta = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    auto d = oracle::random_distribution(5, 6, rng, 0.6);
    auto a = oracle::random_estimator(d, rng, 0.5);
    const int k = 1 + static_cast<int>(rng() % 3);
    const Eigen::MatrixXd V = oracle::random_rows(k, d.n(), rng) / std::sqrt(static_cast<double>(k));
    auto grad = cost_gradient(a, d, V);
    for (std::size_t i = 0; i < d.m(); ++i) {
      for (std::size_t c = 0; c < a.weights(i).size(); ++c) {
        auto plus = a, minus = a;
        plus.weights(i)[c] += delta;
        minus.weights(i)[c] -= delta;
        const double fd = (cost_value(plus, d, V) - cost_value(minus, d, V)) / (2.0 * delta);
        CHECK(std::abs(fd - grad[i][c]) <= 1e-5);
      }
    }
    // cost_value is <M(a), V^T V>.
    const Eigen::MatrixXd M = oracle::loss_matrix(a, d);
    CHECK(cost_value(a, d, V) == doctest::Approx(M.cwiseProduct(V.transpose() * V).sum()));
  }
}

TEST_CASE("ogd_step fixed points") {
  std::mt19937_64 rng(34);
  auto d = oracle::random_distribution(4, 5, rng, 0.6);
  auto geom = make_ball_geometry(d, std::sqrt(make_ball_geometry(d, 0).beta + 10.0));
  auto a = project_to_ball(oracle::random_estimator(d, rng, 0.2), geom).estimator;
  auto same = ogd_step(a, Eigen::MatrixXd::Zero(1, 4), 3, geom, d);
  for (std::size_t i = 0; i < d.m(); ++i) {
    for (std::size_t k = 0; k < a.weights(i).size(); ++k) {
      CHECK(same.estimator.weights(i)[k] == a.weights(i)[k]);
    }
  }
  SampleTargetDistribution exact(3, {{{0, 1}, {0, 1}}, {{0, 1, 2}, {2}}});
  auto geom2 = make_ball_geometry(exact, 1.0);
  auto b = initial_estimator(exact);
  auto step = ogd_step(b, Eigen::MatrixXd::Ones(2, 3), 1, geom2, exact);
  CHECK(step.estimator.weights(0)[0] == doctest::Approx(0.5));
  CHECK(step.estimator.weights(1)[2] == doctest::Approx(1.0));
  CHECK(thrown_code([&] { ogd_step(b, Eigen::MatrixXd::Ones(1, 3), 0, geom2, exact); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("ogd_step uses eta_t times 2/m") {
  SampleTargetDistribution d(1, {{{0}, {0}}});
  auto geom = make_ball_geometry(d, 100.0);
  auto a = SemilinearEstimator::from_sparse(d, {{{0, 2.0}}});
  // X = 1, residual 1, gradient 2; eta_4 = 1/2 -> 2 - 1 = 1.
  auto s = ogd_step(a, Eigen::MatrixXd::Ones(1, 1), 4, geom, d);
  CHECK(s.estimator.weights(0)[0] == doctest::Approx(1.0));
}

TEST_CASE("initial estimator") {
  SampleTargetDistribution d(4, {{{0, 1, 2}, {1}}, {{0, 3}, {1, 2}}, {{}, {0}}});
  auto a = initial_estimator(d);
  CHECK(std::vector<double>(a.weights(0).begin(), a.weights(0).end()) ==
        std::vector<double>{0.0, 1.0, 0.0});
  CHECK(a.weights(1)[0] == doctest::Approx(0.5));
  CHECK(a.weights(2).empty());
}

TEST_CASE("zero optimum at the first iteration") {
  SampleTargetDistribution d(4, {{{0, 1}, {0, 1}}, {{2}, {2}}, {{0, 1, 2, 3}, {0, 1, 2, 3}}});
  for (auto regime : {NormRegime::kL2, NormRegime::kLinf}) {
    auto cfg = config(regime);
    auto run = regime == NormRegime::kL2 ? minimize_sdp2(d, cfg) : minimize_sdp_inf(d, cfg);
    CHECK(run.trace.best_t == 1);
    CHECK(run.trace.best_value <= 1e-9);
    auto dbl = run_with_doubling(d, cfg);
    CHECK(dbl.doublings == 0);
    CHECK(dbl.certified);
    CHECK(dbl.p_final == doctest::Approx(0.25));
  }
  SampleTargetDistribution one(2, {{{0, 1}, {0, 1}}});
  auto r = minimize_sdp_inf(one, config(NormRegime::kLinf));
  CHECK(r.trace.best_value <= 1e-9);
}

TEST_CASE("property: covered targets give a zero optimum at the first iteration") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    auto d = covered(rng, 3 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 10));
    for (auto regime : {NormRegime::kL2, NormRegime::kLinf}) {
      auto cfg = config(regime, 20);
      auto run = regime == NormRegime::kL2 ? minimize_sdp2(d, cfg) : minimize_sdp_inf(d, cfg);
      CHECK(run.trace.best_t == 1);
      CHECK(run.trace.records.front().f_t <= 1e-9);
    }
  }
}

TEST_CASE("regime mismatch is rejected") {
  SampleTargetDistribution d(2, {{{0, 1}, {0, 1}}});
  CHECK(thrown_code([&] { minimize_sdp2(d, config(NormRegime::kLinf)); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(thrown_code([&] { minimize_sdp_inf(d, config(NormRegime::kL2)); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("one unobserved target: optimum at zero weight") {
  // min over a = (alpha, 0) of 2 * lambda_max((a - b)(a - b)^T) with b = (0, 1)
  // is 2 (1 + alpha^2), minimized at alpha = 0.
  SampleTargetDistribution d(2, {{{0}, {1}}});
  auto res = run_with_doubling(d, config(NormRegime::kL2, 300));
  CHECK(res.run.trace.best_value == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(std::abs(res.run.estimator.weights(0)[0]) <= 0.05);
  CHECK(res.certified);
  // The ball misses the subspace at p = 1/2.
  CHECK(res.attempts.front().infeasible);
  CHECK(res.doublings >= 1);
}

TEST_CASE("infeasible ball forces doubling") {
  std::vector<SamplePair> pairs;
  for (int i = 0; i < 6; ++i) pairs.push_back({{0, 1}, {2 + (i % 4)}});
  SampleTargetDistribution d(6, pairs);
  auto cfg = config(NormRegime::kL2, 50);
  CHECK(thrown_code([&] { minimize_sdp2(d, cfg); }) == ErrorCode::kInfeasibleBall);
  auto res = run_with_doubling(d, cfg);
  CHECK(res.doublings >= 1);
  CHECK(res.doublings <= cfg.resolved_doublings_max(6));
  CHECK(res.attempts.front().infeasible);
}

TEST_CASE("doubling count stays within its cap") {
  std::mt19937_64 rng(35);
  auto d = oracle::random_distribution(6, 10, rng);
  auto cfg = config(NormRegime::kL2, 30);
  cfg.p_doublings_max = 1;
  auto res = run_with_doubling(d, cfg);
  CHECK(res.doublings <= 1);
  CHECK(res.attempts.size() <= 2);
}

TEST_CASE("property: trace invariants on random instances") {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 6; ++trial) {
    auto d = oracle::random_distribution(6, 8, rng, 0.5);
    const auto regime = trial % 2 == 0 ? NormRegime::kL2 : NormRegime::kLinf;
    auto cfg = config(regime, 150);
    auto res = run_with_doubling(d, cfg);
    const auto& tr = res.run.trace;
    REQUIRE(!tr.records.empty());
    double min_f = tr.records.front().f_t;
    int argmin = 1;
    for (const auto& r : tr.records) {
      CHECK(tr.best_value <= r.f_t);
      CHECK(r.lambda > 0.0);
      CHECK(r.lambda <= 1.0);
      CHECK(r.eta == doctest::Approx(d.m() / (6.0 * std::sqrt(r.t))));
      if (r.f_t < min_f) {
        min_f = r.f_t;
        argmin = r.t;
      }
    }
    CHECK(tr.best_value == min_f);
    CHECK(tr.best_t == argmin);
    CHECK(tr.heuristic_subproblem == (regime == NormRegime::kLinf));

    // Support, ball membership and improvement over the first iterate.
    auto geom = make_ball_geometry(d, tr.radius);
    CHECK(distance_to_center_sq(res.run.estimator, geom) <= geom.slack() + 1e-6);
    CHECK(tr.best_value <= tr.records.front().f_t + 1e-9);

    const double np = 6.0 * tr.p;
    double expected_t = 36.0 * np * np / (cfg.eps * cfg.eps);
    if (regime == NormRegime::kLinf) expected_t *= std::numbers::pi * std::numbers::pi;
    CHECK(tr.theoretical_iterations == doctest::Approx(expected_t));
    const double G = 2.0 * 6.0 * tr.radius / static_cast<double>(d.m());
    CHECK(tr.regret_bound ==
          doctest::Approx(3.0 * G * 2.0 * tr.radius / (2.0 * std::sqrt(tr.records.size()))));
  }
}

TEST_CASE("property: every iterate stays in the ball") {
  std::mt19937_64 rng(37);
  auto d = oracle::random_distribution(5, 7, rng);
  auto geom = make_ball_geometry(d, std::sqrt(make_ball_geometry(d, 0).beta + 0.3));
  auto a = project_to_ball(initial_estimator(d), geom).estimator;
  Rng srng(1);
  for (int t = 1; t <= 40; ++t) {
    auto loss = build_loss_matrix(a, d);
    auto e = top_eigen(loss, 0.01, srng);
    Eigen::MatrixXd V = std::sqrt(5.0) * e.vector.transpose();
    a = ogd_step(a, V, t, geom, d).estimator;
    CHECK(distance_to_center_sq(a, geom) <= geom.slack() + 1e-6);
  }
}

TEST_CASE("property: optimizers do not lose to baselines on small instances") {
  std::mt19937_64 rng(38);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 4);
    const int m = 2 + static_cast<int>(rng() % 7);
    std::vector<SamplePair> pairs;
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < m; ++i) pairs.push_back({oracle::random_subset(n, 0.6, rng, false), all});
    SampleTargetDistribution d(n, pairs);
    auto cfg = config(NormRegime::kLinf, 400);
    auto res = run_with_doubling(d, cfg);
    Rng eval(3);
    const double ogd = sdp_inf_value(res.run.estimator, d, 0.01, eval);
    const double mean = sdp_inf_value(sample_mean_estimator(d), d, 0.01, eval);
    CHECK(ogd <= mean + cfg.eps);
  }
}

TEST_CASE("trace CSV layout") {
  OgdTrace tr;
  tr.records.push_back({1, 2.5, 0.125, 1.0, 0.5});
  CHECK(trace_to_csv(tr) == "t,eta,f_t,lambda,elapsed_ms\n1,2.500000,0.125000,1.000000,0.500000\n");
}
