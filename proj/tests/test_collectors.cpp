#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wce/collectors.hpp"
#include "wce/io.hpp"

using namespace wce;
using oracle::thrown_code;

TEST_CASE("importance generator") {
  ImportanceOptions o;
  o.m = 20;
  o.probs = {1.0, 1.0};
  auto full = gen_importance(o);
  for (const auto& p : full.distribution.pairs()) CHECK(p.sample.size() == 50);

  ImportanceOptions big;
  big.m = 10000;
  big.seed = 4;
  auto s = gen_importance(big);
  CHECK(s.distribution.m() == 10000);
  std::size_t hits0 = 0;
  for (const auto& p : s.distribution.pairs()) {
    CHECK(p.target.size() == 50);
    if (!p.sample.empty() && p.sample.front() == 0) ++hits0;
  }
  const double rate = static_cast<double>(hits0) / 10000.0;
  CHECK(rate >= 0.09);
  CHECK(rate <= 0.11);
  CHECK(s.groups.groups.size() == 2);
  CHECK(s.groups.inclusion_prob[0] == 0.1);
  CHECK(s.groups.inclusion_prob[49] == 0.5);

  ImportanceOptions one;
  one.m = 1;
  one.seed = 77;
  CHECK(io::distribution_to_json(gen_importance(one).distribution).dump() ==
        io::distribution_to_json(gen_importance(one).distribution).dump());

  ImportanceOptions bad;
  bad.probs = {0.0, 0.5};
  CHECK(thrown_code([&] { gen_importance(bad); }) == ErrorCode::kInvalidArgument);
  bad.probs = {0.5, 1.5};
  CHECK(thrown_code([&] { gen_importance(bad); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("snowball generator") {
  SnowballOptions o;
  o.m = 1000;
  o.seed = 2;
  auto s = gen_snowball(o);
  CHECK(s.points.size() == 50);
  for (const auto& p : s.points) {
    CHECK(std::abs(p[0]) <= 0.5);
    CHECK(std::abs(p[1]) <= 0.5);
  }
  for (const auto& p : s.distribution.pairs()) {
    CHECK(p.sample.size() == 25);
    CHECK(p.target.size() == 50);
  }

  SnowballOptions single;
  single.k = 1;
  single.m = 50;
  const auto one = gen_snowball(single);
  for (const auto& p : one.distribution.pairs()) CHECK(p.sample.size() == 1);
  SnowballOptions all;
  all.k = 50;
  all.m = 5;
  const auto whole = gen_snowball(all);
  for (const auto& p : whole.distribution.pairs()) CHECK(p.sample.size() == 50);

  SnowballOptions variant = o;
  variant.shared_start = true;
  variant.recruit_unincluded = true;
  auto v = gen_snowball(variant);
  // Every pair grows from the same vertex.
  std::vector<int> count(50, 0);
  for (const auto& p : v.distribution.pairs()) {
    CHECK(p.sample.size() == 25);
    for (int j : p.sample) ++count[j];
  }
  CHECK(*std::max_element(count.begin(), count.end()) == 1000);

  SnowballOptions bad;
  bad.k = 51;
  CHECK(thrown_code([&] { gen_snowball(bad); }) == ErrorCode::kInvalidArgument);
  CHECK(io::distribution_to_json(gen_snowball(o).distribution) ==
        io::distribution_to_json(s.distribution));
}

TEST_CASE("snowball samples are spatially local") {
  // Recruitment through nearest neighbours keeps samples closer together
  // than uniform subsets of the same size.
  SnowballOptions o;
  o.m = 300;
  o.seed = 5;
  auto s = gen_snowball(o);
  auto spread = [&](const std::vector<int>& idx) {
    double cx = 0, cy = 0;
    for (int j : idx) {
      cx += s.points[j][0];
      cy += s.points[j][1];
    }
    cx /= idx.size();
    cy /= idx.size();
    return cx * cx + cy * cy;
  };
  double snow = 0.0, uniform = 0.0;
  std::mt19937_64 rng(1);
  for (const auto& p : s.distribution.pairs()) {
    snow += spread(p.sample);
    std::vector<int> all(50);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(25);
    uniform += spread(all);
  }
  CHECK(snow > uniform);
}

TEST_CASE("selective generator") {
  SelectiveOptions small;
  small.n = 4;
  small.windows = {1};
  auto s = gen_selective(small);
  REQUIRE(s.distribution.m() == 3);
  CHECK(s.distribution.pair(1).sample == std::vector<int>{0, 1});
  CHECK(s.distribution.pair(1).target == std::vector<int>{2});

  auto full = gen_selective({});
  CHECK(full.distribution.m() == 129);
  CHECK(full.windows.size() == 129);
  for (const auto& p : full.distribution.pairs()) {
    CHECK(p.target.front() == static_cast<int>(p.sample.size()));
    CHECK(p.sample.back() + 1 == p.target.front());
    for (std::size_t k = 0; k < p.sample.size(); ++k) CHECK(p.sample[k] == static_cast<int>(k));
  }

  SelectiveOptions overlap;
  overlap.overlapping = true;
  auto o = gen_selective(overlap);
  CHECK(o.distribution.m() == 129);
  for (const auto& p : o.distribution.pairs()) CHECK(p.target.front() == p.sample.back());

  SelectiveOptions clip;
  clip.clip_windows = true;
  auto c = gen_selective(clip);
  CHECK(c.distribution.m() == 5 * 31);
  for (std::size_t i = 0; i < c.distribution.m(); ++i) {
    const auto& p = c.distribution.pair(i);
    CHECK(p.target.back() == std::min(static_cast<int>(p.sample.size()) + c.windows[i], 32) - 1);
  }

  SelectiveOptions bad;
  bad.windows = {32};
  CHECK(thrown_code([&] { gen_selective(bad); }) == ErrorCode::kInvalidArgument);
  bad.windows = {};
  CHECK(thrown_code([&] { gen_selective(bad); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("metadata round trips") {
  ImportanceOptions io_opts;
  io_opts.m = 5;
  auto imp = gen_importance(io_opts);
  auto meta = importance_metadata(io_opts, imp.groups);
  CHECK(meta["generator"] == "importance");
  auto groups = groups_from_metadata(meta);
  CHECK(groups.groups == imp.groups.groups);
  CHECK(groups.inclusion_prob == imp.groups.inclusion_prob);

  SnowballOptions so;
  so.m = 3;
  auto snow = gen_snowball(so);
  CHECK(points_from_metadata(snowball_metadata(so, snow.points)) == snow.points);

  auto sel = gen_selective({});
  CHECK(windows_from_metadata(selective_metadata({}, sel.windows)) == sel.windows);

  nlohmann::json empty = nlohmann::json::object();
  CHECK(thrown_code([&] { groups_from_metadata(empty); }) == ErrorCode::kMalformedInput);
  CHECK(thrown_code([&] { points_from_metadata(empty); }) == ErrorCode::kMalformedInput);
  CHECK(thrown_code([&] { windows_from_metadata(empty); }) == ErrorCode::kMalformedInput);
}
