#include "wce/lowerbound.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>

namespace wce {

namespace {

std::vector<char> membership(const SampleTargetDistribution& dist, std::span<const int> subset) {
  std::vector<char> in(static_cast<std::size_t>(dist.n()), 0);
  for (int j : subset) {
    if (j < 0 || j >= dist.n()) {
      fail(ErrorCode::kIndexOutOfRange, "subset index " + std::to_string(j) + " out of range");
    }
    in[j] = 1;
  }
  return in;
}

bool all_in(const std::vector<int>& idx, const std::vector<char>& in, char value) {
  return std::all_of(idx.begin(), idx.end(), [&](int j) { return in[j] == value; });
}

bool side1(const SamplePair& p, const std::vector<char>& in) {
  return all_in(p.sample, in, 1) && all_in(p.target, in, 0);
}

bool side2(const SamplePair& p, const std::vector<char>& in) {
  return all_in(p.sample, in, 0) && all_in(p.target, in, 1);
}

std::vector<int> sorted_members(const std::vector<char>& in) {
  std::vector<int> out;
  for (std::size_t j = 0; j < in.size(); ++j) {
    if (in[j]) out.push_back(static_cast<int>(j));
  }
  return out;
}

// Lexicographic order of the sorted index lists encoded by two bitmasks.
bool lex_less(std::uint32_t a, std::uint32_t b) {
  if (a == b) return false;
  const int d = std::countr_zero(a ^ b);
  const std::uint32_t above = d >= 31 ? 0u : ~((2u << d) - 1u);
  if ((a >> d) & 1u) return (b & above) != 0;
  return (a & above) == 0;
}

}  // namespace

NonExpansionCertificate check_non_expanding(const SampleTargetDistribution& dist,
                                            std::span<const int> subset) {
  const auto in = membership(dist, subset);
  NonExpansionCertificate cert;
  cert.subset = sorted_members(in);
  for (const auto& pair : dist.pairs()) {
    const bool one = side1(pair, in);
    const bool two = side2(pair, in);
    if (one != two) {
      if (one) {
        ++cert.side1_count;
      } else {
        ++cert.side2_count;
      }
    }
  }
  cert.alpha = static_cast<double>(cert.side1_count + cert.side2_count) /
               static_cast<double>(dist.m());
  return cert;
}

NonExpansionCertificate best_S_bruteforce(const SampleTargetDistribution& dist) {
  if (dist.n() > kMaxBruteForceN) {
    fail(ErrorCode::kTooLarge, "exhaustive subset search needs n <= " +
                                   std::to_string(kMaxBruteForceN) + ", got " +
                                   std::to_string(dist.n()));
  }
  const int n = dist.n();
  std::vector<std::uint32_t> sample_mask, target_mask;
  for (const auto& pair : dist.pairs()) {
    std::uint32_t a = 0, b = 0;
    for (int j : pair.sample) a |= 1u << j;
    for (int j : pair.target) b |= 1u << j;
    sample_mask.push_back(a);
    target_mask.push_back(b);
  }
  const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1u;
  std::uint32_t best_subset = 0;
  std::size_t best_count = 0, best_side1 = 0, best_side2 = 0;
  bool have = false;
  for (std::uint64_t s64 = 0; s64 <= full; ++s64) {
    const auto s = static_cast<std::uint32_t>(s64);
    const std::uint32_t complement = full & ~s;
    std::size_t c1 = 0, c2 = 0;
    for (std::size_t i = 0; i < sample_mask.size(); ++i) {
      const bool one = (sample_mask[i] & complement) == 0 && (target_mask[i] & s) == 0;
      const bool two = (sample_mask[i] & s) == 0 && (target_mask[i] & complement) == 0;
      if (one && !two) ++c1;
      if (two && !one) ++c2;
    }
    const std::size_t count = c1 + c2;
    if (!have || count > best_count || (count == best_count && lex_less(s, best_subset))) {
      have = true;
      best_subset = s;
      best_count = count;
      best_side1 = c1;
      best_side2 = c2;
    }
  }
  NonExpansionCertificate cert;
  for (int j = 0; j < n; ++j) {
    if ((best_subset >> j) & 1u) cert.subset.push_back(j);
  }
  cert.side1_count = best_side1;
  cert.side2_count = best_side2;
  cert.alpha = static_cast<double>(best_count) / static_cast<double>(dist.m());
  return cert;
}

BlackBoxEstimator as_black_box(const SemilinearEstimator& a) {
  return [a](std::size_t i, std::span<const double> values) {
    const auto w = a.weights(i);
    if (w.size() != values.size()) {
      fail(ErrorCode::kDimensionMismatch, "observed values do not match the sample size");
    }
    double out = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) out += w[k] * values[k];
    return out;
  };
}

double black_box_error(const SampleTargetDistribution& dist, const BlackBoxEstimator& estimator,
                       std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(dist.n())) {
    fail(ErrorCode::kDimensionMismatch, "data vector length differs from population size");
  }
  double total = 0.0;
  std::vector<double> observed;
  for (std::size_t i = 0; i < dist.m(); ++i) {
    const auto& pair = dist.pair(i);
    observed.clear();
    for (int j : pair.sample) observed.push_back(x[j]);
    double mean = 0.0;
    for (int j : pair.target) mean += x[j];
    mean /= static_cast<double>(pair.target.size());
    const double err = estimator(i, observed) - mean;
    total += err * err;
  }
  return total / static_cast<double>(dist.m());
}

Adversary adversarial_values(const SampleTargetDistribution& dist, std::span<const int> subset,
                             const BlackBoxEstimator& estimator) {
  const NonExpansionCertificate cert = check_non_expanding(dist, subset);
  if (cert.side1_count + cert.side2_count == 0) {
    fail(ErrorCode::kNoCertificate, "subset certifies alpha = 0");
  }
  auto in = membership(dist, subset);
  const bool complemented = cert.side2_count > cert.side1_count;
  if (complemented) {
    for (auto& v : in) v = !v;
  }

  std::vector<double> values;
  std::vector<double> ones;
  for (const auto& pair : dist.pairs()) {
    if (!side1(pair, in)) continue;
    ones.assign(pair.sample.size(), 1.0);
    values.push_back(estimator(static_cast<std::size_t>(&pair - dist.pairs().data()), ones));
  }
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[(sorted.size() - 1) / 2];  // lower median
  const double sign = median >= 0.0 ? 1.0 : -1.0;
  const auto selected = static_cast<std::size_t>(std::count_if(
      values.begin(), values.end(), [&](double v) { return sign > 0 ? v >= median : v <= median; }));

  std::vector<double> x(in.size());
  for (std::size_t j = 0; j < in.size(); ++j) x[j] = in[j] ? 1.0 : -sign;
  const double achieved = black_box_error(dist, estimator, x);
  return {DataValues(std::move(x), NormRegime::kLinf), achieved, median, values.size(), selected,
          complemented};
}

}  // namespace wce
