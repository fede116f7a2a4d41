#include "wce/io.hpp"

#include <fstream>
#include <sstream>

namespace wce::io {

using nlohmann::json;

namespace {

std::vector<int> parse_index_list(const json& value, std::size_t pair, const char* key) {
  if (!value.is_array()) {
    fail(ErrorCode::kMalformedInput,
         "pair " + std::to_string(pair) + ": field \"" + key + "\" must be an array");
  }
  std::vector<int> out;
  out.reserve(value.size());
  for (const auto& e : value) {
    if (!e.is_number_integer()) {
      fail(ErrorCode::kMalformedInput,
           "pair " + std::to_string(pair) + ": non-integer index in \"" + key + "\"");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace

json distribution_to_json(const SampleTargetDistribution& dist) {
  json pairs = json::array();
  for (const auto& p : dist.pairs()) pairs.push_back({{"A", p.sample}, {"B", p.target}});
  return {{"n", dist.n()}, {"pairs", std::move(pairs)}};
}

SampleTargetDistribution distribution_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("pairs")) {
    fail(ErrorCode::kMalformedInput, "distribution must be an object with \"n\" and \"pairs\"");
  }
  if (!doc["n"].is_number_integer()) fail(ErrorCode::kMalformedInput, "\"n\" must be an integer");
  if (!doc["pairs"].is_array()) fail(ErrorCode::kMalformedInput, "\"pairs\" must be an array");
  std::vector<SamplePair> pairs;
  pairs.reserve(doc["pairs"].size());
  for (const auto& entry : doc["pairs"]) {
    const std::size_t i = pairs.size();
    if (!entry.is_object() || !entry.contains("A") || !entry.contains("B")) {
      fail(ErrorCode::kMalformedInput,
           "pair " + std::to_string(i) + " must be an object with \"A\" and \"B\"");
    }
    pairs.push_back({parse_index_list(entry["A"], i, "A"), parse_index_list(entry["B"], i, "B")});
  }
  return SampleTargetDistribution(doc["n"].get<int>(), std::move(pairs));
}

json estimator_to_json(const SemilinearEstimator& a, const SampleTargetDistribution& dist) {
  a.check_consistent(dist);
  json weights = json::array();
  for (std::size_t i = 0; i < dist.m(); ++i) {
    json entries = json::array();
    const auto& sample = dist.pair(i).sample;
    const auto w = a.weights(i);
    for (std::size_t k = 0; k < sample.size(); ++k) {
      if (w[k] != 0.0) entries.push_back(json::array({sample[k], w[k]}));
    }
    weights.push_back(std::move(entries));
  }
  return {{"n", dist.n()}, {"weights", std::move(weights)}};
}

SemilinearEstimator estimator_from_json(const json& doc, const SampleTargetDistribution& dist) {
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("weights") ||
      !doc["weights"].is_array() || !doc["n"].is_number_integer()) {
    fail(ErrorCode::kMalformedInput, "estimator must be an object with \"n\" and \"weights\"");
  }
  if (doc["n"].get<int>() != dist.n()) {
    fail(ErrorCode::kDimensionMismatch, "estimator population size differs from distribution");
  }
  std::vector<std::vector<std::pair<int, double>>> sparse;
  sparse.reserve(doc["weights"].size());
  for (const auto& entries : doc["weights"]) {
    if (!entries.is_array()) fail(ErrorCode::kMalformedInput, "weight list must be an array");
    auto& out = sparse.emplace_back();
    for (const auto& e : entries) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number()) {
        fail(ErrorCode::kMalformedInput, "weight entries must be [index, value]");
      }
      out.emplace_back(e[0].get<int>(), e[1].get<double>());
    }
  }
  return SemilinearEstimator::from_sparse(dist, sparse);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kMalformedInput, path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace wce::io
