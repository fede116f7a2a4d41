#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "wce/core.hpp"

namespace wce::io {

// Distribution file: {"n": int, "pairs": [{"A": [int...], "B": [int...]}...]}
nlohmann::json distribution_to_json(const SampleTargetDistribution& dist);
SampleTargetDistribution distribution_from_json(const nlohmann::json& doc);

// Estimator file: {"n": int, "weights": [[[index, value]...] ...]}
nlohmann::json estimator_to_json(const SemilinearEstimator& a, const SampleTargetDistribution& dist);
SemilinearEstimator estimator_from_json(const nlohmann::json& doc,
                                        const SampleTargetDistribution& dist);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace wce::io
