#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "sonicprint/features.hpp"
#include "sonicprint/stimulus.hpp"

namespace sonicprint {

// One JSON object per line:
//   {"spec_id": ..., "device_label": ..., "captured_at": ..., "values": [...]}
// Absent optional fields are written as null.
nlohmann::json feature_to_json(const FeatureVector& feature);
FeatureVector feature_from_json(const nlohmann::json& j);

void write_features(const std::filesystem::path& path, std::span<const FeatureVector> features);
std::vector<FeatureVector> read_features(const std::filesystem::path& path);

nlohmann::json spec_to_json(const StimulusSpec& spec);
StimulusSpec spec_from_json(const nlohmann::json& j);
StimulusSpec read_spec(const std::filesystem::path& path);

}  // namespace sonicprint
