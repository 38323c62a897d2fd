#pragma once

#include <filesystem>

#include <json.hpp>

#include "topictrend/dynamics.hpp"
#include "topictrend/model.hpp"

namespace topictrend::persistence {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kFormatName = "topictrend-model";

// Writes the artifact into a sibling temp directory, manifest last, then
// renames it into place. An existing `dir` is refused with
// Error(artifact_exists) unless `force`. Returns the manifest.
nlohmann::json save_model(const TopicModel& model, const std::filesystem::path& dir, bool force = false);

// Throws Error(io_error) when the manifest is missing, Error(unsupported_version)
// for another format version or stopword list, Error(corrupt_artifact) naming
// the blob on size, checksum or count mismatches.
TopicModel load_model(const std::filesystem::path& dir);

nlohmann::json read_manifest(const std::filesystem::path& dir);

nlohmann::json overlays_to_json(const dynamics::OverlaySeries& overlays);
dynamics::OverlaySeries overlays_from_json(const nlohmann::json& j);

}  // namespace topictrend::persistence
