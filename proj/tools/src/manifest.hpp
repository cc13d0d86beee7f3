#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rtd::cli {

std::uint64_t fnv1a64(std::string_view bytes);

/// Hash of the canonical (key-sorted, compact) dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// out.csv -> out.manifest.json, next to the artifact.
std::string manifest_path_for(const std::string& artifact);

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> artifacts;
};

/// Everything but "created" is a function of the inputs.
nlohmann::json manifest_json(const RunManifest& run);
void write_manifest(const std::string& path, const RunManifest& run);

}  // namespace rtd::cli
