#include "manifest.hpp"

#include "rtd/errors.hpp"

#include <Eigen/Core>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#ifndef RTD_VERSION
#define RTD_VERSION "unknown"
#endif

namespace rtd::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const nlohmann::json& config) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config.dump())));
    return buf;
}

std::string manifest_path_for(const std::string& artifact) {
    std::filesystem::path p(artifact);
    p.replace_extension(".manifest.json");
    return p.string();
}

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

nlohmann::json manifest_json(const RunManifest& run) {
    nlohmann::json versions{
        {"rtd", RTD_VERSION},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#ifdef __VERSION__
        {"compiler", __VERSION__},
#endif
    };
    return {{"command", run.command},
            {"config", run.config},
            {"config_hash", config_hash(run.config)},
            {"seed", run.seeds.empty() ? nlohmann::json(nullptr) : nlohmann::json(run.seeds.front())},
            {"seeds", run.seeds},
            {"artifacts", run.artifacts},
            {"versions", versions}};
}

void write_manifest(const std::string& path, const RunManifest& run) {
    auto j = manifest_json(run);
    j["created"] = utc_now();
    std::ofstream out(path);
    if (!out) throw InputError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

}  // namespace rtd::cli
