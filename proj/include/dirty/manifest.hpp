#pragma once
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dirty {

inline constexpr const char* kVersion = "1.0.0";

/// What produced an output file: enough to re-run it.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::map<std::string, std::string> flags;
    std::optional<std::uint64_t> seed;
    std::string version = kVersion;
    double duration_seconds = 0.0;
};

std::string to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

/// out.csv -> out.csv.manifest.json
std::filesystem::path manifest_path(const std::filesystem::path& output);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& output);

} // namespace dirty
