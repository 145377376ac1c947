#include "dirty/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace dirty {

std::string to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["flags"] = m.flags;
    j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
    j["version"] = m.version;
    j["duration_seconds"] = m.duration_seconds;
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.flags = j.at("flags").get<std::map<std::string, std::string>>();
    if (!j.at("seed").is_null())
        m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    m.duration_seconds = j.at("duration_seconds").get<double>();
    return m;
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
    return std::filesystem::path(output.string() + ".manifest.json");
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& output) {
    const auto path = manifest_path(output);
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << to_json(manifest);
}

} // namespace dirty
