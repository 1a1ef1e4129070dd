// manifest.hpp - provenance record written next to every command's outputs
#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "empath/common.hpp"

namespace empath {

inline constexpr const char* kToolVersion = "0.1.0";

inline std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    std::string command;
    std::string config_path;  // empty when the command takes no config file
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    uint64_t seed = 0;
    int jobs = 1;
    std::string tool_version = kToolVersion;
    std::string started_at;
    std::string finished_at;
};

inline void to_json(nlohmann::json& j, const RunManifest& m) {
    j = {{"command", m.command},
         {"config_path", m.config_path},
         {"inputs", m.inputs},
         {"outputs", m.outputs},
         {"seed", m.seed},
         {"jobs", m.jobs},
         {"tool_version", m.tool_version},
         {"started_at", m.started_at},
         {"finished_at", m.finished_at}};
}

inline void write_manifest(RunManifest m, const std::string& dir) {
    m.finished_at = utc_timestamp();
    std::string path = dir + "/manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write file: " + path);
    out << nlohmann::json(m).dump(2) << '\n';
}

}  // namespace empath
