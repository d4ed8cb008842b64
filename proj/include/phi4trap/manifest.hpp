#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace phi4trap {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility record written next to every CLI run's outputs.
/// Re-running with the recorded parameters (same thread count) reproduces
/// the listed files bit-identically.
struct RunManifest {
    std::string command;
    std::map<std::string, std::string> parameters;   // fully resolved
    std::map<std::string, std::string> input_hashes; // e.g. the config file
    std::vector<std::filesystem::path> outputs;      // hashed at write time
    double duration_seconds = 0.0;

    void write(const std::filesystem::path& dir) const;  // dir/manifest.json
};

}  // namespace phi4trap
