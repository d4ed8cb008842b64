#include "phi4trap/manifest.hpp"

#include <fstream>

#include "json.hpp"
#include "phi4trap/csv.hpp"

namespace phi4trap {

void RunManifest::write(const std::filesystem::path& dir) const {
    nlohmann::json j;
    j["tool"] = "phi4trap";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["parameters"] = parameters;
    j["input_hashes"] = input_hashes;
    j["duration_seconds"] = duration_seconds;
    auto& outs = j["outputs"] = nlohmann::json::array();
    for (const auto& path : outputs) {
        nlohmann::json o;
        o["path"] = path.filename().string();
        o["bytes"] = std::filesystem::file_size(path);
        o["hash"] = file_hash(path);
        outs.push_back(o);
    }
    std::ofstream os(dir / "manifest.json");
    os << j.dump(2) << "\n";
    if (!os) throw std::runtime_error("RunManifest: write failed");
}

}  // namespace phi4trap
