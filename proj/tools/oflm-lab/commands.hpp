#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "config.hpp"

namespace oflm::lab {

struct RunOptions {
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = ".";
    unsigned threads = 0;
    bool strict = false;
    std::string config_path;
};

QuadOptions quad_for(bool strict);

// Writes the subcommand's artifacts and manifest.json into out_dir.
// Library errors propagate; the caller maps them to exit codes.
void run(const std::string& subcommand, const ExperimentConfig& cfg, const RunOptions& opt);

}  // namespace oflm::lab
