#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchhoff/scenario.hpp"

namespace kirchhoff {

enum ExitCode : int {
    exit_ok = 0,
    exit_check_failed = 1,
    exit_parse = 2,
    exit_model = 3,
    exit_divergence = 4,
};

struct RunOptions {
    std::optional<std::filesystem::path> out;   ///< overrides the config's `output`
    std::optional<std::uint64_t> seed;          ///< overrides perturbation.seed
    std::optional<StudyKind> study;             ///< overrides the config's `study`
};

struct RunResult {
    int exit_code = exit_ok;
    std::string message;  ///< one-line summary or the error text
    std::filesystem::path out_dir;
    std::vector<std::string> files;  ///< relative to out_dir
    nlohmann::json manifest;
};

/// Loads, parses and runs a config file. Never throws for library, parse or I/O errors;
/// they are mapped to exit codes and still produce a manifest when the output directory
/// could be determined.
RunResult run(const std::filesystem::path& config_path, const RunOptions& options = {});

/// Runs an already loaded config; table paths resolve against `base_dir`.
RunResult run_config(const nlohmann::json& config, const std::filesystem::path& base_dir,
                     const RunOptions& options = {});

}  // namespace kirchhoff
