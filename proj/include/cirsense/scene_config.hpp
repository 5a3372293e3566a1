#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "cirsense/channel_model.hpp"
#include "cirsense/types.hpp"

namespace cirsense {

/// A parsed scene file: system constants plus the scene itself. When the file
/// gives noise as an SSNR, noise_std is derived from the first target's gain
/// and ssnr_db keeps the requested value.
struct SceneFile {
    SystemConfig system;
    SceneSpec scene;
    std::optional<double> ssnr_db;
};

/// Parses scene JSON. Syntax errors report line and column; semantic errors
/// report the JSON pointer of the offending field. Unknown keys are rejected.
/// Throws Error(config).
SceneFile parse_scene(const std::string& text, const std::string& source = "<scene>");
SceneFile load_scene(const std::filesystem::path& path);

/// Parses only a "system" object (or an empty one for the defaults).
SystemConfig parse_system(const std::string& text);

}  // namespace cirsense
