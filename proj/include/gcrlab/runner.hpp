#pragma once

#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcrlab/scene.hpp"

namespace gcr {

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  bool deterministic = false;
  std::vector<std::string> overrides;
};

struct RunOutcome {
  int exit_code = 0;
  nlohmann::json summary;  ///< report on success, error document otherwise
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> files;
};

inline constexpr const char* kOutDirEnv = "GCR_LAB_OUT";

/// 2 configuration, 3 numerical, 4 I/O, 1 anything else.
int exit_code_for(const std::exception& e);
std::string error_type(const std::exception& e);

/// Runs a scene file end to end. Never throws; failures are reported in
/// the outcome and, when the output directory is usable, in error.json.
RunOutcome run_scene_file(const std::filesystem::path& scene_path, const RunOptions& options);

/// Runs an already loaded scene, writing reports into out_dir.
RunOutcome run_scene(const Scene& scene, const std::filesystem::path& out_dir, bool deterministic,
                     const std::string& scene_label = "");

/// Shortest round-trip decimal form, independent of the locale.
std::string format_number(double v);

}  // namespace gcr
