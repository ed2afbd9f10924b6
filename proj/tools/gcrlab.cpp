#include <iostream>

#include <CLI11.hpp>

#include "gcrlab/catalog.hpp"
#include "gcrlab/parallel.hpp"
#include "gcrlab/runner.hpp"
#include "gcrlab/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gcrlab: Gauss-Codazzi-Ricci numerical laboratory"};
  app.set_version_flag("--version", gcr::kVersion);
  app.require_subcommand(1);

  std::string scene_path;
  std::string out_dir;
  bool deterministic = false;
  int threads = 1;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "run a scene and write reports");
  run->add_option("--scene", scene_path, "scene file (JSON)")->required();
  run->add_option("--out", out_dir, std::string("output directory (default $") + gcr::kOutDirEnv + " or ./gcrlab-out)");
  run->add_flag("--deterministic", deterministic, "omit timestamps and timings from reports");
  run->add_option("--threads", threads, "worker threads for node loops")->check(CLI::Range(1, 256));
  run->add_option("--override", overrides, "key=value applied to the scene before validation");

  auto* validate = app.add_subcommand("validate", "check a scene without computing");
  validate->add_option("--scene", scene_path, "scene file (JSON)")->required();
  validate->add_option("--override", overrides, "key=value applied to the scene before validation");

  auto* catalog = app.add_subcommand("catalog", "closed-form embedding scenes");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "list catalog scenes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (const auto& entry : gcr::catalog_entries()) std::cout << entry.name << "\t" << entry.description << "\n";
    return 0;
  }

  if (validate->parsed()) {
    try {
      gcr::load_scene(scene_path, overrides);
    } catch (const std::exception& e) {
      nlohmann::json doc = {{"error", {{"type", gcr::error_type(e)}, {"message", e.what()}, {"exit_code", 2}}}};
      std::cerr << doc.dump() << "\n";
      return 2;
    }
    std::cout << "ok\n";
    return 0;
  }

  gcr::set_thread_count(threads);
  gcr::RunOptions options;
  if (!out_dir.empty()) options.out_dir = out_dir;
  options.deterministic = deterministic;
  options.overrides = overrides;
  const gcr::RunOutcome outcome = gcr::run_scene_file(scene_path, options);
  if (outcome.exit_code != 0) {
    std::cerr << outcome.summary.dump() << "\n";
  } else {
    std::cout << "wrote " << outcome.files.size() << " files to " << outcome.out_dir.string() << "\n";
  }
  return outcome.exit_code;
}
