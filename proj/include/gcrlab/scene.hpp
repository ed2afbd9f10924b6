#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcrlab/catalog.hpp"
#include "gcrlab/grid.hpp"
#include "gcrlab/metric.hpp"
#include "gcrlab/minimizer.hpp"
#include "gcrlab/weak_lab.hpp"

namespace gcr {

inline constexpr int kSchemaVersion = 1;

struct FieldsBlock {
  enum class Kind { Zero, Catalog, Random, Laminate, Dump };
  Kind kind = Kind::Zero;
  std::string catalog;  ///< catalog name, also the laminate base
  CatalogParams params;
  std::uint64_t seed = 0;
  double amplitude = 0.1;
  bool smooth = true;
  LaminateSpec laminate;
  int laminate_m = 1;
  std::filesystem::path dump_path;
};

struct ExperimentBlock {
  enum class Kind { Geometry, Residuals, DivCurlVerify, WeakLab, Minimize };
  enum class WeakMode { DivCurl, Framework };
  Kind kind = Kind::Residuals;
  // weaklab
  WeakMode mode = WeakMode::DivCurl;
  std::vector<int> inverse_eps;
  std::vector<TestFunction> test_functions;
  PairSpec pair;
  FrameworkSpec framework;
  // minimize
  MinimizeConfig minimize;
};

struct OutputBlock {
  std::optional<std::filesystem::path> dir;
  bool deterministic = false;
  bool csv = true;
  bool dump_fields = false;
};

struct Scene {
  int schema_version = kSchemaVersion;
  GridSpec grid;
  int codimension = 0;
  std::optional<MetricSpec> metric;  ///< empty: taken from catalog fields, else flat
  FieldsBlock fields;
  ExperimentBlock experiment;
  OutputBlock output;
  nlohmann::json source;  ///< document after overrides
  std::string hash;       ///< FNV-1a 64 of source.dump(), hex
};

std::string experiment_name(ExperimentBlock::Kind kind);

/// Applies "a.b.c=value" overrides; the value is parsed as JSON when possible,
/// otherwise kept as a string. Array elements are addressed by 1-based index.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Strict parse: unknown keys and wrong types throw ConfigError.
Scene parse_scene(const nlohmann::json& doc);

/// Cross-field checks that need no heavy computation (grid, metric
/// periodicity, catalog fit, laminate and eps compatibility, p > 2).
void validate_scene(const Scene& scene);

/// Reads, overrides, parses and validates. IoError if unreadable,
/// ConfigError for malformed JSON or schema violations.
Scene load_scene(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

std::string fnv1a_hex(std::string_view bytes);

/// The metric the scene runs on.
MetricSpec scene_metric(const Scene& scene);

/// Initial fields described by the fields block.
ImmersionFields scene_fields(const Scene& scene, const GridPtr& grid);

}  // namespace gcr
