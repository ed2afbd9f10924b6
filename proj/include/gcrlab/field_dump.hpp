#pragma once

#include <filesystem>

#include <json.hpp>

#include "gcrlab/immersion.hpp"

namespace gcr {

/// Binary dump of (h, kappa).
///
/// Header: "GCRF", u32 version, u32 d, u32 n_co, d x u32 resolution,
/// d x f64 box length, then the h and kappa index signatures as
/// u32 length + bytes. Body: little-endian f64, node-major; at each node
/// the stored components of h followed by those of kappa.
/// A JSON sidecar `<path>.json` repeats the header in readable form.
inline constexpr std::uint32_t kFieldDumpVersion = 1;

void write_field_dump(const std::filesystem::path& path, const ImmersionFields& fields,
                      const nlohmann::json& extra = nlohmann::json::object());

struct FieldDump {
  GridSpec grid;
  ImmersionFields fields;
};

/// Throws IoError for unreadable or malformed files.
FieldDump read_field_dump(const std::filesystem::path& path);

}  // namespace gcr
