#pragma once

#include <filesystem>

#include "fastcav/cav.hpp"

namespace fastcav {

/// Writes `cav` as a rank-1 float64 CAVK tensor of length d + 1 (direction,
/// then intercept) at `path`, plus a JSON sidecar at `path` + ".json" with
/// method, names, timing and fit metadata.
void save_cav(const Cav& cav, const std::filesystem::path& path);

/// Reads a CAV written by save_cav. The sidecar is optional; without it the
/// method defaults to fastcav and names are empty.
Cav load_cav(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace fastcav
