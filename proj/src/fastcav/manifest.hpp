#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fastcav {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct LayerSpec {
  std::string name;
  std::size_t dim = 0;
};

/// A named set of activations (a concept set or a random set), one file per
/// layer, or per (layer, epoch) when the manifest lists epochs.
struct ActivationSet {
  std::string name;
  std::map<std::pair<std::string, std::string>, std::filesystem::path> files;

  /// Resolved path for `layer` (and `epoch`, empty when the manifest has none).
  const std::filesystem::path& path(const std::string& layer, const std::string& epoch = {}) const;
};

struct ExperimentManifest {
  std::filesystem::path source;
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::string> methods;
  std::vector<LayerSpec> layers;
  std::vector<std::string> epochs;
  std::vector<ActivationSet> concepts;
  std::vector<ActivationSet> random_sets;

  const LayerSpec& layer(const std::string& name) const;
  bool has_epochs() const noexcept { return !epochs.empty(); }
};

/// Parses, resolves paths relative to the manifest's directory, and checks
/// every referenced tensor's header against its layer width.
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// Writes `m` as JSON; file paths are stored relative to the output directory
/// when they live beneath it.
void save_manifest(const ExperimentManifest& m, const std::filesystem::path& path);

}  // namespace fastcav
