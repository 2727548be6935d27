#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sliceparse::cli {

/// Hex SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_hash(std::string_view content);

/// What a command was run with. Written as manifest.json next to its outputs.
struct RunManifest {
  std::string command;
  std::vector<std::string> config_paths;
  std::uint64_t seed = 0;
  std::vector<std::string> shapes;
  std::string output_dir;
  /// Canonical key = value text of the effective configuration.
  std::string config_text;
  /// git_blob_hash(config_text).
  std::string config_hash;
  std::vector<std::pair<std::string, std::string>> inputs;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

}  // namespace sliceparse::cli
