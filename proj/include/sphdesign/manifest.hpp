#pragma once

// Provenance record attached to every CLI output.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sphd {

/// SHA-1 of "blob <size>\0" + content, as printed by git hash-object.
std::string git_blob_hash(std::string_view content);
/// Throws std::runtime_error when the file cannot be read.
std::string git_blob_hash_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  std::string config_path;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;  // file names only
  std::uint64_t seed = 0;
  nlohmann::json parameters = nlohmann::json::object();
  std::string hash;

  /// Hashes the command, seed, parameters and the content of every input
  /// (config included). Output names do not enter the hash.
  void seal();
  nlohmann::json to_json() const;
};

}  // namespace sphd
