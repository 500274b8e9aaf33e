#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace clab {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::filesystem::path& file);
std::string bytes_digest(const void* data, std::size_t size);

/// Written next to every artifact-producing run: enough to reproduce the run
/// and to check the emitted files byte-for-byte.
struct ExperimentManifest {
  std::string command;              // subcommand plus arguments
  std::string config_json = "{}";   // resolved configuration snapshot
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::string> inputs;   // path -> digest
  std::map<std::string, std::string> outputs;  // path -> digest
  double wall_clock_sec = 0.0;

  void add_input(const std::filesystem::path& file) { inputs[file.string()] = file_digest(file); }
  void add_output(const std::filesystem::path& file) { outputs[file.string()] = file_digest(file); }
};

std::string manifest_to_json(const ExperimentManifest& manifest);
void save_manifest(const ExperimentManifest& manifest, const std::filesystem::path& file);

}  // namespace clab
