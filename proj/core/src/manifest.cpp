#include "clab/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

namespace clab {

std::string bytes_digest(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string file_digest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + file.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes_digest(bytes.data(), bytes.size());
}

std::string manifest_to_json(const ExperimentManifest& m) {
  nlohmann::json j;
  j["tool"] = "clab";
  j["version"] = kToolVersion;
  j["command"] = m.command;
  j["config"] = nlohmann::json::parse(m.config_json);
  j["seeds"] = m.seeds;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["wall_clock_sec"] = m.wall_clock_sec;
  return j.dump(2) + "\n";
}

void save_manifest(const ExperimentManifest& m, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << manifest_to_json(m);
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace clab
