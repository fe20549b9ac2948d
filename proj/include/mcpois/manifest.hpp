#ifndef MCPOIS_MANIFEST_HPP
#define MCPOIS_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mcpois {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Reproducibility sidecar written next to every command's outputs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;  // path -> fnv1a-64 hex
  std::string version = kArtifactVersion;
  std::string timestamp;

  void add_input(const std::string& path);
  void write(const std::string& path) const;
};

std::string fnv1a_file_digest(const std::string& path);

}  // namespace mcpois

#endif
