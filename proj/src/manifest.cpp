#include "mcpois/manifest.hpp"

#include <chrono>
#include <fstream>
#include <json.hpp>

#include "mcpois/errors.hpp"

namespace mcpois {

std::string fnv1a_file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void RunManifest::add_input(const std::string& path) {
  input_digests[path] = fnv1a_file_digest(path);
}

void RunManifest::write(const std::string& path) const {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = config;
  j["seed"] = seed;
  j["inputs"] = input_digests;
  j["version"] = version;
  j["timestamp"] = timestamp;
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace mcpois
