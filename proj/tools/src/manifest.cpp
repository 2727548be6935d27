#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace sliceparse::cli {

std::string git_blob_hash(std::string_view content) {
  std::string object = "blob " + std::to_string(content.size());
  object.push_back('\0');
  object.append(content);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(object.data(), object.size(), digest.data(), &length, EVP_sha1(), nullptr) != 1) {
    throw std::runtime_error("SHA-1 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  nlohmann::json inputs = nlohmann::json::object();
  for (const auto& [k, v] : m.inputs) inputs[k] = v;
  const nlohmann::json doc{{"command", m.command},
                           {"config_paths", m.config_paths},
                           {"seed", m.seed},
                           {"shapes", m.shapes},
                           {"output_dir", m.output_dir},
                           {"inputs", inputs},
                           {"config", m.config_text},
                           {"config_hash", m.config_hash}};
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace sliceparse::cli
