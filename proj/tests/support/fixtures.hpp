#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "sliceparse/neural.hpp"
#include "sliceparse/replay.hpp"

namespace sliceparse::fixtures {

/// 8x8 inputs, 4 channels, two corners per view.
NetConfig miniature_net();

EncodedState random_encoded(std::mt19937_64& rng, const NetConfig& config);
CutAction random_action(std::mt19937_64& rng);

/// Random reward, done flag and expert action; encodings filled directly.
Transition random_transition(std::mt19937_64& rng, const NetConfig& config);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace sliceparse::fixtures
