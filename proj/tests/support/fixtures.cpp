#include "fixtures.hpp"

#include <fstream>
#include <sstream>

namespace sliceparse::fixtures {

NetConfig miniature_net() {
  NetConfig c;
  c.input_rows = 8;
  c.input_cols = 8;
  c.conv1_channels = 4;
  c.conv2_channels = 4;
  c.mlp_widths = {16, 8};
  c.max_corners = 2;
  return c;
}

EncodedState random_encoded(std::mt19937_64& rng, const NetConfig& config) {
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  EncodedState s;
  s.image.resize(config.image_size());
  for (auto& v : s.image) v = unit(rng);
  s.extras.resize(config.extra_dim());
  for (auto& v : s.extras) v = unit(rng);
  return s;
}

CutAction random_action(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return {unit(rng), unit(rng), unit(rng), unit(rng), unit(rng)};
}

Transition random_transition(std::mt19937_64& rng, const NetConfig& config) {
  std::uniform_real_distribution<double> reward(-0.1, 2.0);
  Transition t;
  t.action = random_action(rng);
  t.reward = reward(rng);
  t.done = std::bernoulli_distribution(0.3)(rng);
  t.expert_action = random_action(rng);
  t.shape_id = 0;
  t.encoded_state = std::make_shared<const EncodedState>(random_encoded(rng, config));
  t.encoded_next_state = std::make_shared<const EncodedState>(random_encoded(rng, config));
  return t;
}

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  const auto base = std::filesystem::temp_directory_path();
  do {
    path_ = base / ("sliceparse-" + tag + "-" + std::to_string(rd()));
  } while (std::filesystem::exists(path_));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace sliceparse::fixtures
