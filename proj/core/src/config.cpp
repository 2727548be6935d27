#include "sliceparse/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace sliceparse {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument("config: bad value '" + v + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean '" + v + "' for " + key);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
  return out;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(number) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": duplicate key " + key);
    }
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_key_values(in);
}

void apply_key_values(RunConfig& c, const KeyValues& values) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto as_int = [](int& field) -> Setter { return [&field](const std::string& k, const std::string& v) { field = parse_number<int>(k, v); }; };
  auto as_ll = [](long long& field) -> Setter { return [&field](const std::string& k, const std::string& v) { field = parse_number<long long>(k, v); }; };
  auto as_size = [](std::size_t& field) -> Setter { return [&field](const std::string& k, const std::string& v) { field = parse_number<std::size_t>(k, v); }; };
  auto as_real = [](double& field) -> Setter { return [&field](const std::string& k, const std::string& v) { field = parse_number<double>(k, v); }; };
  auto as_bool = [](bool& field) -> Setter { return [&field](const std::string& k, const std::string& v) { field = parse_bool(k, v); }; };

  const std::map<std::string, Setter> setters{
      {"env.max_steps", as_int(c.env.max_steps)},
      {"env.lambda", as_real(c.env.lambda)},
      {"env.coverage_stop", as_real(c.env.coverage_stop)},
      {"env.grid_resolution", as_int(c.env.grid_resolution)},
      {"env.slice_axis", [&](const std::string&, const std::string& v) { c.env.slice_axis = parse_axis(v); }},
      {"env.slice_count", as_int(c.env.slice_count)},
      {"env.empty_penalty", as_real(c.env.empty_penalty)},
      {"env.snap_to_corners", as_bool(c.env.snap_to_corners)},
      {"harris.k", as_real(c.env.harris.k)},
      {"harris.window_radius", as_int(c.env.harris.window_radius)},
      {"harris.threshold", as_real(c.env.harris.threshold)},
      {"harris.relative_threshold", as_bool(c.env.harris.relative_threshold)},
      {"harris.nms_radius", as_int(c.env.harris.nms_radius)},
      {"harris.max_corners", as_int(c.env.harris.max_corners)},
      {"harris.smooth", as_bool(c.env.harris.smooth)},
      {"net.input_rows", as_int(c.net.input_rows)},
      {"net.input_cols", as_int(c.net.input_cols)},
      {"net.conv1_channels", as_int(c.net.conv1_channels)},
      {"net.conv2_channels", as_int(c.net.conv2_channels)},
      {"net.mlp_widths", [&](const std::string& k, const std::string& v) { c.net.mlp_widths = parse_int_list(k, v); }},
      {"net.use_projections", as_bool(c.net.use_projections)},
      {"trainer.gamma", as_real(c.trainer.gamma)},
      {"trainer.batch_size", as_int(c.trainer.batch_size)},
      {"trainer.bc_weight", as_real(c.trainer.bc_weight)},
      {"trainer.target_period", as_int(c.trainer.target_period)},
      {"trainer.lr_actor", as_real(c.trainer.lr_actor)},
      {"trainer.lr_critic", as_real(c.trainer.lr_critic)},
      {"trainer.momentum", as_real(c.trainer.momentum)},
      {"trainer.pretrain_iters", as_int(c.trainer.pretrain_iters)},
      {"trainer.env_steps", as_ll(c.trainer.env_steps)},
      {"trainer.noise_sigma", as_real(c.trainer.noise_sigma)},
      {"trainer.demo_capacity", as_size(c.trainer.demo_capacity)},
      {"trainer.agent_capacity", as_size(c.trainer.agent_capacity)},
      {"trainer.refresh_demos", as_bool(c.trainer.refresh_demos)},
      {"demos.episodes", as_int(c.demo_episodes)},
  };
  for (const auto& [key, value] : values) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument("config: unknown key " + key);
    it->second(key, value);
  }
}

void finalize(RunConfig& c) {
  c.net.max_steps = c.env.max_steps;
  c.net.max_corners = c.env.harris.max_corners;
  check(c.env);
  check(c.net);
  check(c.trainer);
  if (c.demo_episodes < 1) throw std::invalid_argument("config: demos.episodes must be >= 1");
}

std::string to_key_values(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  std::map<std::string, std::string> kv;
  auto put = [&](const std::string& k, const auto& v) {
    std::ostringstream s;
    s.precision(17);
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, bool>) {
      s << (v ? "true" : "false");
    } else {
      s << v;
    }
    kv[k] = s.str();
  };
  put("env.max_steps", c.env.max_steps);
  put("env.lambda", c.env.lambda);
  put("env.coverage_stop", c.env.coverage_stop);
  put("env.grid_resolution", c.env.grid_resolution);
  put("env.slice_axis", to_string(c.env.slice_axis));
  put("env.slice_count", c.env.slice_count);
  put("env.empty_penalty", c.env.empty_penalty);
  put("env.snap_to_corners", c.env.snap_to_corners);
  put("harris.k", c.env.harris.k);
  put("harris.window_radius", c.env.harris.window_radius);
  put("harris.threshold", c.env.harris.threshold);
  put("harris.relative_threshold", c.env.harris.relative_threshold);
  put("harris.nms_radius", c.env.harris.nms_radius);
  put("harris.max_corners", c.env.harris.max_corners);
  put("harris.smooth", c.env.harris.smooth);
  put("net.input_rows", c.net.input_rows);
  put("net.input_cols", c.net.input_cols);
  put("net.conv1_channels", c.net.conv1_channels);
  put("net.conv2_channels", c.net.conv2_channels);
  std::string widths;
  for (std::size_t i = 0; i < c.net.mlp_widths.size(); ++i) {
    widths += (i ? "," : "") + std::to_string(c.net.mlp_widths[i]);
  }
  put("net.mlp_widths", widths);
  put("net.use_projections", c.net.use_projections);
  put("trainer.gamma", c.trainer.gamma);
  put("trainer.batch_size", c.trainer.batch_size);
  put("trainer.bc_weight", c.trainer.bc_weight);
  put("trainer.target_period", c.trainer.target_period);
  put("trainer.lr_actor", c.trainer.lr_actor);
  put("trainer.lr_critic", c.trainer.lr_critic);
  put("trainer.momentum", c.trainer.momentum);
  put("trainer.pretrain_iters", c.trainer.pretrain_iters);
  put("trainer.env_steps", c.trainer.env_steps);
  put("trainer.noise_sigma", c.trainer.noise_sigma);
  put("trainer.demo_capacity", c.trainer.demo_capacity);
  put("trainer.agent_capacity", c.trainer.agent_capacity);
  put("trainer.refresh_demos", c.trainer.refresh_demos);
  put("demos.episodes", c.demo_episodes);
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  return out.str();
}

}  // namespace sliceparse
