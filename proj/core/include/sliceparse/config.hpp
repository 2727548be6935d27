#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "sliceparse/env.hpp"
#include "sliceparse/neural.hpp"
#include "sliceparse/trainer.hpp"

namespace sliceparse {

/// `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Duplicate keys and lines without `=` are errors (reported with line number).
using KeyValues = std::map<std::string, std::string>;
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::filesystem::path& path);

/// Everything a run is configured by.
struct RunConfig {
  EnvConfig env;
  NetConfig net;
  TrainerConfig trainer;
  int demo_episodes = 1;
};

/// Applies recognized keys; throws std::invalid_argument on an unknown key
/// or an unparsable value. Keys:
///   env.max_steps env.lambda env.coverage_stop env.grid_resolution
///   env.slice_axis env.slice_count env.empty_penalty env.snap_to_corners
///   harris.k harris.window_radius harris.threshold harris.relative_threshold
///   harris.nms_radius harris.max_corners harris.smooth
///   net.input_rows net.input_cols net.conv1_channels net.conv2_channels
///   net.mlp_widths (comma separated) net.use_projections
///   trainer.gamma trainer.batch_size trainer.bc_weight trainer.target_period
///   trainer.lr_actor trainer.lr_critic trainer.momentum trainer.pretrain_iters
///   trainer.env_steps trainer.noise_sigma trainer.demo_capacity
///   trainer.agent_capacity trainer.refresh_demos
///   demos.episodes
void apply_key_values(RunConfig& config, const KeyValues& values);

/// Keeps derived fields consistent (net.max_steps, net.max_corners) and
/// validates every part.
void finalize(RunConfig& config);

/// The canonical `key = value` form of a config, one key per line, sorted.
std::string to_key_values(const RunConfig& config);

}  // namespace sliceparse
