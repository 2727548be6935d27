#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bundle.hpp"
#include "sliceparse/config.hpp"
#include "sliceparse/env.hpp"
#include "sliceparse/trainer.hpp"

namespace sliceparse::cli {

// Each command throws on failure; the executable turns that into a one-line
// diagnostic and a nonzero exit status.

/// Seed from the flag, else SLICEPARSE_SEED, else 1.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

/// Defaults, then each file in order, then `seed`; validated.
RunConfig load_run_config(const std::vector<std::filesystem::path>& paths, std::uint64_t seed);

struct PrepareOptions {
  std::vector<std::filesystem::path> meshes;
  /// Built-in shapes by name; "experiment" expands to the experiment set.
  std::vector<std::string> synthetic;
  int resolution = 32;
  int slices = 12;
  Axis axis = Axis::Z;
  std::filesystem::path out;
  RunConfig config;
};
Bundle cmd_prepare(const PrepareOptions& options);

/// Corner CSV (file,row,col,response) for PGM silhouettes.
void cmd_corners(const std::vector<std::filesystem::path>& images, const HarrisParams& harris,
                 std::ostream& out);

struct DemoSummary {
  std::string shape;
  double episode_return = 0.0;
  std::size_t parts = 0;
  double surface_iou = 0.0;
};
struct DemosOptions {
  std::filesystem::path bundle;
  std::filesystem::path out;
  RunConfig config;
  int jobs = 1;
  std::vector<std::string> config_paths;
};
/// Writes the demonstration buffer to `out`, logs one summary line per shape
/// to `log`.
std::vector<DemoSummary> cmd_demos(const DemosOptions& options, std::ostream& log);

struct TrainOptions {
  std::filesystem::path bundle;
  /// Required for il and il+rl; never opened in ddpg mode.
  std::optional<std::filesystem::path> demos;
  TrainMode mode = TrainMode::IlRl;
  RunConfig config;
  std::filesystem::path out_dir;
  std::vector<std::string> config_paths;
};
/// Writes out_dir/checkpoint.spck, out_dir/report.csv and out_dir/manifest.json.
TrainingReport cmd_train(const TrainOptions& options);

/// How one reconstruction picks its cuts.
struct Variant {
  std::string name;
  bool expert = false;
  std::filesystem::path checkpoint;
  /// Zeroed projection channels and no corner snapping.
  bool no_projections = false;
};
/// "NAME=expert", "NAME=PATH" or "NAME=noproj:PATH".
Variant parse_variant(const std::string& spec);

struct Metrics {
  double surface_iou = 0.0;
  double chamfer_l1 = 0.0;
  std::size_t parts = 0;
  int steps = 0;
};

/// One greedy episode of the variant on a bundle shape.
EpisodeResult reconstruct_shape(const BundleShape& shape, const Variant& variant, const RunConfig& config);
Metrics metrics_of(const EpisodeResult& result);

struct ReconstructOptions {
  std::filesystem::path bundle;
  std::string shape;
  Variant variant;
  RunConfig config;
  std::filesystem::path out_dir;
};
/// Writes out_dir/<shape>.obj and out_dir/<shape>.metrics.json.
Metrics cmd_reconstruct(const ReconstructOptions& options);

void write_metrics_json(const Metrics& metrics, const std::filesystem::path& path);
Metrics read_metrics_json(const std::filesystem::path& path);

struct EvalOptions {
  std::filesystem::path bundle;
  /// Empty means every shape of the bundle.
  std::vector<std::string> shapes;
  std::vector<Variant> variants;
  RunConfig config;
};
struct EvalRow {
  std::string shape;
  std::string variant;
  Metrics metrics;
};
/// Per-shape, per-variant rows followed by one "mean" row per variant.
std::vector<EvalRow> cmd_eval(const EvalOptions& options);
void write_eval_csv(const std::vector<EvalRow>& rows, std::ostream& out);

}  // namespace sliceparse::cli
