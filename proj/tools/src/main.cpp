#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace sliceparse;
using namespace sliceparse::cli;

namespace {

struct Common {
  std::vector<std::string> config_paths;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool verbose = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_paths, "key = value config file (repeatable, later files win)")
        ->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "seed for all randomness (default: SLICEPARSE_SEED, else 1)");
    app->add_option("--jobs", jobs, "worker thread cap")->check(CLI::PositiveNumber);
    app->add_flag("-v,--verbose", verbose, "debug logging");
  }

  RunConfig config() const {
    std::vector<fs::path> paths(config_paths.begin(), config_paths.end());
    return load_run_config(paths, resolve_seed(seed));
  }
};

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("sliceparse");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Reconstruct solids from planar slices by learned shape parsing"};
  app.require_subcommand(1);
  Common common;

  auto* prepare = app.add_subcommand("prepare", "voxelize, slice and project shapes into a bundle directory");
  std::vector<std::string> meshes, synthetic;
  std::string out, axis = "z";
  std::optional<int> resolution, slices;
  prepare->add_option("meshes", meshes, "OBJ or OFF files");
  prepare->add_option("--synthetic", synthetic, "built-in shape name, or 'experiment' for the experiment set");
  prepare->add_option("--resolution", resolution, "cells along the longest extent (default env.grid_resolution)");
  prepare->add_option("--slices", slices, "cross-section count (default env.slice_count)");
  prepare->add_option("--axis", axis, "slice axis: x, y or z");
  prepare->add_option("-o,--out", out, "bundle directory")->required();
  common.attach(prepare);

  auto* corners = app.add_subcommand("corners", "print Harris corners of PGM silhouettes as CSV");
  std::vector<std::string> images;
  corners->add_option("images", images, "PGM files")->required();
  common.attach(corners);

  auto* demos = app.add_subcommand("demos", "record expert demonstrations over a bundle");
  std::string bundle, demos_out;
  demos->add_option("bundle", bundle, "bundle directory")->required();
  demos->add_option("-o,--out", demos_out, "demonstrations file")->required();
  common.attach(demos);

  auto* train = app.add_subcommand("train", "train a cut policy");
  std::string demos_in, mode = "il+rl", out_dir;
  train->add_option("bundle", bundle, "bundle directory")->required();
  train->add_option("--demos", demos_in, "demonstrations file (il, il+rl)");
  train->add_option("--mode", mode, "ddpg, il or il+rl")->check(CLI::IsMember({"ddpg", "il", "il+rl"}));
  train->add_option("-o,--out", out_dir, "output directory")->required();
  common.attach(train);

  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct one bundle shape to OBJ and metrics JSON");
  std::string shape, checkpoint;
  bool use_expert = false, no_projections = false;
  reconstruct->add_option("bundle", bundle, "bundle directory")->required();
  reconstruct->add_option("--shape", shape, "shape name within the bundle")->required();
  auto* ckpt_opt = reconstruct->add_option("--checkpoint", checkpoint, "trained checkpoint");
  auto* expert_opt = reconstruct->add_flag("--expert", use_expert, "cut with the heuristic expert");
  ckpt_opt->excludes(expert_opt);
  reconstruct->add_flag("--no-projections", no_projections,
                        "baseline: zero projection channels and cut at raw action points");
  reconstruct->add_option("-o,--out", out_dir, "output directory")->required();
  common.attach(reconstruct);

  auto* eval = app.add_subcommand("eval", "compare variants over bundle shapes as CSV");
  std::vector<std::string> variants, shapes;
  std::string csv_out;
  eval->add_option("bundle", bundle, "bundle directory")->required();
  eval->add_option("--variant", variants, "NAME=expert, NAME=CHECKPOINT or NAME=noproj:CHECKPOINT")->required();
  eval->add_option("--shape", shapes, "restrict to these shapes");
  eval->add_option("-o,--out", csv_out, "CSV path (default stdout)");
  common.attach(eval);

  CLI11_PARSE(app, argc, argv);
  if (common.verbose) spdlog::set_level(spdlog::level::debug);

  try {
    const RunConfig config = common.config();
    if (prepare->parsed()) {
      PrepareOptions o;
      o.meshes.assign(meshes.begin(), meshes.end());
      o.synthetic = synthetic;
      o.resolution = resolution.value_or(config.env.grid_resolution);
      o.slices = slices.value_or(config.env.slice_count);
      o.axis = parse_axis(axis);
      o.out = out;
      o.config = config;
      cmd_prepare(o);
    } else if (corners->parsed()) {
      cmd_corners(std::vector<fs::path>(images.begin(), images.end()), config.env.harris, std::cout);
    } else if (demos->parsed()) {
      cmd_demos({bundle, demos_out, config, common.jobs, common.config_paths}, std::cout);
    } else if (train->parsed()) {
      TrainOptions o;
      o.bundle = bundle;
      o.mode = parse_train_mode(mode);
      if (!demos_in.empty()) o.demos = fs::path(demos_in);
      o.config = config;
      o.out_dir = out_dir;
      o.config_paths = common.config_paths;
      cmd_train(o);
    } else if (reconstruct->parsed()) {
      if (!use_expert && checkpoint.empty()) throw std::invalid_argument("reconstruct needs --checkpoint or --expert");
      ReconstructOptions o;
      o.bundle = bundle;
      o.shape = shape;
      o.variant.name = use_expert ? "expert" : "checkpoint";
      o.variant.expert = use_expert;
      o.variant.checkpoint = checkpoint;
      o.variant.no_projections = no_projections;
      o.config = config;
      o.out_dir = out_dir;
      cmd_reconstruct(o);
    } else if (eval->parsed()) {
      EvalOptions o;
      o.bundle = bundle;
      o.shapes = shapes;
      for (const auto& v : variants) o.variants.push_back(parse_variant(v));
      o.config = config;
      const auto rows = cmd_eval(o);
      if (csv_out.empty()) {
        write_eval_csv(rows, std::cout);
      } else {
        std::ofstream f(csv_out);
        write_eval_csv(rows, f);
        if (!f) throw std::runtime_error("cannot write " + csv_out);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "sliceparse: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
