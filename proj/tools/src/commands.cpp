#include "commands.hpp"

#include <spdlog/spdlog.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "manifest.hpp"
#include "sliceparse/expert.hpp"
#include "sliceparse/geomcore.hpp"
#include "sliceparse/image_io.hpp"
#include "sliceparse/neural.hpp"
#include "sliceparse/replay.hpp"
#include "sliceparse/shapes.hpp"

namespace sliceparse::cli {

namespace fs = std::filesystem;

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SLICEPARSE_SEED"); env && *env) {
    const std::string text(env);
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw std::invalid_argument("SLICEPARSE_SEED is not an unsigned integer: " + text);
    }
    return seed;
  }
  return 1;
}

RunConfig load_run_config(const std::vector<fs::path>& paths, std::uint64_t seed) {
  RunConfig config;
  for (const auto& p : paths) apply_key_values(config, read_key_values(p));
  config.trainer.seed = seed;
  config.net.seed = seed;
  finalize(config);
  return config;
}

namespace {

// The bundle's slicing wins over the configured one.
EnvConfig env_for(const Bundle& bundle, const RunConfig& config) {
  EnvConfig env = config.env;
  env.slice_axis = bundle.slice_axis;
  env.slice_count = bundle.slice_count;
  env.grid_resolution = bundle.resolution;
  check(env);
  return env;
}

Bundle read_nonempty_bundle(const fs::path& dir) {
  Bundle b = read_bundle(dir);
  if (b.shapes.empty()) throw std::invalid_argument("bundle " + dir.string() + " has no shapes");
  return b;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunManifest manifest_for(const std::string& command, const RunConfig& config,
                         const std::vector<std::string>& config_paths, const Bundle& bundle,
                         const fs::path& out_dir) {
  RunManifest m;
  m.command = command;
  m.config_paths = config_paths;
  m.seed = config.trainer.seed;
  for (const auto& s : bundle.shapes) m.shapes.push_back(s.name);
  m.output_dir = out_dir.string();
  m.config_text = to_key_values(config);
  m.config_hash = git_blob_hash(m.config_text);
  return m;
}

}  // namespace

Bundle cmd_prepare(const PrepareOptions& o) {
  if (o.out.empty()) throw std::invalid_argument("prepare needs an output directory");
  if (o.meshes.empty() && o.synthetic.empty()) throw std::invalid_argument("prepare needs mesh files or --synthetic shapes");
  if (o.resolution < 3) throw std::invalid_argument("resolution must be at least 3");
  if (o.slices < 1) throw std::invalid_argument("slice count must be positive");
  Bundle b;
  b.resolution = o.resolution;
  b.slice_axis = o.axis;
  b.slice_count = o.slices;
  std::map<std::string, int> used;
  auto unique_name = [&](const std::string& base) {
    const int n = used[base]++;
    return n == 0 ? base : base + "_" + std::to_string(n + 1);
  };
  for (const auto& path : o.meshes) {
    if (!fs::exists(path)) throw std::runtime_error("mesh file not found: " + path.string());
    BundleShape s;
    s.reference = read_mesh(path);
    s.grid = voxelize(s.reference, o.resolution);
    s.name = unique_name(path.stem().string());
    s.source = path.string();
    b.shapes.push_back(std::move(s));
  }
  std::vector<std::string> names;
  for (const auto& n : o.synthetic) {
    if (n == "experiment") {
      for (auto& shape : experiment_set(o.resolution)) names.push_back(shape.name);
    } else {
      names.push_back(n);
    }
  }
  for (const auto& n : names) {
    BundleShape s;
    s.grid = make_shape(n, o.resolution).grid;
    s.reference = grid_mesh(s.grid);
    s.name = unique_name(n);
    s.source = "synthetic:" + n;
    b.shapes.push_back(std::move(s));
  }
  for (const auto& s : b.shapes) {
    if (!s.grid.any()) throw std::runtime_error("shape " + s.name + " voxelizes to an empty grid");
    spdlog::info("prepared {}: {}x{}x{} cells, {} occupied", s.name, s.grid.dims().nx, s.grid.dims().ny,
                 s.grid.dims().nz, s.grid.count());
  }
  fs::create_directories(o.out);
  write_bundle(b, o.out, o.config.env.harris);
  return b;
}

void cmd_corners(const std::vector<fs::path>& images, const HarrisParams& harris, std::ostream& out) {
  if (images.empty()) throw std::invalid_argument("corners needs at least one PGM image");
  check(harris);
  out << "file,row,col,response\n" << std::setprecision(17);
  for (const auto& path : images) {
    ProjectionImage img;
    img.pixels = read_pgm_mask(path);
    for (const auto& c : detect_corners(img, harris).points) {
      out << path.string() << ',' << c.row << ',' << c.col << ',' << c.response << '\n';
    }
  }
}

std::vector<DemoSummary> cmd_demos(const DemosOptions& o, std::ostream& log) {
  const Bundle bundle = read_nonempty_bundle(o.bundle);
  const EnvConfig env = env_for(bundle, o.config);
  const std::vector<VoxelGrid> grids = grids_of(bundle);
  const auto demos = generate_demonstrations(grids, env, o.config.demo_episodes, o.jobs);

  ReplayBuffer buffer(BufferKind::Demo, o.config.trainer.demo_capacity);
  std::size_t refused = 0;
  for (const auto& d : demos) {
    for (const auto& t : d.transitions) refused += buffer.add(t) ? 0 : 1;
  }
  if (refused > 0) spdlog::warn("demo buffer full: {} transitions dropped", refused);
  if (!o.out.parent_path().empty()) fs::create_directories(o.out.parent_path());
  save_buffer(buffer, o.out);

  // The expert is deterministic, so one replay per shape reproduces every
  // stored episode and yields its metrics.
  std::vector<DemoSummary> out;
  const Policy expert = [](const ParseState& s) { return expert_action(s); };
  for (const auto& shape : bundle.shapes) {
    const EpisodeResult r = run_episode(shape.grid, env, expert, &shape.reference);
    out.push_back({shape.name, r.total_reward, r.parts.size(), r.surface_iou});
    log << shape.name << ": return=" << r.total_reward << " parts=" << r.parts.size()
        << " surface_iou=" << r.surface_iou << '\n';
  }

  RunManifest m = manifest_for("demos", o.config, o.config_paths, bundle, o.out.parent_path());
  m.inputs = {{"bundle", o.bundle.string()}, {"demos_file", o.out.string()},
              {"demos_hash", git_blob_hash(read_file(o.out))}};
  write_manifest(m, fs::path(o.out.string() + ".manifest.json"));
  return out;
}

TrainingReport cmd_train(const TrainOptions& o) {
  if (o.out_dir.empty()) throw std::invalid_argument("train needs an output directory");
  const Bundle bundle = read_nonempty_bundle(o.bundle);
  const EnvConfig env = env_for(bundle, o.config);
  const std::vector<VoxelGrid> grids = grids_of(bundle);

  std::optional<ReplayBuffer> demos;
  if (o.mode != TrainMode::Ddpg) {
    if (!o.demos) throw std::invalid_argument("mode " + to_string(o.mode) + " needs a demonstrations file");
    demos = load_buffer(*o.demos);
    if (demos->kind() != BufferKind::Demo) throw std::invalid_argument("not a demonstrations file: " + o.demos->string());
    for (const auto& t : demos->items()) {
      if (t.shape_id < 0 || t.shape_id >= static_cast<int>(grids.size())) {
        throw std::invalid_argument("demonstrations refer to shapes missing from the bundle");
      }
    }
  }

  NetConfig net = o.config.net;
  TrainerConfig tc = o.config.trainer;
  if (o.mode == TrainMode::Ddpg) tc.bc_weight = 0.0;
  Trainer trainer(net, tc);
  spdlog::info("training mode {} on {} shapes", to_string(o.mode), grids.size());
  TrainingReport report = run_training(trainer, o.mode, grids, env, demos ? &*demos : nullptr);

  fs::create_directories(o.out_dir);
  save_checkpoint(trainer.checkpoint(), o.out_dir / "checkpoint.spck");
  {
    std::ofstream csv(o.out_dir / "report.csv");
    report.write_csv(csv);
    if (!csv) throw std::runtime_error("cannot write report.csv");
  }
  RunManifest m = manifest_for("train", o.config, o.config_paths, bundle, o.out_dir);
  m.inputs = {{"bundle", o.bundle.string()}, {"mode", to_string(o.mode)}};
  if (o.demos && o.mode != TrainMode::Ddpg) m.inputs.emplace_back("demos", o.demos->string());
  m.inputs.emplace_back("checkpoint_hash", git_blob_hash(read_file(o.out_dir / "checkpoint.spck")));
  write_manifest(m, o.out_dir / "manifest.json");
  return report;
}

Variant parse_variant(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw std::invalid_argument("variant must look like NAME=expert, NAME=PATH or NAME=noproj:PATH: " + spec);
  }
  Variant v;
  v.name = spec.substr(0, eq);
  std::string rest = spec.substr(eq + 1);
  if (rest == "expert") {
    v.expert = true;
    return v;
  }
  if (rest.starts_with("noproj:")) {
    v.no_projections = true;
    rest = rest.substr(7);
  }
  if (rest == "expert") {
    v.expert = true;
  } else {
    v.checkpoint = rest;
  }
  return v;
}

EpisodeResult reconstruct_shape(const BundleShape& shape, const Variant& variant, const RunConfig& config) {
  EnvConfig env = config.env;
  if (variant.no_projections) env.snap_to_corners = false;
  if (variant.expert) {
    return run_episode(shape.grid, env, [](const ParseState& s) { return expert_action(s); }, &shape.reference);
  }
  if (variant.checkpoint.empty()) throw std::invalid_argument("variant " + variant.name + " needs a checkpoint or --expert");
  Checkpoint ckpt = load_checkpoint(variant.checkpoint);
  NetConfig net = ckpt.config;
  if (variant.no_projections) net.use_projections = false;
  const Network actor(net, NetKind::Actor);
  if (ckpt.actor.size() != actor.param_count()) throw std::runtime_error("checkpoint does not match its network config");
  const Policy policy = [&](const ParseState& s) { return actor_action(actor, ckpt.actor, encode_state(s, net)); };
  return run_episode(shape.grid, env, policy, &shape.reference);
}

Metrics metrics_of(const EpisodeResult& r) { return {r.surface_iou, r.chamfer_l1, r.parts.size(), r.steps}; }

void write_metrics_json(const Metrics& m, const fs::path& path) {
  const nlohmann::json doc{{"surface_iou", m.surface_iou},
                           {"chamfer_l1", m.chamfer_l1},
                           {"parts", m.parts},
                           {"steps", m.steps}};
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

Metrics read_metrics_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto doc = nlohmann::json::parse(in);
  return {doc.at("surface_iou").get<double>(), doc.at("chamfer_l1").get<double>(),
          doc.at("parts").get<std::size_t>(), doc.at("steps").get<int>()};
}

Metrics cmd_reconstruct(const ReconstructOptions& o) {
  if (o.out_dir.empty()) throw std::invalid_argument("reconstruct needs an output directory");
  const Bundle bundle = read_nonempty_bundle(o.bundle);
  RunConfig config = o.config;
  config.env = env_for(bundle, o.config);
  const BundleShape& shape = bundle.find(o.shape);
  const EpisodeResult r = reconstruct_shape(shape, o.variant, config);
  const Metrics m = metrics_of(r);
  fs::create_directories(o.out_dir);
  write_obj(r.final_mesh, o.out_dir / (shape.name + ".obj"));
  write_metrics_json(m, o.out_dir / (shape.name + ".metrics.json"));
  spdlog::info("{}: surface_iou={:.4f} chamfer_l1={:.4f} parts={} steps={}", shape.name, m.surface_iou,
               m.chamfer_l1, m.parts, m.steps);
  return m;
}

std::vector<EvalRow> cmd_eval(const EvalOptions& o) {
  if (o.variants.empty()) throw std::invalid_argument("eval needs at least one variant");
  const Bundle bundle = read_nonempty_bundle(o.bundle);
  RunConfig config = o.config;
  config.env = env_for(bundle, o.config);
  std::vector<const BundleShape*> shapes;
  if (o.shapes.empty()) {
    for (const auto& s : bundle.shapes) shapes.push_back(&s);
  } else {
    for (const auto& n : o.shapes) shapes.push_back(&bundle.find(n));
  }
  std::vector<EvalRow> rows, means;
  for (const auto& v : o.variants) {
    Metrics sum;
    double parts = 0.0, steps = 0.0;
    for (const auto* s : shapes) {
      const Metrics m = metrics_of(reconstruct_shape(*s, v, config));
      rows.push_back({s->name, v.name, m});
      sum.surface_iou += m.surface_iou;
      sum.chamfer_l1 += m.chamfer_l1;
      parts += static_cast<double>(m.parts);
      steps += m.steps;
    }
    const double n = static_cast<double>(shapes.size());
    Metrics mean{sum.surface_iou / n, sum.chamfer_l1 / n, static_cast<std::size_t>(std::lround(parts / n)),
                 static_cast<int>(std::lround(steps / n))};
    means.push_back({"mean", v.name, mean});
  }
  rows.insert(rows.end(), means.begin(), means.end());
  return rows;
}

void write_eval_csv(const std::vector<EvalRow>& rows, std::ostream& out) {
  out << "shape,variant,surface_iou,chamfer_l1,parts,steps\n" << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.shape << ',' << r.variant << ',' << r.metrics.surface_iou << ',' << r.metrics.chamfer_l1 << ','
        << r.metrics.parts << ',' << r.metrics.steps << '\n';
  }
}

}  // namespace sliceparse::cli
