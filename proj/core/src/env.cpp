#include "sliceparse/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "sliceparse/surfacer.hpp"

namespace sliceparse {

void check(const EnvConfig& config) {
  if (config.max_steps < 1) throw std::invalid_argument("env: max_steps must be >= 1");
  if (!(config.lambda >= 0.0)) throw std::invalid_argument("env: lambda must be >= 0");
  if (!(config.coverage_stop > 0.0 && config.coverage_stop <= 1.0)) {
    throw std::invalid_argument("env: coverage_stop must be in (0, 1]");
  }
  if (config.grid_resolution < 3) throw std::invalid_argument("env: grid_resolution must be >= 3");
  if (config.slice_count < 1) throw std::invalid_argument("env: slice_count must be >= 1");
  check(config.harris);
}

CutAction CutAction::clamped() const {
  auto unit = [](double v) { return std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0); };
  return {unit(x1), unit(y1), unit(x2), unit(y2), unit(c)};
}

View CutAction::view() const {
  const double cc = clamped().c;
  return static_cast<View>(std::clamp(static_cast<int>(std::floor(3.0 * cc)), 0, 2));
}

double view_code(View view) { return (static_cast<int>(view) + 0.5) / 3.0; }

Point2 normalize_pixel(double row, double col, int rows, int cols) {
  return {rows > 1 ? row / (rows - 1) : 0.0, cols > 1 ? col / (cols - 1) : 0.0};
}

Point2 denormalize_point(double x, double y, int rows, int cols) {
  return {x * std::max(rows - 1, 0), y * std::max(cols - 1, 0)};
}

namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

AxisHistogram AxisHistogram::of(const VoxelGrid& grid) {
  AxisHistogram h;
  const GridDims d = grid.dims();
  for (int a = 0; a < 3; ++a) h.layers[static_cast<std::size_t>(a)].assign(static_cast<std::size_t>(d[a]), 0);
  for (int i = 0; i < d.nx; ++i) {
    for (int j = 0; j < d.ny; ++j) {
      for (int k = 0; k < d.nz; ++k) {
        if (!grid(i, j, k)) continue;
        ++h.layers[0][static_cast<std::size_t>(i)];
        ++h.layers[1][static_cast<std::size_t>(j)];
        ++h.layers[2][static_cast<std::size_t>(k)];
        ++h.total;
      }
    }
  }
  return h;
}

long long AxisHistogram::below(int axis, int coord) const {
  const auto& l = layers[static_cast<std::size_t>(axis)];
  const auto end = static_cast<std::size_t>(std::clamp(coord, 0, static_cast<int>(l.size())));
  long long s = 0;
  for (std::size_t n = 0; n < end; ++n) s += l[n];
  return s;
}

CutPlan plan_cut(const AxisHistogram& cells, const Cuboid& bbox, View view, Point2 p1, Point2 p2) {
  CutPlan plan;
  plan.view = view;
  plan.p1 = p1;
  plan.p2 = p2;
  const auto [u, v] = perpendicular_axes(view_axis(view));
  int cut;
  if (std::abs(p2.y - p1.y) >= std::abs(p2.x - p1.x)) {
    cut = u;
    plan.coord = round_half_up(0.5 * (p1.x + p2.x));
  } else {
    cut = v;
    plan.coord = round_half_up(0.5 * (p1.y + p2.y));
  }
  plan.axis = static_cast<Axis>(cut);
  plan.low = bbox;
  plan.low.max_corner[cut] = std::min(bbox.max_corner[cut], plan.coord - 1);
  plan.high = bbox;
  plan.high.min_corner[cut] = std::max(bbox.min_corner[cut], plan.coord);
  plan.low_cells = cells.below(cut, plan.coord);
  plan.high_cells = cells.total - plan.low_cells;
  plan.part_is_low = plan.low_cells <= plan.high_cells;
  return plan;
}

double reconstruction_surface_iou(const TriMesh& mesh, const VoxelGrid& shape) {
  return surface_iou(voxelize_into(mesh, shape), shape);
}

Part make_part(const VoxelGrid& part_cells, const Cuboid& box, Axis axis,
               const std::vector<int>& planes) {
  Part part;
  part.box = box;
  part.cells = part_cells;
  const auto tight = part_cells.bounding_box();
  if (!tight) return part;
  part.mesh = reconstruct_part(make_part_slices(part_cells, axis, planes, *tight), part_cells);
  part.surface_iou = reconstruction_surface_iou(part.mesh, part_cells);
  return part;
}

// ---------------------------------------------------------------------------

ParseEnv::ParseEnv(EnvConfig config) : config_(std::move(config)) { check(config_); }

ParseState ParseEnv::reset(const VoxelGrid& shape) {
  const GridDims d = shape.dims();
  if (d.nx < 3 || d.ny < 3 || d.nz < 3) {
    throw std::invalid_argument("shape grid must be at least 3 cells along every axis");
  }
  shape_cells_ = shape.count();
  if (shape_cells_ == 0) throw std::invalid_argument("cannot parse an empty shape");
  shape_ = shape;
  remaining_ = std::make_shared<VoxelGrid>(shape);
  const int extent = d[axis_index(config_.slice_axis)];
  planes_ = slice_planes(extent, std::min(config_.slice_count, extent));
  parts_.clear();
  done_ = false;
  finalized_ = false;
  state_ = observe();
  return state_;
}

ParseState ParseEnv::observe() const {
  ParseState s;
  s.step_index = state_.step_index;
  s.remaining = remaining_;
  const int max_corners = config_.harris.max_corners;
  for (View view : kAllViews) {
    const auto vi = static_cast<std::size_t>(view);
    s.projections[vi] = project(*remaining_, view);
    s.corners[vi] = detect_corners(s.projections[vi], config_.harris);
    const int rows = s.projections[vi].pixels.rows(), cols = s.projections[vi].pixels.cols();
    CornerList list(static_cast<std::size_t>(max_corners), kNoCorner);
    const auto& pts = s.corners[vi].points;
    for (std::size_t n = 0; n < pts.size() && n < list.size(); ++n) {
      list[n] = normalize_pixel(pts[n].row, pts[n].col, rows, cols);
    }
    s.corner_lists[vi] = std::move(list);
  }
  return s;
}

double ParseEnv::coverage() const {
  if (shape_cells_ == 0) return 0.0;
  return 1.0 - static_cast<double>(remaining_->count()) / static_cast<double>(shape_cells_);
}

StepResult ParseEnv::step(const CutAction& raw_action) {
  if (done_) throw std::logic_error("episode finished");
  const CutAction action = raw_action.clamped();
  const View view = action.view();
  const auto vi = static_cast<std::size_t>(view);
  const Mask& img = state_.projections[vi].pixels;

  auto place = [&](double x, double y) {
    Point2 p = denormalize_point(x, y, img.rows(), img.cols());
    if (config_.snap_to_corners) {
      if (auto corner = nearest_corner(p.x, p.y, state_.corners[vi])) {
        p = {static_cast<double>(corner->row), static_cast<double>(corner->col)};
      }
    }
    return p;
  };
  const Point2 p1 = place(action.x1, action.y1);
  const Point2 p2 = place(action.x2, action.y2);

  const auto bbox = remaining_->bounding_box();
  if (!bbox) throw std::logic_error("no remaining region in an unfinished episode");
  StepResult result;
  result.plan = plan_cut(AxisHistogram::of(*remaining_), *bbox, view, p1, p2);
  result.part = result.plan.part_box();

  if (result.plan.part_cells() == 0) {
    result.reward = config_.empty_penalty;
  } else {
    VoxelGrid part_cells = clip(*remaining_, result.part);
    Part part = make_part(part_cells, result.part, config_.slice_axis, planes_);
    result.reward = static_cast<double>(result.plan.part_cells()) / static_cast<double>(shape_cells_) +
                    config_.lambda * part.surface_iou;
    result.part_mesh = part.mesh;
    result.part_nonempty = true;
    remaining_ = std::make_shared<VoxelGrid>(subtract(*remaining_, part_cells));
    parts_.push_back(std::move(part));
  }

  state_.step_index += 1;
  done_ = coverage() >= config_.coverage_stop || state_.step_index >= config_.max_steps;
  state_ = observe();
  result.next_state = state_;
  result.done = done_;
  result.remaining_cells = remaining_->count();
  return result;
}

void ParseEnv::finalize() {
  if (finalized_ || !remaining_) return;
  finalized_ = true;
  done_ = true;
  const auto bbox = remaining_->bounding_box();
  if (!bbox) return;
  parts_.push_back(make_part(*remaining_, *bbox, config_.slice_axis, planes_));
  remaining_ = std::make_shared<VoxelGrid>(remaining_->empty_like());
}

// ---------------------------------------------------------------------------

EpisodeResult run_episode(const VoxelGrid& shape, const EnvConfig& config, const Policy& policy,
                          const TriMesh* reference, std::ostream* trace) {
  ParseEnv env(config);
  ParseState state = env.reset(shape);
  EpisodeResult out;
  while (!env.done()) {
    const CutAction action = policy(state);
    StepResult r = env.step(action);
    if (trace) write_trace_line(*trace, out.steps, action, r);
    out.rewards.push_back(r.reward);
    out.total_reward += r.reward;
    ++out.steps;
    state = std::move(r.next_state);
  }
  finish_episode(env, out, reference);
  return out;
}

void finish_episode(ParseEnv& env, EpisodeResult& out, const TriMesh* reference) {
  env.finalize();
  out.parts = env.parts();
  const VoxelGrid& shape = env.shape();
  VoxelGrid reconstructed = shape.empty_like();
  for (const auto& part : out.parts) {
    out.final_mesh.append(part.mesh);
    const VoxelGrid filled = voxelize_into(part.mesh, shape);
    for (std::size_t n = 0; n < filled.cells().size(); ++n) reconstructed.cells()[n] |= filled.cells()[n];
  }
  out.surface_iou = surface_iou(reconstructed, shape);
  if (out.final_mesh.empty()) {
    // Nothing to sample: report the L1 size of the grid as a worst case.
    const GridDims d = shape.dims();
    out.chamfer_l1 = shape.voxel_size() * (d.nx + d.ny + d.nz);
  } else {
    const TriMesh boundary = reference ? TriMesh{} : boundary_mesh(shape);
    out.chamfer_l1 = chamfer_l1(out.final_mesh, reference ? *reference : boundary, kMetricSamples);
  }
}

void write_trace_line(std::ostream& out, int step, const CutAction& action, const StepResult& result) {
  nlohmann::json j;
  j["step"] = step;
  j["action"] = action.to_array();
  j["snapped_points"] = {{result.plan.p1.x, result.plan.p1.y}, {result.plan.p2.x, result.plan.p2.y}};
  j["cut_axis"] = to_string(result.plan.axis);
  j["cut_coord"] = result.plan.coord;
  j["reward"] = result.reward;
  j["remaining_cells"] = result.remaining_cells;
  out << j.dump() << '\n';
}

}  // namespace sliceparse
