#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "sliceparse/corners.hpp"
#include "sliceparse/geomcore.hpp"
#include "sliceparse/mesh.hpp"
#include "sliceparse/types.hpp"
#include "sliceparse/voxel_grid.hpp"

namespace sliceparse {

struct EnvConfig {
  int max_steps = 10;
  /// Weight of the reconstruction term in the step reward.
  double lambda = 1.0;
  /// Episode ends once this fraction of the shape has been cut away.
  double coverage_stop = 0.98;
  int grid_resolution = 32;
  Axis slice_axis = Axis::Z;
  int slice_count = 12;
  HarrisParams harris;
  /// Reward for a cut whose smaller side holds no remaining cells.
  double empty_penalty = -0.1;
  /// When false, action points are used as given instead of being moved to
  /// the nearest detected corner.
  bool snap_to_corners = true;
};

/// Throws std::invalid_argument when a field is out of range.
void check(const EnvConfig& config);

/// Corner positions normalized by (rows - 1, cols - 1), padded to max_corners
/// with kNoCorner.
using CornerList = std::vector<Point2>;
inline constexpr Point2 kNoCorner{-1.0, -1.0};

struct ParseState {
  /// Silhouettes of the remaining region, indexed by View.
  std::array<ProjectionImage, 3> projections;
  int step_index = 0;
  std::array<CornerList, 3> corner_lists;
  /// Detected corners in pixel units, indexed by View.
  std::array<CornerSet, 3> corners;
  /// Remaining region. Present in states produced by the environment; not
  /// part of the network input and not serialized.
  std::shared_ptr<const VoxelGrid> remaining;
};

/// (x1, y1, x2, y2, c): two points as normalized (row, col) positions in view
/// plane c, with c in [0, 1] selecting the view ⌊3c⌋.
struct CutAction {
  double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0, c = 0.0;

  static CutAction from_array(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
  std::array<double, 5> to_array() const { return {x1, y1, x2, y2, c}; }
  /// Every component clamped to [0, 1]; NaN becomes 0.
  CutAction clamped() const;
  View view() const;
  friend bool operator==(const CutAction&, const CutAction&) = default;
};

/// Action value that selects `view`.
double view_code(View view);

/// Normalized (row, col) of a pixel in an image of the given size, and back.
Point2 normalize_pixel(double row, double col, int rows, int cols);
Point2 denormalize_point(double x, double y, int rows, int cols);

/// Geometry of one cut of the remaining region.
struct CutPlan {
  View view = View::Top;
  /// Image-space endpoints after snapping.
  Point2 p1, p2;
  /// The cut is the plane index[axis] = coord: cells below go to the low side.
  Axis axis = Axis::Z;
  int coord = 0;
  Cuboid low, high;
  long long low_cells = 0, high_cells = 0;
  /// The side with fewer remaining cells (ties: low side).
  bool part_is_low = true;

  const Cuboid& part_box() const { return part_is_low ? low : high; }
  long long part_cells() const { return part_is_low ? low_cells : high_cells; }
};

/// Occupied-cell counts per layer along each axis.
struct AxisHistogram {
  std::array<std::vector<long long>, 3> layers;
  long long total = 0;

  static AxisHistogram of(const VoxelGrid& grid);
  /// Cells with index[axis] < coord.
  long long below(int axis, int coord) const;
};

/// Splits `bbox` (the bounding box of the counted cells) by the axis-aligned
/// line through two image points of `view`: a horizontal line at the rounded
/// mean row when |Δcol| ≥ |Δrow|, otherwise a vertical line at the rounded
/// mean column.
CutPlan plan_cut(const AxisHistogram& cells, const Cuboid& bbox, View view, Point2 p1, Point2 p2);

struct Part {
  /// Side of the cut (or, for the final part, the remainder's bounding box).
  Cuboid box;
  VoxelGrid cells;
  TriMesh mesh;
  /// surface_iou(voxelized mesh, cells).
  double surface_iou = 0.0;
};

struct StepResult {
  double reward = 0.0;
  ParseState next_state;
  bool done = false;
  Cuboid part;
  TriMesh part_mesh;
  /// False when the cut removed nothing.
  bool part_nonempty = false;
  CutPlan plan;
  std::size_t remaining_cells = 0;
};

/// Reconstructs one part of `shape`: slices of the part's cells on `planes`,
/// clipped to the part's tight bounding box, surfaced by reconstruct_part.
Part make_part(const VoxelGrid& part_cells, const Cuboid& box, Axis axis,
               const std::vector<int>& planes);

class ParseEnv {
 public:
  explicit ParseEnv(EnvConfig config);

  const EnvConfig& config() const { return config_; }

  /// Starts an episode on `shape`. Throws on an empty shape.
  ParseState reset(const VoxelGrid& shape);
  /// Throws std::logic_error("episode finished") once done.
  StepResult step(const CutAction& action);

  bool done() const { return done_; }
  const ParseState& state() const { return state_; }
  const VoxelGrid& shape() const { return shape_; }
  const VoxelGrid& remaining() const { return *remaining_; }
  const std::vector<Part>& parts() const { return parts_; }
  const std::vector<int>& planes() const { return planes_; }
  double coverage() const;

  /// Moves any uncovered remainder into one last part. Idempotent; called
  /// automatically by run_episode.
  void finalize();

 private:
  ParseState observe() const;

  EnvConfig config_;
  VoxelGrid shape_;
  std::shared_ptr<VoxelGrid> remaining_;
  std::size_t shape_cells_ = 0;
  std::vector<int> planes_;
  std::vector<Part> parts_;
  ParseState state_;
  bool done_ = true;
  bool finalized_ = false;
};

using Policy = std::function<CutAction(const ParseState&)>;

struct EpisodeResult {
  std::vector<Part> parts;
  std::vector<double> rewards;
  double total_reward = 0.0;
  int steps = 0;
  TriMesh final_mesh;
  /// final_mesh against the shape: surface_iou of the voxelized mesh and
  /// chamfer_l1 against `reference` (or the shape's voxel boundary).
  double surface_iou = 0.0;
  double chamfer_l1 = 0.0;
};

inline constexpr int kMetricSamples = 2000;

/// Voxelizes `mesh` into the shape's frame and scores it.
double reconstruction_surface_iou(const TriMesh& mesh, const VoxelGrid& shape);

/// Finalizes `env` and fills parts, final_mesh and the metrics of `out`.
void finish_episode(ParseEnv& env, EpisodeResult& out, const TriMesh* reference = nullptr);

/// `trace`, when non-null, receives one JSON line per step.
EpisodeResult run_episode(const VoxelGrid& shape, const EnvConfig& config, const Policy& policy,
                          const TriMesh* reference = nullptr, std::ostream* trace = nullptr);

/// JSON line {step, action, snapped_points, cut_axis, cut_coord, reward, remaining_cells}.
void write_trace_line(std::ostream& out, int step, const CutAction& action, const StepResult& result);

}  // namespace sliceparse
