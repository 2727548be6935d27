#pragma once

#include <span>
#include <vector>

#include "sliceparse/env.hpp"
#include "sliceparse/replay.hpp"

namespace sliceparse {

struct CandidateSegment {
  View view = View::Top;
  /// Endpoints, both detected corners, p1 < p2.
  Pixel p1, p2;
  /// Component count after erasing the segment minus the count before.
  int component_count_delta = 0;
  /// True pixels inside the bounding box of the smaller split-off piece that
  /// do not belong to it.
  long long leak_area = 0;

  double length() const;
};

/// Pixels of the 8-connected line from a to b, endpoints included.
std::vector<Pixel> bresenham(Pixel a, Pixel b);

/// Per view, each corner paired with its nearest other corner (ties: higher
/// response, then smaller position); unordered duplicates removed.
std::vector<CandidateSegment> candidate_segments(const ParseState& state);

/// Keeps segments whose erasure from the view's silhouette increases its
/// 4-connected component count; fills component_count_delta.
std::vector<CandidateSegment> filter_separating(std::span<const CandidateSegment> segments,
                                                const ParseState& state);

/// Fills leak_area and sorts by (leak_area, length, view, p1, p2).
std::vector<CandidateSegment> score_segments(std::span<const CandidateSegment> segments,
                                             const ParseState& state);

/// Action for a segment: endpoints normalized, c at the center of its view's bin.
CutAction segment_action(const CandidateSegment& segment, const ParseState& state);

/// The best-scored separating segment whose cut removes something. Without
/// one, the corner pair whose cut splits the remaining cells most evenly;
/// without any useful corner pair, a cut through the center of the remaining
/// bounding box on the most balancing axis. Needs state.remaining.
CutAction expert_action(const ParseState& state);

struct Demonstration {
  int shape_id = -1;
  std::vector<Transition> transitions;
  double episode_return = 0.0;
};

/// Plays the expert `episodes` times on every shape. Shapes are processed on
/// up to `jobs` threads; the output order does not depend on `jobs`.
std::vector<Demonstration> generate_demonstrations(std::span<const VoxelGrid> shapes,
                                                   const EnvConfig& config, int episodes,
                                                   int jobs = 1);

}  // namespace sliceparse
