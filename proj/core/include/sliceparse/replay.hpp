#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "sliceparse/env.hpp"
#include "sliceparse/neural.hpp"

namespace sliceparse {

struct Transition {
  ParseState state;
  CutAction action;
  double reward = 0.0;
  ParseState next_state;
  bool done = false;
  /// The expert's action in `state`.
  std::optional<CutAction> expert_action;
  /// Which shape of the training set the episode ran on, and its return.
  int shape_id = -1;
  double episode_return = 0.0;
  /// Network inputs for state and next_state, filled by the trainer. Not
  /// serialized.
  std::shared_ptr<const EncodedState> encoded_state, encoded_next_state;
};

/// Drops the remaining-region grids, which are only needed while acting.
Transition stored(Transition t);

enum class BufferKind : std::uint8_t { Demo = 0, Agent = 1 };

/// Demo buffers are append-only up to capacity (further inserts are refused);
/// agent buffers evict the oldest transition.
class ReplayBuffer {
 public:
  ReplayBuffer(BufferKind kind, std::size_t capacity);

  BufferKind kind() const { return kind_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  /// Total number of accepted inserts.
  std::uint64_t inserted() const { return inserted_; }

  /// Returns false when a full demo buffer refuses the transition. Demo
  /// transitions must carry an expert action.
  bool add(Transition t);
  /// Slot order; for agent buffers this is ring order, not age order.
  const Transition& operator[](std::size_t i) const { return items_[i]; }
  Transition& operator[](std::size_t i) { return items_[i]; }
  std::span<const Transition> items() const { return items_; }

  /// `n` slot indices drawn uniformly with replacement.
  std::vector<std::size_t> sample(std::size_t n, std::mt19937_64& rng) const;

  /// Demo refresh: when `episode_return` beats the stored return for
  /// `shape_id`, that shape's slots are overwritten with `episode`, cycled
  /// as needed; the buffer size does not change.
  /// Returns whether a replacement happened.
  bool refresh(int shape_id, double episode_return, std::span<const Transition> episode);

 private:
  BufferKind kind_;
  std::size_t capacity_;
  std::vector<Transition> items_;
  std::size_t next_ = 0;
  std::uint64_t inserted_ = 0;
};

// Binary transition store: magic "SPTR", format version, buffer kind,
// capacity, record count, then the records. Little-endian throughout.
inline constexpr std::uint32_t kTransitionFormatVersion = 1;

void save_transitions(std::ostream& out, BufferKind kind, std::size_t capacity,
                      std::span<const Transition> items);
void save_buffer(const ReplayBuffer& buffer, const std::filesystem::path& path);
ReplayBuffer load_buffer(std::istream& in);
ReplayBuffer load_buffer(const std::filesystem::path& path);

}  // namespace sliceparse
