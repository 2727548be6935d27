#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sliceparse/env.hpp"

namespace sliceparse {

struct NetConfig {
  /// Projection images are area-averaged down to this size.
  int input_rows = 32;
  int input_cols = 32;
  int conv1_channels = 8;
  int conv2_channels = 16;
  std::vector<int> mlp_widths{256, 128};
  int max_corners = 32;
  /// Divisor of the step index feature.
  int max_steps = 10;
  /// False zeroes the projection channels (the no-projection baseline).
  bool use_projections = true;
  std::uint64_t seed = 1;

  static constexpr int kActionDim = 5;
  static constexpr int kImageChannels = 5;  // 3 projections + 2 coordinate channels

  int corner_feature_dim() const { return 3 * max_corners * 2; }
  /// Step scalar plus corner features.
  int extra_dim() const { return 1 + corner_feature_dim(); }
  int image_size() const { return kImageChannels * input_rows * input_cols; }
  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

void check(const NetConfig& config);

/// Network input for one state: channel-major image (3 projections, then
/// row and column coordinates in [-1, 1]) and the extra features. Stored in
/// single precision since replay buffers keep one per state.
struct EncodedState {
  std::vector<float> image;
  std::vector<float> extras;
};

/// Area average of `mask` (1.0 for true) onto a rows x cols grid.
std::vector<double> area_downsample(const Mask& mask, int rows, int cols);

EncodedState encode_state(const ParseState& state, const NetConfig& config);

/// All weights of one network, flat. Layout, layer by layer: conv1 weights
/// [out][in][3][3] then bias, conv2 likewise, then each dense layer's weights
/// [out][in] followed by its bias. The first dense layer's inputs are the
/// flattened conv2 output [channel][row][col], then the extra features, then
/// (critic only) the action.
using ParamVector = std::vector<double>;

enum class NetKind : std::uint8_t { Actor = 0, Critic = 1 };

struct ParamGroup {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Activations kept by a forward pass for backward().
struct ForwardCache {
  ForwardCache();
  ~ForwardCache();
  ForwardCache(ForwardCache&&) noexcept;
  ForwardCache& operator=(ForwardCache&&) noexcept;

  struct Data;
  std::unique_ptr<Data> data;
};

/// Convolutional activations, shared between caches by forward_shared.
struct ConvTrunk;

/// Column-per-sample batch of encoded inputs.
struct Batch {
  /// image_size() x n and extra_dim() x n, column-major.
  std::vector<double> images;
  std::vector<double> extras;
  int size = 0;

  static Batch from(std::span<const EncodedState> states, const NetConfig& config);
  static Batch from(std::span<const EncodedState* const> states, const NetConfig& config);
};

struct Gradients {
  ParamVector params;
  /// kActionDim x n, column-major (critic only).
  std::vector<double> action;
};

/// CoordConv trunk (two 3x3 stride-2 convolutions with ReLU), dense layers
/// with ReLU, then a sigmoid (actor, 5 outputs) or linear (critic, 1 output)
/// head. The critic's action enters at the first dense layer.
class Network {
 public:
  Network(NetConfig config, NetKind kind);
  ~Network();
  Network(const Network&);
  Network& operator=(const Network&);
  Network(Network&&) noexcept;
  Network& operator=(Network&&) noexcept;

  const NetConfig& config() const { return config_; }
  NetKind kind() const { return kind_; }
  int output_dim() const { return kind_ == NetKind::Actor ? NetConfig::kActionDim : 1; }
  std::size_t param_count() const;
  const std::vector<ParamGroup>& groups() const;

  /// Uniform fan-in scaled initialization from `seed`, rounded to float.
  ParamVector initialize(std::uint64_t seed) const;

  /// output_dim() x n outputs, column-major. `actions` (kActionDim x n) is
  /// required for the critic and ignored by the actor. When `cache` is given
  /// it receives what backward needs.
  std::vector<double> forward(const ParamVector& params, const Batch& batch,
                              std::span<const double> actions = {},
                              ForwardCache* cache = nullptr) const;
  /// forward() reusing the convolutional activations held by `trunk`, which
  /// must come from a forward pass of this network with the same parameters
  /// and batch. Only the dense layers run.
  std::vector<double> forward_shared(const ParamVector& params, const Batch& batch,
                                     std::span<const double> actions, const ForwardCache& trunk,
                                     ForwardCache* cache = nullptr) const;

  /// Reverse-mode gradient of Σ upstream ⊙ output.
  Gradients backward(const ParamVector& params, const ForwardCache& cache,
                     std::span<const double> upstream) const;

 private:
  struct Impl;
  void check_inputs(const ParamVector& params, const Batch& batch, std::span<const double> actions) const;
  static ConvTrunk* writable_trunk(ForwardCache::Data& d);
  void run_trunk(const ParamVector& params, const Batch& batch, ConvTrunk& trunk) const;
  void run_head(const ParamVector& params, const Batch& batch, std::span<const double> actions,
                ForwardCache::Data& d) const;
  NetConfig config_;
  NetKind kind_;
  std::unique_ptr<Impl> impl_;
};


/// Convenience single-state wrappers.
CutAction actor_action(const Network& actor, const ParamVector& params, const EncodedState& s);
double critic_value(const Network& critic, const ParamVector& params, const EncodedState& s,
                    const CutAction& action);

/// Rounds every parameter to the nearest float.
void round_to_float(ParamVector& params);

// Checkpoint: magic "SPCK", format version, NetConfig, then actor and critic
// parameter counts and their little-endian float32 payloads.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetConfig config;
  ParamVector actor;
  ParamVector critic;
};

void save_checkpoint(const Checkpoint& ckpt, std::ostream& out);
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace sliceparse
