#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <utility>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sliceparse/env.hpp"
#include "sliceparse/neural.hpp"
#include "sliceparse/replay.hpp"

namespace sliceparse {

enum class TrainMode : std::uint8_t {
  Ddpg,  // environment interaction only, no demonstrations
  Il,    // pre-training on demonstrations only
  IlRl,  // pre-training, then interaction with both buffers
};

std::string to_string(TrainMode mode);
TrainMode parse_train_mode(const std::string& s);

struct TrainerConfig {
  double gamma = 0.99;
  int batch_size = 64;
  double bc_weight = 1.0;
  /// Targets are hard copies of the live networks every `target_period` updates.
  int target_period = 100;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  double momentum = 0.9;
  int pretrain_iters = 5000;
  /// Environment steps taken by train().
  long long env_steps = 20000;
  /// Gaussian exploration noise on every action component.
  double noise_sigma = 0.1;
  std::size_t demo_capacity = 50000;
  std::size_t agent_capacity = 100000;
  /// Replace a shape's demonstrations with a better-returning agent episode.
  bool refresh_demos = true;
  std::uint64_t seed = 1;
};

void check(const TrainerConfig& config);

/// One pre-training evaluation or one training episode.
struct ReportRow {
  std::string phase;  // "pretrain" or "train"
  long long episode = 0;
  long long steps = 0;
  double episode_return = 0.0;
  double surface_iou = 0.0;
  double chamfer = 0.0;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

struct TrainingReport {
  std::vector<ReportRow> rows;
  void write_csv(std::ostream& out) const;
};

/// Mini-batch of transitions; each must carry its encodings (see Trainer::encode).
using TransitionBatch = std::vector<const Transition*>;

class Trainer {
 public:
  Trainer(NetConfig net, TrainerConfig config);

  const NetConfig& net_config() const { return net_; }
  const TrainerConfig& config() const { return config_; }
  const Network& actor() const { return actor_; }
  const Network& critic() const { return critic_; }

  const ParamVector& actor_params() const { return actor_params_; }
  const ParamVector& critic_params() const { return critic_params_; }
  const ParamVector& target_actor_params() const { return target_actor_params_; }
  const ParamVector& target_critic_params() const { return target_critic_params_; }
  void set_params(ParamVector actor, ParamVector critic);
  /// θ' ← θ for both networks.
  void copy_targets();
  Checkpoint checkpoint() const;

  /// Fills a transition's cached network inputs if missing.
  void encode(Transition& t) const;
  void encode(ReplayBuffer& buffer) const;

  /// r + γ·(1 − done)·Q'(s', π'(s')).
  std::vector<double> td_targets(const TransitionBatch& batch) const;
  /// Mean squared TD error before the step; one momentum step on the critic.
  double critic_update(const TransitionBatch& batch);
  /// Σ‖π(s) − π^h(s)‖² over samples with Q(s, π^h(s)) > Q(s, π(s)).
  double bc_loss(const TransitionBatch& batch) const;
  /// −mean Q(s, π(s)) + bc_weight·bc_loss before the step; one momentum step
  /// on the actor through the critic.
  double actor_update(const TransitionBatch& batch, double bc_weight);
  /// Gradient of the actor objective (the step actor_update would take).
  ParamVector actor_gradient(const TransitionBatch& batch, double bc_weight, double* objective = nullptr) const;
  /// Objective alone, at the given actor parameters.
  double actor_objective(const TransitionBatch& batch, double bc_weight, const ParamVector& actor) const;

  /// `iterations` updates sampling only the demonstration buffer.
  void pretrain(ReplayBuffer& demos, int iterations, TrainingReport* report = nullptr,
                std::span<const VoxelGrid> eval_shapes = {}, const EnvConfig* env = nullptr);

  /// Interaction loop: cycles through `shapes`, acting with exploration
  /// noise, storing expert-labeled transitions and updating from both
  /// buffers (`demos` may be null for pure DDPG, in which case BC is off).
  void train(std::span<const VoxelGrid> shapes, const EnvConfig& env, ReplayBuffer* demos,
             TrainingReport& report);

  const ReplayBuffer& agent_buffer() const { return agent_; }
  long long updates() const { return updates_; }

  /// Greedy (noise-free) policy of the current actor.
  Policy greedy_policy() const;

 private:
  std::vector<double> td_targets_on(const TransitionBatch& batch, const Batch& next) const;
  double critic_update_on(const TransitionBatch& batch, const Batch& states, const Batch& next);
  ParamVector actor_gradient_on(const TransitionBatch& batch, const Batch& states, double bc_weight,
                                double* objective) const;
  double actor_update_on(const TransitionBatch& batch, const Batch& states, double bc_weight);
  /// Critic then actor step on one mini-batch; returns both losses.
  std::pair<double, double> update(const TransitionBatch& batch, double bc_weight);
  void step_params(ParamVector& params, ParamVector& velocity, const ParamVector& grad, double lr);
  void after_update();
  TransitionBatch sample(const ReplayBuffer& buffer);

  NetConfig net_;
  TrainerConfig config_;
  Network actor_, critic_;
  ParamVector actor_params_, critic_params_, target_actor_params_, target_critic_params_;
  ParamVector actor_velocity_, critic_velocity_;
  ReplayBuffer agent_;
  std::mt19937_64 rng_;
  long long updates_ = 0;
  // Forward caches reused across updates to avoid reallocating activations.
  struct Scratch {
    ForwardCache a, b, c;
  };
  std::unique_ptr<Scratch> scratch_ = std::make_unique<Scratch>();
};

/// Greedy episodes of `policy` on every shape; returns mean surface IoU and
/// fills per-shape results when `results` is given.
double evaluate_policy(const Policy& policy, std::span<const VoxelGrid> shapes, const EnvConfig& env,
                       std::vector<EpisodeResult>* results = nullptr);

/// Runs `mode` from freshly initialized networks: Il and IlRl pre-train on
/// `demos` for pretrain_iters; Ddpg and IlRl then train for env_steps.
TrainingReport run_training(Trainer& trainer, TrainMode mode, std::span<const VoxelGrid> shapes,
                            const EnvConfig& env, ReplayBuffer* demos);

}  // namespace sliceparse
