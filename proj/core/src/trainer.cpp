#include "sliceparse/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <spdlog/spdlog.h>
#include <stdexcept>

#include "sliceparse/expert.hpp"

namespace sliceparse {

std::string to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::Ddpg: return "ddpg";
    case TrainMode::Il: return "il";
    case TrainMode::IlRl: return "il+rl";
  }
  return "?";
}

TrainMode parse_train_mode(const std::string& s) {
  if (s == "ddpg") return TrainMode::Ddpg;
  if (s == "il") return TrainMode::Il;
  if (s == "il+rl" || s == "ilrl") return TrainMode::IlRl;
  throw std::invalid_argument("unknown training mode '" + s + "' (expected ddpg, il or il+rl)");
}

void check(const TrainerConfig& c) {
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) throw std::invalid_argument("trainer: gamma must be in [0, 1]");
  if (c.batch_size < 1) throw std::invalid_argument("trainer: batch_size must be >= 1");
  if (!(c.bc_weight >= 0.0)) throw std::invalid_argument("trainer: bc_weight must be >= 0");
  if (c.target_period < 1) throw std::invalid_argument("trainer: target_period must be >= 1");
  if (!(c.lr_actor > 0.0) || !(c.lr_critic > 0.0)) throw std::invalid_argument("trainer: learning rates must be > 0");
  if (!(c.momentum >= 0.0 && c.momentum < 1.0)) throw std::invalid_argument("trainer: momentum must be in [0, 1)");
  if (c.pretrain_iters < 0) throw std::invalid_argument("trainer: pretrain_iters must be >= 0");
  if (c.env_steps < 0) throw std::invalid_argument("trainer: env_steps must be >= 0");
  if (!(c.noise_sigma >= 0.0)) throw std::invalid_argument("trainer: noise_sigma must be >= 0");
  if (c.demo_capacity == 0 || c.agent_capacity == 0) throw std::invalid_argument("trainer: capacities must be > 0");
}

void TrainingReport::write_csv(std::ostream& out) const {
  out << "phase,episode,steps,return,surface_iou,chamfer,critic_loss,actor_loss\n";
  out.precision(9);
  for (const auto& r : rows) {
    out << r.phase << ',' << r.episode << ',' << r.steps << ',' << r.episode_return << ',' << r.surface_iou
        << ',' << r.chamfer << ',' << r.critic_loss << ',' << r.actor_loss << '\n';
  }
}

// ---------------------------------------------------------------------------

Trainer::Trainer(NetConfig net, TrainerConfig config)
    : net_(std::move(net)),
      config_(config),
      actor_(net_, NetKind::Actor),
      critic_(net_, NetKind::Critic),
      agent_(BufferKind::Agent, config.agent_capacity),
      rng_(config.seed) {
  check(config_);
  // Distinct streams for the two networks, both derived from the run seed.
  actor_params_ = actor_.initialize(config_.seed * 2 + 1);
  critic_params_ = critic_.initialize(config_.seed * 2 + 2);
  actor_velocity_.assign(actor_params_.size(), 0.0);
  critic_velocity_.assign(critic_params_.size(), 0.0);
  copy_targets();
}

void Trainer::set_params(ParamVector actor, ParamVector critic) {
  if (actor.size() != actor_.param_count() || critic.size() != critic_.param_count()) {
    throw std::invalid_argument("parameter vectors do not match the networks");
  }
  actor_params_ = std::move(actor);
  critic_params_ = std::move(critic);
  copy_targets();
}

void Trainer::copy_targets() {
  target_actor_params_ = actor_params_;
  target_critic_params_ = critic_params_;
}

Checkpoint Trainer::checkpoint() const { return {net_, actor_params_, critic_params_}; }

void Trainer::encode(Transition& t) const {
  if (!t.encoded_state) t.encoded_state = std::make_shared<const EncodedState>(encode_state(t.state, net_));
  if (!t.encoded_next_state) {
    t.encoded_next_state = std::make_shared<const EncodedState>(encode_state(t.next_state, net_));
  }
}

void Trainer::encode(ReplayBuffer& buffer) const {
  for (std::size_t i = 0; i < buffer.size(); ++i) encode(buffer[i]);
}

namespace {

Batch states_of(const TransitionBatch& batch, const NetConfig& net, bool next) {
  std::vector<const EncodedState*> ptrs;
  ptrs.reserve(batch.size());
  for (const Transition* t : batch) {
    const auto& e = next ? t->encoded_next_state : t->encoded_state;
    if (!e) throw std::logic_error("transition has not been encoded");
    ptrs.push_back(e.get());
  }
  return Batch::from(std::span<const EncodedState* const>(ptrs), net);
}

std::vector<double> actions_of(const TransitionBatch& batch, bool expert) {
  std::vector<double> out;
  out.reserve(batch.size() * NetConfig::kActionDim);
  for (const Transition* t : batch) {
    if (expert && !t->expert_action) throw std::logic_error("transition lacks an expert action");
    const auto a = (expert ? *t->expert_action : t->action).clamped().to_array();
    out.insert(out.end(), a.begin(), a.end());
  }
  return out;
}

}  // namespace

std::vector<double> Trainer::td_targets(const TransitionBatch& batch) const {
  return td_targets_on(batch, states_of(batch, net_, true));
}

std::vector<double> Trainer::td_targets_on(const TransitionBatch& batch, const Batch& next) const {
  const auto next_actions = actor_.forward(target_actor_params_, next, {}, &scratch_->a);
  const auto next_q = critic_.forward(target_critic_params_, next, next_actions, &scratch_->b);
  std::vector<double> y(batch.size());
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const Transition& t = *batch[n];
    y[n] = t.reward + config_.gamma * (t.done ? 0.0 : 1.0) * next_q[n];
  }
  return y;
}

void Trainer::step_params(ParamVector& params, ParamVector& velocity, const ParamVector& grad, double lr) {
  for (std::size_t n = 0; n < params.size(); ++n) {
    velocity[n] = config_.momentum * velocity[n] + grad[n];
    params[n] -= lr * velocity[n];
  }
  round_to_float(params);
}

double Trainer::critic_update(const TransitionBatch& batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  return critic_update_on(batch, states_of(batch, net_, false), states_of(batch, net_, true));
}

double Trainer::critic_update_on(const TransitionBatch& batch, const Batch& states, const Batch& next) {
  const auto y = td_targets_on(batch, next);
  const auto actions = actions_of(batch, false);
  ForwardCache& cache = scratch_->a;
  const auto q = critic_.forward(critic_params_, states, actions, &cache);
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  std::vector<double> upstream(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double err = q[i] - y[i];
    loss += err * err / n;
    upstream[i] = 2.0 * err / n;
  }
  const Gradients g = critic_.backward(critic_params_, cache, upstream);
  step_params(critic_params_, critic_velocity_, g.params, config_.lr_critic);
  return loss;
}

double Trainer::bc_loss(const TransitionBatch& batch) const {
  if (batch.empty()) return 0.0;
  const Batch states = states_of(batch, net_, false);
  const auto pi = actor_.forward(actor_params_, states);
  const auto expert = actions_of(batch, true);
  const auto q_pi = critic_.forward(critic_params_, states, pi);
  const auto q_expert = critic_.forward(critic_params_, states, expert);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!(q_expert[i] > q_pi[i])) continue;
    double sq = 0.0;
    for (int a = 0; a < NetConfig::kActionDim; ++a) {
      const double d = pi[i * NetConfig::kActionDim + a] - expert[i * NetConfig::kActionDim + a];
      sq += d * d;
    }
    loss += sq;
  }
  return loss;
}

ParamVector Trainer::actor_gradient(const TransitionBatch& batch, double bc_weight, double* objective) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  return actor_gradient_on(batch, states_of(batch, net_, false), bc_weight, objective);
}

ParamVector Trainer::actor_gradient_on(const TransitionBatch& batch, const Batch& states, double bc_weight,
                                       double* objective) const {
  ForwardCache& actor_cache = scratch_->a;
  ForwardCache& critic_cache = scratch_->b;
  const auto pi = actor_.forward(actor_params_, states, {}, &actor_cache);
  const auto q_pi = critic_.forward(critic_params_, states, pi, &critic_cache);
  const double n = static_cast<double>(batch.size());
  const std::vector<double> dq(batch.size(), -1.0 / n);
  const Gradients cg = critic_.backward(critic_params_, critic_cache, dq);

  std::vector<double> upstream = cg.action;
  double obj = 0.0;
  for (double q : q_pi) obj -= q / n;
  if (bc_weight > 0.0) {
    const auto expert = actions_of(batch, true);
    const auto q_expert = critic_.forward_shared(critic_params_, states, expert, critic_cache, &scratch_->c);
    double bc = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!(q_expert[i] > q_pi[i])) continue;
      double sq = 0.0;
      for (int a = 0; a < NetConfig::kActionDim; ++a) {
        const std::size_t k = i * NetConfig::kActionDim + a;
        const double d = pi[k] - expert[k];
        sq += d * d;
        upstream[k] += bc_weight * 2.0 * d;
      }
      bc += sq;
    }
    obj += bc_weight * bc;
  }
  if (objective) *objective = obj;
  return actor_.backward(actor_params_, actor_cache, upstream).params;
}

double Trainer::actor_objective(const TransitionBatch& batch, double bc_weight, const ParamVector& actor) const {
  const Batch states = states_of(batch, net_, false);
  ForwardCache critic_cache;
  const auto pi = actor_.forward(actor, states);
  const auto q_pi = critic_.forward(critic_params_, states, pi, &critic_cache);
  const double n = static_cast<double>(batch.size());
  double obj = 0.0;
  for (double q : q_pi) obj -= q / n;
  if (bc_weight > 0.0) {
    const auto expert = actions_of(batch, true);
    const auto q_expert = critic_.forward(critic_params_, states, expert);
    double bc = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (!(q_expert[i] > q_pi[i])) continue;
      double sq = 0.0;
      for (int a = 0; a < NetConfig::kActionDim; ++a) {
        const std::size_t k = i * NetConfig::kActionDim + a;
        sq += (pi[k] - expert[k]) * (pi[k] - expert[k]);
      }
      bc += sq;
    }
    obj += bc_weight * bc;
  }
  return obj;
}

double Trainer::actor_update(const TransitionBatch& batch, double bc_weight) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  return actor_update_on(batch, states_of(batch, net_, false), bc_weight);
}

double Trainer::actor_update_on(const TransitionBatch& batch, const Batch& states, double bc_weight) {
  double objective = 0.0;
  const ParamVector grad = actor_gradient_on(batch, states, bc_weight, &objective);
  step_params(actor_params_, actor_velocity_, grad, config_.lr_actor);
  return objective;
}

std::pair<double, double> Trainer::update(const TransitionBatch& batch, double bc_weight) {
  const Batch states = states_of(batch, net_, false);
  const double critic_loss = critic_update_on(batch, states, states_of(batch, net_, true));
  return {critic_loss, actor_update_on(batch, states, bc_weight)};
}

void Trainer::after_update() {
  ++updates_;
  if (updates_ % config_.target_period == 0) copy_targets();
}

TransitionBatch Trainer::sample(const ReplayBuffer& buffer) {
  TransitionBatch batch;
  for (std::size_t i : buffer.sample(static_cast<std::size_t>(config_.batch_size), rng_)) {
    batch.push_back(&buffer[i]);
  }
  return batch;
}

void Trainer::pretrain(ReplayBuffer& demos, int iterations, TrainingReport* report,
                       std::span<const VoxelGrid> eval_shapes, const EnvConfig* env) {
  if (iterations <= 0) return;
  const bool too_small = demos.size() < static_cast<std::size_t>(config_.batch_size);
  if (too_small) {
    spdlog::warn("demonstration buffer holds {} transitions, fewer than the batch size {}; skipping pre-training updates",
                 demos.size(), config_.batch_size);
  }
  encode(demos);
  double critic_sum = 0.0, actor_sum = 0.0;
  for (int it = 0; it < iterations; ++it) {
    if (!too_small) {
      const auto [critic_loss, actor_loss] = update(sample(demos), config_.bc_weight);
      critic_sum += critic_loss;
      actor_sum += actor_loss;
    }
    after_update();
  }
  if (report) {
    ReportRow row;
    row.phase = "pretrain";
    row.episode = iterations;
    row.critic_loss = critic_sum / iterations;
    row.actor_loss = actor_sum / iterations;
    if (env && !eval_shapes.empty()) {
      std::vector<EpisodeResult> results;
      row.surface_iou = evaluate_policy(greedy_policy(), eval_shapes, *env, &results);
      for (const auto& r : results) {
        row.episode_return += r.total_reward / results.size();
        row.chamfer += r.chamfer_l1 / results.size();
        row.steps += r.steps;
      }
    }
    report->rows.push_back(row);
  }
}

Policy Trainer::greedy_policy() const {
  return [this](const ParseState& s) { return actor_action(actor_, actor_params_, encode_state(s, net_)); };
}

void Trainer::train(std::span<const VoxelGrid> shapes, const EnvConfig& env_config, ReplayBuffer* demos,
                    TrainingReport& report) {
  if (shapes.empty() || config_.env_steps == 0) return;
  if (demos) encode(*demos);
  const double bc_weight = demos ? config_.bc_weight : 0.0;
  const auto n = static_cast<std::size_t>(config_.batch_size);
  std::normal_distribution<double> noise(0.0, 1.0);
  bool warned = false;

  long long steps = 0;
  for (long long episode = 0; steps < config_.env_steps; ++episode) {
    const auto shape_id = static_cast<std::size_t>(episode % static_cast<long long>(shapes.size()));
    ParseEnv env(env_config);
    ParseState state = env.reset(shapes[shape_id]);
    std::vector<Transition> episode_transitions;
    EpisodeResult result;
    double critic_sum = 0.0, actor_sum = 0.0;
    int update_count = 0;

    while (!env.done() && steps < config_.env_steps) {
      auto encoded = std::make_shared<const EncodedState>(encode_state(state, net_));
      std::array<double, 5> a = actor_action(actor_, actor_params_, *encoded).to_array();
      for (double& v : a) v = std::clamp(v + config_.noise_sigma * noise(rng_), 0.0, 1.0);
      const CutAction action = CutAction::from_array(a);
      // Expert labels only feed the BC term.
      std::optional<CutAction> label;
      if (bc_weight > 0.0) label = expert_action(state);
      StepResult r = env.step(action);

      Transition t;
      t.state = std::move(state);
      t.action = action;
      t.reward = r.reward;
      t.next_state = r.next_state;
      t.done = r.done;
      t.expert_action = label;
      t.shape_id = static_cast<int>(shape_id);
      t.encoded_state = encoded;
      encode(t);
      result.rewards.push_back(r.reward);
      result.total_reward += r.reward;
      ++result.steps;
      if (demos && config_.refresh_demos) episode_transitions.push_back(stored(t));
      agent_.add(std::move(t));
      state = std::move(r.next_state);
      ++steps;

      bool updated = false;
      for (ReplayBuffer* buffer : {demos, &agent_}) {
        if (!buffer) continue;
        if (buffer->size() < n) {
          if (!warned && buffer->kind() == BufferKind::Demo) {
            spdlog::warn("demonstration buffer smaller than the batch size; skipping its updates");
            warned = true;
          }
          continue;
        }
        const auto [critic_loss, actor_loss] = update(sample(*buffer), bc_weight);
        critic_sum += critic_loss;
        actor_sum += actor_loss;
        updated = true;
      }
      if (updated) ++update_count;
      after_update();
    }

    finish_episode(env, result);
    if (demos && config_.refresh_demos && env.done()) {
      for (auto& t : episode_transitions) t.episode_return = result.total_reward;
      if (demos->refresh(static_cast<int>(shape_id), result.total_reward, episode_transitions)) {
        encode(*demos);
      }
    }
    ReportRow row;
    row.phase = "train";
    row.episode = episode;
    row.steps = steps;
    row.episode_return = result.total_reward;
    row.surface_iou = result.surface_iou;
    row.chamfer = result.chamfer_l1;
    row.critic_loss = update_count ? critic_sum / update_count : 0.0;
    row.actor_loss = update_count ? actor_sum / update_count : 0.0;
    report.rows.push_back(row);
  }
}

double evaluate_policy(const Policy& policy, std::span<const VoxelGrid> shapes, const EnvConfig& env,
                       std::vector<EpisodeResult>* results) {
  if (shapes.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& shape : shapes) {
    EpisodeResult r = run_episode(shape, env, policy);
    sum += r.surface_iou;
    if (results) results->push_back(std::move(r));
  }
  return sum / static_cast<double>(shapes.size());
}

TrainingReport run_training(Trainer& trainer, TrainMode mode, std::span<const VoxelGrid> shapes,
                            const EnvConfig& env, ReplayBuffer* demos) {
  TrainingReport report;
  if (mode != TrainMode::Ddpg) {
    if (!demos) throw std::invalid_argument(to_string(mode) + " training needs demonstrations");
    trainer.pretrain(*demos, trainer.config().pretrain_iters, &report, shapes, &env);
  }
  if (mode != TrainMode::Il) {
    trainer.train(shapes, env, mode == TrainMode::IlRl ? demos : nullptr, report);
  }
  return report;
}

}  // namespace sliceparse
