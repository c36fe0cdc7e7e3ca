#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "acpc/advantage.hpp"
#include "acpc/env.hpp"
#include "acpc/net.hpp"
#include "acpc/optim.hpp"
#include "acpc/prng.hpp"
#include "acpc/rollout.hpp"
#include "acpc/tensor.hpp"

namespace acpc {

// Every knob that distinguishes the two training configurations. A2C is a
// preset of these fields, not a separate implementation.
struct Hyperparams {
  OptimizerKind optimizer_kind = OptimizerKind::adam;
  double lr = 3e-4;
  bool anneal_lr = false;
  std::size_t num_envs = 4;
  std::size_t num_steps = 25;       // M, rollout length
  double gamma = 0.99;
  double gae_lambda = 0.95;
  std::size_t update_epochs = 4;    // K
  std::size_t minibatch_size = 25;  // m, must divide num_envs * num_steps
  bool normalize_advantage = true;
  double clip_coef = 0.2;
  bool clip_vloss = true;
  double vf_coef = 0.5;   // c1
  double ent_coef = 0.0;  // c2
  double max_grad_norm = 0.5;
  std::size_t total_iterations = 1;  // I, anneal denominator
  double rmsprop_alpha = 0.99;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double opt_eps = 1e-5;

  std::size_t batch_size() const { return num_envs * num_steps; }
};

Hyperparams ppo_defaults();

// RMSprop(0.99, 1e-5, no weight decay), lr 7e-4 with annealing off, M=5,
// lambda=1, K=1 on the full batch, no advantage normalization, no value
// clipping. Under this preset the clipped surrogate collapses to the plain
// policy-gradient update.
Hyperparams a2c_preset();

// Applies the same alignment steps to an arbitrary base configuration.
Hyperparams align_to_a2c(Hyperparams hp);

// Throws std::invalid_argument when a config invariant is violated.
void validate(const Hyperparams& hp);

// Which policy objective produces the gradient seeds. Training always uses
// the clipped surrogate; the plain objective exists for the equivalence
// harness and the gradient-identity check.
enum class PolicyLossPath { clipped_surrogate, a2c_objective };

// Rollout plus advantages and returns, flattened time-major
// (flat index = t * num_envs + n).
struct FlatBatch {
  std::size_t size = 0;
  std::size_t obs_dim = 0;
  std::vector<double> obs;
  std::vector<int> actions;
  std::vector<double> logp_old;
  std::vector<double> v_old;
  std::vector<double> advantages;
  std::vector<double> returns;
};

struct MiniBatch {
  std::size_t size = 0;
  std::size_t obs_dim = 0;
  std::vector<double> obs;
  std::vector<int> actions;
  std::vector<double> logp_old;
  std::vector<double> v_old;
  std::vector<double> advantages;
  std::vector<double> returns;
};

FlatBatch flatten(const RolloutBuffer& buffer,
                  const std::vector<double>& advantages,
                  const std::vector<double>& returns, std::size_t obs_dim);

MiniBatch gather(const FlatBatch& flat, const std::vector<std::size_t>& indices,
                 std::size_t start, std::size_t count);

// (x - mean) / (population std + 1e-8). Requires at least two elements.
std::vector<double> normalize_advantages(const std::vector<double>& adv);

// Scalar objective plus per-sample gradient seeds d objective / d logp_new.
struct PolicyObjective {
  double loss = 0.0;
  std::vector<double> dloss_dlogp;
};

// Clipped surrogate: mean_i min(r_i A_i, clip(r_i, 1-eps, 1+eps) A_i) with
// r_i = exp(logp_new_i - logp_old_i). Exact ties between the branches
// select the unclipped one, so an on-policy batch (r = 1) routes gradients
// identically to the plain objective.
PolicyObjective policy_objective(const std::vector<double>& logp_new,
                                 const std::vector<double>& logp_old,
                                 const std::vector<double>& advantages,
                                 double clip_coef);

// Plain policy gradient objective: mean_i logp_new_i * A_i.
PolicyObjective a2c_policy_objective(const std::vector<double>& logp_new,
                                     const std::vector<double>& advantages);

struct ValueObjective {
  double loss = 0.0;
  std::vector<double> dloss_dv;
};

// Mean squared error against returns; with clipping on, the squared error
// of the clamped prediction v_old + clip(v_new - v_old, -eps, +eps) is
// taken when it exceeds the unclipped one (ties go to the unclipped
// branch, which also receives the gradient).
ValueObjective value_loss(const std::vector<double>& returns,
                          const std::vector<double>& v_new,
                          const std::vector<double>& v_old, bool clip_vloss,
                          double clip_coef);

// L = -L_policy + c1 * L_value - c2 * L_entropy, minimized.
double total_loss(double policy_loss, double value_loss_, double entropy,
                  double vf_coef, double ent_coef);

struct LossStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double total = 0.0;
};

// Loss terms of one minibatch; when grads_out is non-null, also the full
// parameter gradient of the total loss (joint backward pass over both
// networks). Advantage normalization, when enabled, applies to a local
// copy of the minibatch advantages.
LossStats minibatch_loss(const ParamSet& params, const NetConfig& cfg,
                         const MiniBatch& mb, const Hyperparams& hp,
                         PolicyLossPath path, ParamSet* grads_out);

// Mutable state owned by one training run. Nothing is shared between runs.
struct TrainState {
  NetConfig net_cfg;
  ParamSet params;
  OptimizerState opt;
  VecEnv venv;
  RolloutCursor cursor;
  RngState action_rng;
  RngState shuffle_rng;
  std::vector<double> episode_return_acc;
  std::vector<double> recent_episode_returns;  // last 100 completed episodes
};

TrainState make_train_state(const Hyperparams& hp, std::uint64_t seed,
                            const NetConfig& cfg = NetConfig{});

struct IterationMetrics {
  std::size_t iteration = 0;
  std::size_t env_steps = 0;
  std::size_t optimizer_steps = 0;
  double mean_episodic_return = 0.0;  // over recent completed episodes; NaN if none
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

// One outer-loop iteration: optional lr anneal, rollout, bootstrap, GAE,
// flatten, then K epochs of minibatch updates (shuffling consumes the
// shuffle stream only when K > 1 or the batch is actually split).
IterationMetrics train_iteration(TrainState& state, const Hyperparams& hp,
                                 std::size_t iteration,
                                 PolicyLossPath path = PolicyLossPath::clipped_surrogate);

}  // namespace acpc
