#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "acpc/checkpoint.hpp"
#include "acpc/learner.hpp"

namespace acpc {

struct TensorDiff {
  std::string name;
  double max_abs_diff = 0.0;
};

struct EquivalenceReport {
  std::uint64_t seed = 0;
  std::uint64_t total_env_steps = 0;
  bool bitwise_equal = false;
  double max_abs_param_diff = 0.0;
  std::vector<TensorDiff> per_tensor;
  Hyperparams config_a;
  Hyperparams config_b;
};

struct TrainResult {
  ParamSet params;
  std::vector<IterationMetrics> log;
  Hyperparams hp;
};

// Low-level driver: a fixed number of outer-loop iterations.
TrainResult run_training_iters(const Hyperparams& hp, PolicyLossPath path,
                               std::uint64_t seed, std::size_t iterations);

// total_env_steps must be an exact multiple of num_envs * num_steps;
// anything else is rejected with a message. Always trains through the
// clipped-surrogate path.
TrainResult run_training(const Hyperparams& hp, std::uint64_t seed,
                         std::uint64_t total_env_steps);

// Tensor-by-tensor comparison; bitwise_equal is bit-identity of every value.
EquivalenceReport compare_params(const ParamSet& a, const ParamSet& b);

// Trains the same seed twice: once through the plain-objective path under
// the A2C preset, once through the clipped-surrogate path under a PPO
// configuration with the full alignment applied, and compares checkpoints.
EquivalenceReport check_equivalence(std::uint64_t seed, std::uint64_t total_env_steps);

// One alignment knob deliberately undone on the PPO side, for the
// negative-control suite.
enum class Misalignment {
  optimizer_adam,
  lr_3e4,
  steps_128,
  lambda_095,
  epochs_4_minibatch_4,
  normalize_advantage_on,
  value_clip_on,
};

const char* misalignment_name(Misalignment m);

EquivalenceReport check_equivalence_perturbed(std::uint64_t seed,
                                              std::uint64_t total_env_steps,
                                              Misalignment which);

struct GradientIdentityReport {
  std::uint64_t seed = 0;
  std::uint32_t trials = 0;
  double max_abs_gradient_diff = 0.0;
};

// For each trial: random params, a synthetic on-policy batch (logp_old
// taken verbatim from the current policy), full parameter gradients via
// the clipped surrogate and via the plain objective. The maximum absolute
// difference across all trials is expected to be exactly 0.
GradientIdentityReport gradient_identity_check(std::uint64_t seed, std::uint32_t trials);

// Throws CheckpointIoError with distinct codes for missing files, version
// mismatches, and tensor name/shape mismatches.
EquivalenceReport compare_checkpoints(const std::string& path_a,
                                      const std::string& path_b);

// Flat key=value text overrides (one per line, '#' comments allowed).
Hyperparams apply_config_overrides(Hyperparams hp, const std::string& path);

// One CSV line per iteration:
// iteration,env_steps,mean_episodic_return,policy_loss,value_loss,entropy
void write_metrics_csv(const std::string& path,
                       const std::vector<IterationMetrics>& log);

nlohmann::json to_json(const Hyperparams& hp);
nlohmann::json to_json(const EquivalenceReport& report);
nlohmann::json to_json(const GradientIdentityReport& report);

}  // namespace acpc
