#include "acpc/env.hpp"

#include <cmath>
#include <stdexcept>

namespace acpc {

Observation reset_one(EnvState& state, RngState& rng) {
  state = EnvState{};
  state.x = -0.05 + next_uniform(rng) * 0.1;
  state.x_dot = -0.05 + next_uniform(rng) * 0.1;
  state.theta = -0.05 + next_uniform(rng) * 0.1;
  state.theta_dot = -0.05 + next_uniform(rng) * 0.1;
  return {state.x, state.x_dot, state.theta, state.theta_dot};
}

StepResult step_one(EnvState& state, int action) {
  if (action != 0 && action != 1) {
    throw std::invalid_argument("step_one: action must be 0 or 1");
  }
  using namespace cartpole;

  const double force = action == 1 ? force_mag : -force_mag;
  const double cos_theta = std::cos(state.theta);
  const double sin_theta = std::sin(state.theta);

  const double temp =
      (force + pole_mass_length * state.theta_dot * state.theta_dot * sin_theta) /
      total_mass;
  const double theta_acc =
      (gravity * sin_theta - cos_theta * temp) /
      (half_pole_length * (4.0 / 3.0 - pole_mass * cos_theta * cos_theta / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_theta / total_mass;

  // Semi-implicit Euler: velocities first, positions use the new velocity.
  state.x_dot += tau * x_acc;
  state.x += tau * state.x_dot;
  state.theta_dot += tau * theta_acc;
  state.theta += tau * state.theta_dot;
  state.steps_taken += 1;

  const bool failed = std::abs(state.x) > x_threshold ||
                      std::abs(state.theta) > theta_threshold;
  const bool truncated = state.steps_taken >= max_episode_steps;
  return {{state.x, state.x_dot, state.theta, state.theta_dot},
          1.0,
          failed || truncated ? 1 : 0};
}

VecEnv::VecEnv(std::size_t num_envs, std::uint64_t seed)
    : envs(num_envs) {
  rngs.reserve(num_envs);
  for (std::size_t i = 0; i < num_envs; ++i) {
    rngs.push_back(seed_stream(seed, streams::env(i)));
  }
}

std::vector<double> VecEnv::reset_all() {
  std::vector<double> obs(envs.size() * 4);
  for (std::size_t i = 0; i < envs.size(); ++i) {
    const Observation o = reset_one(envs[i], rngs[i]);
    for (std::size_t c = 0; c < 4; ++c) obs[i * 4 + c] = o[c];
  }
  return obs;
}

VecStepResult vec_step(VecEnv& venv, const std::vector<int>& actions) {
  const std::size_t n = venv.size();
  if (actions.size() != n) {
    throw std::invalid_argument("vec_step: actions length must equal env count");
  }
  VecStepResult out;
  out.obs.resize(n * 4);
  out.rewards.resize(n);
  out.dones.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    StepResult r = step_one(venv.envs[i], actions[i]);
    Observation slot_obs = r.obs;
    if (r.done) {
      // Auto-reset from this env's own stream; report the fresh observation
      // together with the terminal reward and done flag.
      slot_obs = reset_one(venv.envs[i], venv.rngs[i]);
    }
    for (std::size_t c = 0; c < 4; ++c) out.obs[i * 4 + c] = slot_obs[c];
    out.rewards[i] = r.reward;
    out.dones[i] = r.done;
  }
  return out;
}

}  // namespace acpc
