#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "acpc/prng.hpp"

namespace acpc {

using Observation = std::array<double, 4>;

// Cart-pole physical state plus the step counter used for truncation.
struct EnvState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  int steps_taken = 0;
};

struct StepResult {
  Observation obs;
  double reward;
  int done;
};

// Standard cart-pole constants; integration is semi-implicit Euler
// (velocities first, then positions with the updated velocities).
namespace cartpole {
inline constexpr double gravity = 9.8;
inline constexpr double cart_mass = 1.0;
inline constexpr double pole_mass = 0.1;
inline constexpr double total_mass = cart_mass + pole_mass;
inline constexpr double half_pole_length = 0.5;
inline constexpr double pole_mass_length = pole_mass * half_pole_length;
inline constexpr double force_mag = 10.0;
inline constexpr double tau = 0.02;
inline constexpr double x_threshold = 2.4;
inline constexpr double theta_threshold = 12.0 * M_PI / 180.0;
inline constexpr int max_episode_steps = 500;
}  // namespace cartpole

// Fresh state with each component uniform in [-0.05, 0.05], consuming
// exactly four ordered draws (x, x_dot, theta, theta_dot).
Observation reset_one(EnvState& state, RngState& rng);

// One physics step with force +/-10 N. Reward is 1.0 every step; done is
// set when |x| > 2.4, |theta| > 12 degrees, or 500 steps are reached, all
// evaluated on the post-step state. Throws std::invalid_argument for
// actions outside {0, 1}.
StepResult step_one(EnvState& state, int action);

// N independent cart-poles, each owning RNG stream 1+index of the run
// seed. Stepped strictly in index order for reproducibility.
struct VecEnv {
  std::vector<EnvState> envs;
  std::vector<RngState> rngs;

  VecEnv(std::size_t num_envs, std::uint64_t seed);

  std::size_t size() const { return envs.size(); }

  // Resets every sub-environment in index order; N x 4 row-major.
  std::vector<double> reset_all();
};

struct VecStepResult {
  std::vector<double> obs;      // N x 4; post-reset rows where done = 1
  std::vector<double> rewards;  // N
  std::vector<int> dones;       // N
};

// Steps each sub-environment; finished episodes are auto-reset from the
// env's own stream while the terminal reward and done = 1 are still
// reported for that slot.
VecStepResult vec_step(VecEnv& venv, const std::vector<int>& actions);

}  // namespace acpc
