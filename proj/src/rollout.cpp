#include "acpc/rollout.hpp"

#include <algorithm>
#include <stdexcept>

namespace acpc {

RolloutBuffer collect(const ParamSet& params, const NetConfig& cfg,
                      VecEnv& venv, RolloutCursor& cursor, std::size_t steps,
                      RngState& action_rng) {
  if (steps < 1) throw std::invalid_argument("collect: steps must be >= 1");
  const std::size_t n = venv.size();
  const std::size_t a = cfg.num_actions;
  if (cursor.obs_next.size() != n * cfg.obs_dim || cursor.done_next.size() != n) {
    throw std::invalid_argument("collect: cursor shape mismatch");
  }

  RolloutBuffer buf;
  buf.steps = steps;
  buf.envs = n;
  buf.obs.resize(steps * n * cfg.obs_dim);
  buf.actions.resize(steps * n);
  buf.log_probs.resize(steps * n);
  buf.rewards.resize(steps * n);
  buf.dones.resize(steps * n);
  buf.values.resize(steps * n);

  std::vector<int> actions(n);
  for (std::size_t t = 0; t < steps; ++t) {
    std::copy(cursor.obs_next.begin(), cursor.obs_next.end(),
              buf.obs.begin() + t * n * cfg.obs_dim);
    std::copy(cursor.done_next.begin(), cursor.done_next.end(),
              buf.dones.begin() + t * n);

    const PolicyOutput pol = policy_forward(params, cfg, cursor.obs_next, n);
    const std::vector<double> vals = value_forward(params, cfg, cursor.obs_next, n);

    for (std::size_t env = 0; env < n; ++env) {
      actions[env] = sample_action(pol.log_probs.data() + env * a, a, action_rng);
      buf.actions[t * n + env] = actions[env];
      buf.log_probs[t * n + env] = pol.log_probs[env * a + actions[env]];
      buf.values[t * n + env] = vals[env];
    }

    const VecStepResult sr = vec_step(venv, actions);
    std::copy(sr.rewards.begin(), sr.rewards.end(), buf.rewards.begin() + t * n);
    cursor.obs_next = sr.obs;
    cursor.done_next = sr.dones;
  }
  return buf;
}

}  // namespace acpc
