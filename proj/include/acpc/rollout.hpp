#pragma once

#include <cstddef>
#include <vector>

#include "acpc/env.hpp"
#include "acpc/net.hpp"
#include "acpc/prng.hpp"
#include "acpc/tensor.hpp"

namespace acpc {

// The rollout tuple D = (o, a, log pi(a|o), r, d, v), [step][env] row-major.
// Done flags are the values cached at step entry, so dones[t] describes the
// boundary before step t.
struct RolloutBuffer {
  std::size_t steps = 0;
  std::size_t envs = 0;
  std::vector<double> obs;        // M x N x 4
  std::vector<int> actions;       // M x N
  std::vector<double> log_probs;  // M x N
  std::vector<double> rewards;    // M x N
  std::vector<int> dones;         // M x N
  std::vector<double> values;     // M x N
};

// (o_next, d_next) carried across iterations; collect() reads the pair at
// entry and leaves it describing the state after the final step.
struct RolloutCursor {
  std::vector<double> obs_next;  // N x 4
  std::vector<int> done_next;    // N
};

// Drives the policy for `steps` environment steps: caches (o_t, d_t),
// evaluates both networks, samples one action per env in index order from
// the shared action stream, steps the vectorized env, records all six
// fields.
RolloutBuffer collect(const ParamSet& params, const NetConfig& cfg,
                      VecEnv& venv, RolloutCursor& cursor, std::size_t steps,
                      RngState& action_rng);

}  // namespace acpc
