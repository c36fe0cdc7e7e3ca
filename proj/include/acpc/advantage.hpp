#pragma once

#include <cstddef>
#include <vector>

namespace acpc {

// Generalized advantage estimation over a [steps][envs] rollout, computed
// by the backward recursion
//   delta_t = r_t + gamma * nonterminal_t * v_{t+1} - v_t
//   A_t     = delta_t + gamma * lambda * nonterminal_t * A_{t+1}
// per env in index order, t from steps-1 down to 0. Done flags are cached
// at step entry, so the flag gating transition t -> t+1 is dones[t+1]
// (dones_next past the last step). lambda = 1 recovers discounted
// Monte-Carlo returns minus values; lambda = 0 gives one-step residuals.
std::vector<double> gae(const std::vector<double>& rewards,
                        const std::vector<double>& values,
                        const std::vector<int>& dones,
                        const std::vector<double>& values_next,
                        const std::vector<int>& dones_next,
                        std::size_t steps, std::size_t envs,
                        double gamma, double lambda);

// R = A + v elementwise.
std::vector<double> returns_from(const std::vector<double>& advantages,
                                 const std::vector<double>& values);

}  // namespace acpc
