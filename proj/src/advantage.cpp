#include "acpc/advantage.hpp"

#include <stdexcept>

namespace acpc {

std::vector<double> gae(const std::vector<double>& rewards,
                        const std::vector<double>& values,
                        const std::vector<int>& dones,
                        const std::vector<double>& values_next,
                        const std::vector<int>& dones_next,
                        std::size_t steps, std::size_t envs,
                        double gamma, double lambda) {
  const std::size_t total = steps * envs;
  if (rewards.size() != total || values.size() != total || dones.size() != total ||
      values_next.size() != envs || dones_next.size() != envs) {
    throw std::invalid_argument("gae: shape mismatch");
  }
  if (gamma < 0.0 || gamma > 1.0 || lambda < 0.0 || lambda > 1.0) {
    throw std::invalid_argument("gae: gamma and lambda must lie in [0, 1]");
  }
  std::vector<double> advantages(total);
  for (std::size_t n = 0; n < envs; ++n) {
    double next_advantage = 0.0;
    for (std::size_t ti = steps; ti-- > 0;) {
      // The flag gating transition t -> t+1 was cached at entry of step t+1.
      const double nonterminal =
          1.0 - static_cast<double>(ti + 1 < steps ? dones[(ti + 1) * envs + n]
                                                   : dones_next[n]);
      const double value_next =
          ti + 1 < steps ? values[(ti + 1) * envs + n] : values_next[n];
      const double delta = rewards[ti * envs + n] +
                           gamma * nonterminal * value_next -
                           values[ti * envs + n];
      const double adv = delta + gamma * lambda * nonterminal * next_advantage;
      advantages[ti * envs + n] = adv;
      next_advantage = adv;
    }
  }
  return advantages;
}

std::vector<double> returns_from(const std::vector<double>& advantages,
                                 const std::vector<double>& values) {
  if (advantages.size() != values.size()) {
    throw std::invalid_argument("returns_from: shape mismatch");
  }
  std::vector<double> returns(advantages.size());
  for (std::size_t i = 0; i < returns.size(); ++i) {
    returns[i] = advantages[i] + values[i];
  }
  return returns;
}

}  // namespace acpc
