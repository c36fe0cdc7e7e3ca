#pragma once

#include <cstddef>
#include <vector>

#include "acpc/prng.hpp"
#include "acpc/tensor.hpp"

namespace acpc {

// Two separate MLPs (policy and value), each with two tanh hidden layers
// and a linear head.
struct NetConfig {
  std::size_t obs_dim = 4;
  std::size_t hidden_dim = 64;
  std::size_t num_actions = 2;
};

// Zero-valued ParamSet with the canonical tensor order for `cfg`.
ParamSet make_param_set(const NetConfig& cfg);

// Weights uniform in [-b, b) with b = sqrt(1/fan_in), drawn element by
// element in canonical order; biases stay zero.
ParamSet init_params(RngState& rng, const NetConfig& cfg);

struct PolicyOutput {
  std::size_t batch = 0;
  std::size_t num_actions = 0;
  std::vector<double> logits;     // B x A
  std::vector<double> log_probs;  // B x A; exp of each row sums to 1
  std::vector<double> entropy;    // B; in [0, ln A]
};

// Rows are processed independently in index order, so per-row results do
// not depend on the batch they appear in.
PolicyOutput policy_forward(const ParamSet& params, const NetConfig& cfg,
                            const std::vector<double>& obs, std::size_t batch);

std::vector<double> value_forward(const ParamSet& params, const NetConfig& cfg,
                                  const std::vector<double>& obs, std::size_t batch);

// Inverse-CDF draw from one row of log-probabilities: one uniform, then the
// smallest index whose cumulative probability exceeds it.
int sample_action(const double* log_probs, std::size_t num_actions, RngState& rng);

// Reverse-mode gradients of sum(grad_logits . logits) + sum(grad_values . v)
// with respect to every parameter. Accumulation is batch-major within each
// layer, layers in canonical order, so results are bitwise stable.
ParamSet backward(const ParamSet& params, const NetConfig& cfg,
                  const std::vector<double>& obs, std::size_t batch,
                  const std::vector<double>& grad_logits,
                  const std::vector<double>& grad_values);

// Row-wise numerics, exposed for direct testing.
void log_softmax_row(const double* logits, std::size_t n, double* out);
double entropy_from_log_probs(const double* log_probs, std::size_t n);

}  // namespace acpc
