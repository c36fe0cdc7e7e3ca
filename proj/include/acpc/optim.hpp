#pragma once

#include <cstdint>

#include "acpc/tensor.hpp"

namespace acpc {

enum class OptimizerKind { rmsprop, adam };

struct OptimizerState {
  OptimizerKind kind;
  double lr;
  double alpha;  // rmsprop square-average decay
  double beta1;  // adam first-moment decay
  double beta2;  // adam second-moment decay
  double eps;    // added outside the square root in both rules
  std::int64_t step_count = 0;
  ParamSet square_avg;  // rmsprop only
  ParamSet m, v;        // adam only
};

OptimizerState make_rmsprop(const ParamSet& shape, double lr,
                            double alpha = 0.99, double eps = 1e-5);
OptimizerState make_adam(const ParamSet& shape, double lr, double beta1 = 0.9,
                         double beta2 = 0.999, double eps = 1e-5);

// Single L2 norm over every tensor jointly, summed in canonical order.
double global_grad_norm(const ParamSet& grads);

// Scales every gradient by max_norm/norm when the global norm exceeds
// max_norm; below the threshold the input passes through bitwise.
void clip_grad_norm(ParamSet& grads, double max_norm);

// s <- alpha*s + (1-alpha)*g^2 ; p <- p - lr*g/(sqrt(s) + eps).
// Throws std::invalid_argument when state.kind is not rmsprop.
void rmsprop_step(OptimizerState& state, ParamSet& params, const ParamSet& grads);

// Bias-corrected Adam. Throws when state.kind is not adam.
void adam_step(OptimizerState& state, ParamSet& params, const ParamSet& grads);

void optimizer_step(OptimizerState& state, ParamSet& params, const ParamSet& grads);

}  // namespace acpc
