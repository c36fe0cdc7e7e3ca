#include "acpc/optim.hpp"

#include <cmath>
#include <stdexcept>

#include "acpc/kernels.hpp"

namespace acpc {

OptimizerState make_rmsprop(const ParamSet& shape, double lr, double alpha,
                            double eps) {
  OptimizerState s;
  s.kind = OptimizerKind::rmsprop;
  s.lr = lr;
  s.alpha = alpha;
  s.beta1 = 0.0;
  s.beta2 = 0.0;
  s.eps = eps;
  s.square_avg = zeros_like(shape);
  return s;
}

OptimizerState make_adam(const ParamSet& shape, double lr, double beta1,
                         double beta2, double eps) {
  OptimizerState s;
  s.kind = OptimizerKind::adam;
  s.lr = lr;
  s.alpha = 0.0;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  s.m = zeros_like(shape);
  s.v = zeros_like(shape);
  return s;
}

double global_grad_norm(const ParamSet& grads) {
  double sum_sq = 0.0;
  for (const auto& t : grads.tensors) {
    for (double g : t.data) sum_sq += g * g;
  }
  return std::sqrt(sum_sq);
}

void clip_grad_norm(ParamSet& grads, double max_norm) {
  const double norm = global_grad_norm(grads);
  if (norm > max_norm) {
    const double factor = max_norm / norm;
    for (auto& t : grads.tensors) {
      kernels().scale(t.size(), factor, t.data.data());
    }
  }
}

void rmsprop_step(OptimizerState& state, ParamSet& params, const ParamSet& grads) {
  if (state.kind != OptimizerKind::rmsprop) {
    throw std::invalid_argument("rmsprop_step: optimizer state is not rmsprop");
  }
  state.step_count += 1;
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    kernels().rmsprop_update(params.tensors[i].size(), state.lr, state.alpha,
                             state.eps, grads.tensors[i].data.data(),
                             state.square_avg.tensors[i].data.data(),
                             params.tensors[i].data.data());
  }
}

void adam_step(OptimizerState& state, ParamSet& params, const ParamSet& grads) {
  if (state.kind != OptimizerKind::adam) {
    throw std::invalid_argument("adam_step: optimizer state is not adam");
  }
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.tensors.size(); ++i) {
    kernels().adam_update(params.tensors[i].size(), state.lr, state.beta1,
                          state.beta2, state.eps, bc1, bc2,
                          grads.tensors[i].data.data(),
                          state.m.tensors[i].data.data(),
                          state.v.tensors[i].data.data(),
                          params.tensors[i].data.data());
  }
}

void optimizer_step(OptimizerState& state, ParamSet& params, const ParamSet& grads) {
  if (state.kind == OptimizerKind::rmsprop) {
    rmsprop_step(state, params, grads);
  } else {
    adam_step(state, params, grads);
  }
}

}  // namespace acpc
