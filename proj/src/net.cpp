#include "acpc/net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "acpc/kernels.hpp"

namespace acpc {

namespace {

// Tensor positions within the canonical order. Each network contributes
// fc1.{weight,bias}, fc2.{weight,bias}, head.{weight,bias}.
enum TensorIndex : std::size_t {
  p_fc1_w = 0, p_fc1_b, p_fc2_w, p_fc2_b, p_head_w, p_head_b,
  v_fc1_w, v_fc1_b, v_fc2_w, v_fc2_b, v_head_w, v_head_b,
  tensor_count,
};

void check_finite(const std::vector<double>& obs, std::size_t batch,
                  std::size_t obs_dim, const char* where) {
  if (obs.size() != batch * obs_dim) {
    throw std::invalid_argument(std::string(where) + ": observation shape mismatch");
  }
  for (double v : obs) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(where) + ": non-finite observation");
    }
  }
}

// y[row][:] = bias + sum_i x[row][i] * w[i][:], rows independent.
void linear_forward(const Tensor& w, const Tensor& b, const double* x,
                    std::size_t batch, std::size_t fan_in, std::size_t fan_out,
                    double* y) {
  const KernelOps& k = kernels();
  for (std::size_t row = 0; row < batch; ++row) {
    double* yr = y + row * fan_out;
    std::copy(b.data.begin(), b.data.end(), yr);
    const double* xr = x + row * fan_in;
    for (std::size_t i = 0; i < fan_in; ++i) {
      k.axpy(fan_out, xr[i], w.data.data() + i * fan_out, yr);
    }
  }
}

void tanh_inplace(std::size_t n, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
}

struct MlpCache {
  std::vector<double> h1;   // B x hidden, post-tanh
  std::vector<double> h2;   // B x hidden, post-tanh
  std::vector<double> out;  // B x head width
};

MlpCache mlp_forward(const ParamSet& params, std::size_t base,
                     const std::vector<double>& obs, std::size_t batch,
                     const NetConfig& cfg, std::size_t head_width) {
  const std::size_t h = cfg.hidden_dim;
  MlpCache c;
  c.h1.resize(batch * h);
  c.h2.resize(batch * h);
  c.out.resize(batch * head_width);
  linear_forward(params.tensors[base + 0], params.tensors[base + 1], obs.data(),
                 batch, cfg.obs_dim, h, c.h1.data());
  tanh_inplace(batch * h, c.h1.data());
  linear_forward(params.tensors[base + 2], params.tensors[base + 3], c.h1.data(),
                 batch, h, h, c.h2.data());
  tanh_inplace(batch * h, c.h2.data());
  linear_forward(params.tensors[base + 4], params.tensors[base + 5], c.h2.data(),
                 batch, h, head_width, c.out.data());
  return c;
}

std::vector<double> transpose(const Tensor& w, std::size_t fan_in, std::size_t fan_out) {
  std::vector<double> wt(fan_in * fan_out);
  for (std::size_t i = 0; i < fan_in; ++i) {
    for (std::size_t j = 0; j < fan_out; ++j) {
      wt[j * fan_in + i] = w.data[i * fan_out + j];
    }
  }
  return wt;
}

// Reverse pass through one MLP given d loss / d head-output. Gradients
// accumulate batch-major per layer, head to input, matching the fixed
// order promised by backward().
void mlp_backward(const ParamSet& params, std::size_t base,
                  const std::vector<double>& obs, std::size_t batch,
                  const NetConfig& cfg, std::size_t head_width,
                  const MlpCache& cache, const double* g_out, ParamSet& grads) {
  const KernelOps& k = kernels();
  const std::size_t h = cfg.hidden_dim;
  const std::size_t d = cfg.obs_dim;

  Tensor& g_head_w = grads.tensors[base + 4];
  Tensor& g_head_b = grads.tensors[base + 5];
  for (std::size_t row = 0; row < batch; ++row) {
    const double* gr = g_out + row * head_width;
    k.axpy(head_width, 1.0, gr, g_head_b.data.data());
    const double* h2r = cache.h2.data() + row * h;
    for (std::size_t i = 0; i < h; ++i) {
      k.axpy(head_width, h2r[i], gr, g_head_w.data.data() + i * head_width);
    }
  }

  const std::vector<double> head_wt = transpose(params.tensors[base + 4], h, head_width);
  std::vector<double> g_h2(batch * h, 0.0);
  for (std::size_t row = 0; row < batch; ++row) {
    const double* gr = g_out + row * head_width;
    for (std::size_t j = 0; j < head_width; ++j) {
      k.axpy(h, gr[j], head_wt.data() + j * h, g_h2.data() + row * h);
    }
  }
  k.tanh_backward(batch * h, cache.h2.data(), g_h2.data());

  Tensor& g_fc2_w = grads.tensors[base + 2];
  Tensor& g_fc2_b = grads.tensors[base + 3];
  for (std::size_t row = 0; row < batch; ++row) {
    const double* gr = g_h2.data() + row * h;
    k.axpy(h, 1.0, gr, g_fc2_b.data.data());
    const double* h1r = cache.h1.data() + row * h;
    for (std::size_t i = 0; i < h; ++i) {
      k.axpy(h, h1r[i], gr, g_fc2_w.data.data() + i * h);
    }
  }

  const std::vector<double> fc2_wt = transpose(params.tensors[base + 2], h, h);
  std::vector<double> g_h1(batch * h, 0.0);
  for (std::size_t row = 0; row < batch; ++row) {
    const double* gr = g_h2.data() + row * h;
    for (std::size_t j = 0; j < h; ++j) {
      k.axpy(h, gr[j], fc2_wt.data() + j * h, g_h1.data() + row * h);
    }
  }
  k.tanh_backward(batch * h, cache.h1.data(), g_h1.data());

  Tensor& g_fc1_w = grads.tensors[base + 0];
  Tensor& g_fc1_b = grads.tensors[base + 1];
  for (std::size_t row = 0; row < batch; ++row) {
    const double* gr = g_h1.data() + row * h;
    k.axpy(h, 1.0, gr, g_fc1_b.data.data());
    const double* xr = obs.data() + row * d;
    for (std::size_t i = 0; i < d; ++i) {
      k.axpy(h, xr[i], gr, g_fc1_w.data.data() + i * h);
    }
  }
}

Tensor named(std::string name, std::vector<std::size_t> shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return {std::move(name), std::move(shape), std::vector<double>(n, 0.0)};
}

}  // namespace

ParamSet make_param_set(const NetConfig& cfg) {
  const std::size_t d = cfg.obs_dim;
  const std::size_t h = cfg.hidden_dim;
  const std::size_t a = cfg.num_actions;
  ParamSet p;
  p.tensors.reserve(tensor_count);
  p.tensors.push_back(named("policy.fc1.weight", {d, h}));
  p.tensors.push_back(named("policy.fc1.bias", {h}));
  p.tensors.push_back(named("policy.fc2.weight", {h, h}));
  p.tensors.push_back(named("policy.fc2.bias", {h}));
  p.tensors.push_back(named("policy.head.weight", {h, a}));
  p.tensors.push_back(named("policy.head.bias", {a}));
  p.tensors.push_back(named("value.fc1.weight", {d, h}));
  p.tensors.push_back(named("value.fc1.bias", {h}));
  p.tensors.push_back(named("value.fc2.weight", {h, h}));
  p.tensors.push_back(named("value.fc2.bias", {h}));
  p.tensors.push_back(named("value.head.weight", {h, 1}));
  p.tensors.push_back(named("value.head.bias", {1}));
  return p;
}

ParamSet init_params(RngState& rng, const NetConfig& cfg) {
  ParamSet p = make_param_set(cfg);
  for (auto& t : p.tensors) {
    if (t.shape.size() != 2) continue;  // biases stay zero, no draws
    const double bound = std::sqrt(1.0 / static_cast<double>(t.shape[0]));
    for (double& w : t.data) {
      w = (next_uniform(rng) * 2.0 - 1.0) * bound;
    }
  }
  return p;
}

void log_softmax_row(const double* logits, std::size_t n, double* out) {
  double max_logit = logits[0];
  for (std::size_t i = 1; i < n; ++i) max_logit = std::max(max_logit, logits[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::exp(logits[i] - max_logit);
  const double lse = max_logit + std::log(sum);
  for (std::size_t i = 0; i < n; ++i) out[i] = logits[i] - lse;
}

double entropy_from_log_probs(const double* log_probs, std::size_t n) {
  double h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::exp(log_probs[i]);
    h -= p * log_probs[i];
  }
  return h;
}

PolicyOutput policy_forward(const ParamSet& params, const NetConfig& cfg,
                            const std::vector<double>& obs, std::size_t batch) {
  check_finite(obs, batch, cfg.obs_dim, "policy_forward");
  const std::size_t a = cfg.num_actions;
  MlpCache c = mlp_forward(params, p_fc1_w, obs, batch, cfg, a);
  PolicyOutput out;
  out.batch = batch;
  out.num_actions = a;
  out.logits = std::move(c.out);
  out.log_probs.resize(batch * a);
  out.entropy.resize(batch);
  for (std::size_t row = 0; row < batch; ++row) {
    log_softmax_row(out.logits.data() + row * a, a, out.log_probs.data() + row * a);
    out.entropy[row] = entropy_from_log_probs(out.log_probs.data() + row * a, a);
  }
  return out;
}

std::vector<double> value_forward(const ParamSet& params, const NetConfig& cfg,
                                  const std::vector<double>& obs, std::size_t batch) {
  check_finite(obs, batch, cfg.obs_dim, "value_forward");
  MlpCache c = mlp_forward(params, v_fc1_w, obs, batch, cfg, 1);
  return std::move(c.out);
}

int sample_action(const double* log_probs, std::size_t num_actions, RngState& rng) {
  const double u = next_uniform(rng);
  double cumulative = 0.0;
  for (std::size_t a = 0; a + 1 < num_actions; ++a) {
    cumulative += std::exp(log_probs[a]);
    if (cumulative > u) return static_cast<int>(a);
  }
  return static_cast<int>(num_actions - 1);
}

ParamSet backward(const ParamSet& params, const NetConfig& cfg,
                  const std::vector<double>& obs, std::size_t batch,
                  const std::vector<double>& grad_logits,
                  const std::vector<double>& grad_values) {
  check_finite(obs, batch, cfg.obs_dim, "backward");
  if (grad_logits.size() != batch * cfg.num_actions || grad_values.size() != batch) {
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  }
  ParamSet grads = zeros_like(params);
  const MlpCache pc = mlp_forward(params, p_fc1_w, obs, batch, cfg, cfg.num_actions);
  mlp_backward(params, p_fc1_w, obs, batch, cfg, cfg.num_actions, pc,
               grad_logits.data(), grads);
  const MlpCache vc = mlp_forward(params, v_fc1_w, obs, batch, cfg, 1);
  mlp_backward(params, v_fc1_w, obs, batch, cfg, 1, vc, grad_values.data(), grads);
  return grads;
}

}  // namespace acpc
