#include "acpc/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace acpc {

Hyperparams ppo_defaults() {
  Hyperparams hp;
  hp.optimizer_kind = OptimizerKind::adam;
  hp.lr = 3e-4;
  hp.anneal_lr = false;
  hp.num_envs = 4;
  hp.num_steps = 25;
  hp.gamma = 0.99;
  hp.gae_lambda = 0.95;
  hp.update_epochs = 4;
  hp.minibatch_size = 25;
  hp.normalize_advantage = true;
  hp.clip_coef = 0.2;
  hp.clip_vloss = true;
  hp.vf_coef = 0.5;
  hp.ent_coef = 0.0;
  hp.max_grad_norm = 0.5;
  return hp;
}

Hyperparams align_to_a2c(Hyperparams hp) {
  hp.optimizer_kind = OptimizerKind::rmsprop;  // alpha 0.99, eps 1e-5, no decay
  hp.rmsprop_alpha = 0.99;
  hp.opt_eps = 1e-5;
  hp.lr = 0.0007;
  hp.anneal_lr = false;
  hp.num_steps = 5;
  hp.gae_lambda = 1.0;
  hp.update_epochs = 1;
  hp.minibatch_size = hp.num_envs * hp.num_steps;  // one full-batch update
  hp.normalize_advantage = false;
  hp.clip_vloss = false;
  return hp;
}

Hyperparams a2c_preset() { return align_to_a2c(ppo_defaults()); }

void validate(const Hyperparams& hp) {
  if (hp.num_envs < 1 || hp.num_steps < 1 || hp.update_epochs < 1) {
    throw std::invalid_argument("hyperparams: counts must be >= 1");
  }
  if (hp.minibatch_size < 1 || hp.batch_size() % hp.minibatch_size != 0) {
    throw std::invalid_argument(
        "hyperparams: minibatch_size must divide num_envs * num_steps");
  }
  if (hp.update_epochs > 1 && hp.clip_coef <= 0.0) {
    throw std::invalid_argument("hyperparams: clip_coef must be > 0 when K > 1");
  }
  if (hp.anneal_lr && hp.total_iterations < 1) {
    throw std::invalid_argument(
        "hyperparams: annealing needs total_iterations >= 1");
  }
  if (hp.gamma < 0.0 || hp.gamma > 1.0 || hp.gae_lambda < 0.0 || hp.gae_lambda > 1.0) {
    throw std::invalid_argument("hyperparams: gamma and lambda must lie in [0, 1]");
  }
}

FlatBatch flatten(const RolloutBuffer& buffer,
                  const std::vector<double>& advantages,
                  const std::vector<double>& returns, std::size_t obs_dim) {
  // [t][n] storage is already time-major, so flat index t*N + n is a copy.
  FlatBatch flat;
  flat.size = buffer.steps * buffer.envs;
  flat.obs_dim = obs_dim;
  flat.obs = buffer.obs;
  flat.actions = buffer.actions;
  flat.logp_old = buffer.log_probs;
  flat.v_old = buffer.values;
  flat.advantages = advantages;
  flat.returns = returns;
  return flat;
}

MiniBatch gather(const FlatBatch& flat, const std::vector<std::size_t>& indices,
                 std::size_t start, std::size_t count) {
  MiniBatch mb;
  mb.size = count;
  mb.obs_dim = flat.obs_dim;
  mb.obs.resize(count * flat.obs_dim);
  mb.actions.resize(count);
  mb.logp_old.resize(count);
  mb.v_old.resize(count);
  mb.advantages.resize(count);
  mb.returns.resize(count);
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t src = indices[start + r];
    std::copy(flat.obs.begin() + src * flat.obs_dim,
              flat.obs.begin() + (src + 1) * flat.obs_dim,
              mb.obs.begin() + r * flat.obs_dim);
    mb.actions[r] = flat.actions[src];
    mb.logp_old[r] = flat.logp_old[src];
    mb.v_old[r] = flat.v_old[src];
    mb.advantages[r] = flat.advantages[src];
    mb.returns[r] = flat.returns[src];
  }
  return mb;
}

std::vector<double> normalize_advantages(const std::vector<double>& adv) {
  const std::size_t m = adv.size();
  if (m < 2) {
    throw std::invalid_argument("normalize_advantages: need at least 2 samples");
  }
  double sum = 0.0;
  for (double a : adv) sum += a;
  const double mean = sum / static_cast<double>(m);
  double sq_sum = 0.0;
  for (double a : adv) {
    const double d = a - mean;
    sq_sum += d * d;
  }
  const double std_dev = std::sqrt(sq_sum / static_cast<double>(m));
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = (adv[i] - mean) / (std_dev + 1e-8);
  }
  return out;
}

PolicyObjective policy_objective(const std::vector<double>& logp_new,
                                 const std::vector<double>& logp_old,
                                 const std::vector<double>& advantages,
                                 double clip_coef) {
  const std::size_t m = logp_new.size();
  if (logp_old.size() != m || advantages.size() != m || m == 0) {
    throw std::invalid_argument("policy_objective: shape mismatch");
  }
  const double lo = 1.0 - clip_coef;
  const double hi = 1.0 + clip_coef;
  const double dm = static_cast<double>(m);
  PolicyObjective out;
  out.dloss_dlogp.resize(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double ratio = std::exp(logp_new[i] - logp_old[i]);
    const double unclipped = ratio * advantages[i];
    const double clipped = std::clamp(ratio, lo, hi) * advantages[i];
    if (unclipped <= clipped) {  // ties select the unclipped branch
      sum += unclipped;
      out.dloss_dlogp[i] = unclipped / dm;
    } else {
      sum += clipped;
      out.dloss_dlogp[i] =
          (ratio > lo && ratio < hi) ? unclipped / dm : 0.0;
    }
  }
  out.loss = sum / dm;
  return out;
}

PolicyObjective a2c_policy_objective(const std::vector<double>& logp_new,
                                     const std::vector<double>& advantages) {
  const std::size_t m = logp_new.size();
  if (advantages.size() != m || m == 0) {
    throw std::invalid_argument("a2c_policy_objective: shape mismatch");
  }
  const double dm = static_cast<double>(m);
  PolicyObjective out;
  out.dloss_dlogp.resize(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sum += logp_new[i] * advantages[i];
    out.dloss_dlogp[i] = advantages[i] / dm;
  }
  out.loss = sum / dm;
  return out;
}

ValueObjective value_loss(const std::vector<double>& returns,
                          const std::vector<double>& v_new,
                          const std::vector<double>& v_old, bool clip_vloss,
                          double clip_coef) {
  const std::size_t m = returns.size();
  if (v_new.size() != m || v_old.size() != m || m == 0) {
    throw std::invalid_argument("value_loss: shape mismatch");
  }
  const double dm = static_cast<double>(m);
  ValueObjective out;
  out.dloss_dv.resize(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double err = v_new[i] - returns[i];
    if (!clip_vloss) {
      sum += err * err;
      out.dloss_dv[i] = 2.0 * err / dm;
      continue;
    }
    const double dv = v_new[i] - v_old[i];
    const double v_clipped = v_old[i] + std::clamp(dv, -clip_coef, clip_coef);
    const double err_clipped = v_clipped - returns[i];
    const double unclipped_sq = err * err;
    const double clipped_sq = err_clipped * err_clipped;
    if (unclipped_sq >= clipped_sq) {  // ties select the unclipped branch
      sum += unclipped_sq;
      out.dloss_dv[i] = 2.0 * err / dm;
    } else {
      sum += clipped_sq;
      out.dloss_dv[i] =
          (dv > -clip_coef && dv < clip_coef) ? 2.0 * err_clipped / dm : 0.0;
    }
  }
  out.loss = sum / dm;
  return out;
}

double total_loss(double policy_loss, double value_loss_, double entropy,
                  double vf_coef, double ent_coef) {
  return -policy_loss + vf_coef * value_loss_ - ent_coef * entropy;
}

LossStats minibatch_loss(const ParamSet& params, const NetConfig& cfg,
                         const MiniBatch& mb, const Hyperparams& hp,
                         PolicyLossPath path, ParamSet* grads_out) {
  const std::size_t m = mb.size;
  const std::size_t a = cfg.num_actions;

  std::vector<double> normalized;
  const std::vector<double>* adv = &mb.advantages;
  if (hp.normalize_advantage) {
    normalized = normalize_advantages(mb.advantages);
    adv = &normalized;
  }

  const PolicyOutput pol = policy_forward(params, cfg, mb.obs, m);
  const std::vector<double> v_new = value_forward(params, cfg, mb.obs, m);

  std::vector<double> logp_new(m);
  for (std::size_t i = 0; i < m; ++i) {
    logp_new[i] = pol.log_probs[i * a + static_cast<std::size_t>(mb.actions[i])];
  }

  const PolicyObjective po =
      path == PolicyLossPath::clipped_surrogate
          ? policy_objective(logp_new, mb.logp_old, *adv, hp.clip_coef)
          : a2c_policy_objective(logp_new, *adv);
  const ValueObjective vo =
      value_loss(mb.returns, v_new, mb.v_old, hp.clip_vloss, hp.clip_coef);

  double entropy_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) entropy_sum += pol.entropy[i];
  const double entropy_mean = entropy_sum / static_cast<double>(m);

  LossStats stats;
  stats.policy_loss = po.loss;
  stats.value_loss = vo.loss;
  stats.entropy = entropy_mean;
  stats.total = total_loss(po.loss, vo.loss, entropy_mean, hp.vf_coef, hp.ent_coef);

  if (grads_out != nullptr) {
    std::vector<double> grad_logits(m * a, 0.0);
    std::vector<double> grad_values(m);
    const double dm = static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double seed = po.dloss_dlogp[i];
      const auto action = static_cast<std::size_t>(mb.actions[i]);
      for (std::size_t k = 0; k < a; ++k) {
        const double p = std::exp(pol.log_probs[i * a + k]);
        const double indicator = k == action ? 1.0 : 0.0;
        grad_logits[i * a + k] = -seed * (indicator - p);
      }
      if (hp.ent_coef != 0.0) {
        const double h = pol.entropy[i];
        for (std::size_t k = 0; k < a; ++k) {
          const double lp = pol.log_probs[i * a + k];
          const double p = std::exp(lp);
          // d(-c2 * H_i / m) / d logit_k, with dH/dz_k = -p_k (lp_k + H).
          grad_logits[i * a + k] += (hp.ent_coef / dm) * (p * (lp + h));
        }
      }
      grad_values[i] = hp.vf_coef * vo.dloss_dv[i];
    }
    *grads_out = backward(params, cfg, mb.obs, m, grad_logits, grad_values);
  }
  return stats;
}

TrainState make_train_state(const Hyperparams& hp, std::uint64_t seed,
                            const NetConfig& cfg) {
  validate(hp);
  RngState param_rng = seed_stream(seed, streams::param_init);
  ParamSet params = init_params(param_rng, cfg);
  OptimizerState opt =
      hp.optimizer_kind == OptimizerKind::rmsprop
          ? make_rmsprop(params, hp.lr, hp.rmsprop_alpha, hp.opt_eps)
          : make_adam(params, hp.lr, hp.adam_beta1, hp.adam_beta2, hp.opt_eps);
  VecEnv venv(hp.num_envs, seed);
  RolloutCursor cursor;
  cursor.obs_next = venv.reset_all();
  cursor.done_next.assign(hp.num_envs, 0);
  return TrainState{
      cfg,
      std::move(params),
      std::move(opt),
      std::move(venv),
      std::move(cursor),
      seed_stream(seed, streams::action(hp.num_envs)),
      seed_stream(seed, streams::shuffle(hp.num_envs)),
      std::vector<double>(hp.num_envs, 0.0),
      {},
  };
}

namespace {

void shuffle_indices(std::vector<std::size_t>& indices, RngState& rng) {
  for (std::size_t i = indices.size() - 1; i > 0; --i) {
    const double u = next_uniform(rng);
    std::size_t j = static_cast<std::size_t>(u * static_cast<double>(i + 1));
    if (j > i) j = i;  // u < 1 makes this unreachable; guards rounding
    std::swap(indices[i], indices[j]);
  }
}

void record_episodes(TrainState& state, const RolloutBuffer& buf) {
  const std::size_t n = buf.envs;
  for (std::size_t t = 0; t < buf.steps; ++t) {
    for (std::size_t env = 0; env < n; ++env) {
      state.episode_return_acc[env] += buf.rewards[t * n + env];
      const int finished = t + 1 < buf.steps ? buf.dones[(t + 1) * n + env]
                                             : state.cursor.done_next[env];
      if (finished) {
        state.recent_episode_returns.push_back(state.episode_return_acc[env]);
        if (state.recent_episode_returns.size() > 100) {
          state.recent_episode_returns.erase(state.recent_episode_returns.begin());
        }
        state.episode_return_acc[env] = 0.0;
      }
    }
  }
}

double mean_recent_return(const TrainState& state) {
  if (state.recent_episode_returns.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double sum = 0.0;
  for (double r : state.recent_episode_returns) sum += r;
  return sum / static_cast<double>(state.recent_episode_returns.size());
}

}  // namespace

IterationMetrics train_iteration(TrainState& state, const Hyperparams& hp,
                                 std::size_t iteration, PolicyLossPath path) {
  validate(hp);
  state.opt.lr = hp.anneal_lr
                     ? hp.lr * (1.0 - static_cast<double>(iteration) /
                                          static_cast<double>(hp.total_iterations))
                     : hp.lr;

  const RolloutBuffer buf = collect(state.params, state.net_cfg, state.venv,
                                    state.cursor, hp.num_steps, state.action_rng);
  record_episodes(state, buf);

  const std::vector<double> v_next =
      value_forward(state.params, state.net_cfg, state.cursor.obs_next, hp.num_envs);
  const std::vector<double> advantages =
      gae(buf.rewards, buf.values, buf.dones, v_next, state.cursor.done_next,
          hp.num_steps, hp.num_envs, hp.gamma, hp.gae_lambda);
  const std::vector<double> returns = returns_from(advantages, buf.values);
  const FlatBatch flat = flatten(buf, advantages, returns, state.net_cfg.obs_dim);

  const std::size_t batch = hp.batch_size();
  std::vector<std::size_t> indices(batch);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  // With a single epoch over the full batch there is nothing to shuffle and
  // the shuffle stream must stay untouched.
  const bool shuffling = !(hp.update_epochs == 1 && hp.minibatch_size == batch);

  LossStats accum;
  std::size_t updates = 0;
  for (std::size_t epoch = 0; epoch < hp.update_epochs; ++epoch) {
    if (shuffling) shuffle_indices(indices, state.shuffle_rng);
    for (std::size_t start = 0; start < batch; start += hp.minibatch_size) {
      const MiniBatch mb = gather(flat, indices, start, hp.minibatch_size);
      ParamSet grads;
      const LossStats stats =
          minibatch_loss(state.params, state.net_cfg, mb, hp, path, &grads);
      clip_grad_norm(grads, hp.max_grad_norm);
      optimizer_step(state.opt, state.params, grads);
      accum.policy_loss += stats.policy_loss;
      accum.value_loss += stats.value_loss;
      accum.entropy += stats.entropy;
      accum.total += stats.total;
      ++updates;
    }
  }

  IterationMetrics metrics;
  metrics.iteration = iteration;
  metrics.env_steps = (iteration + 1) * batch;
  metrics.optimizer_steps = updates;
  metrics.mean_episodic_return = mean_recent_return(state);
  const double du = static_cast<double>(updates);
  metrics.policy_loss = accum.policy_loss / du;
  metrics.value_loss = accum.value_loss / du;
  metrics.entropy = accum.entropy / du;
  return metrics;
}

}  // namespace acpc
