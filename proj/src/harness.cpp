#include "acpc/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace acpc {

namespace {

std::size_t iterations_within(const Hyperparams& hp, std::uint64_t total_env_steps) {
  const std::size_t batch = hp.batch_size();
  const std::size_t iters = static_cast<std::size_t>(total_env_steps / batch);
  return iters < 1 ? 1 : iters;
}

EquivalenceReport run_pair(std::uint64_t seed, std::uint64_t total_env_steps,
                           const Hyperparams& hp_a, const Hyperparams& hp_b) {
  // Side A is the plain objective (one full-batch update per iteration);
  // side B is the clipped surrogate. Both own fully isolated state.
  const TrainResult a = run_training_iters(hp_a, PolicyLossPath::a2c_objective,
                                           seed, iterations_within(hp_a, total_env_steps));
  const TrainResult b = run_training_iters(hp_b, PolicyLossPath::clipped_surrogate,
                                           seed, iterations_within(hp_b, total_env_steps));
  EquivalenceReport report = compare_params(a.params, b.params);
  report.seed = seed;
  report.total_env_steps = total_env_steps;
  report.config_a = a.hp;
  report.config_b = b.hp;
  return report;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + value);
}

const char* optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::rmsprop ? "rmsprop" : "adam";
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

TrainResult run_training_iters(const Hyperparams& hp, PolicyLossPath path,
                               std::uint64_t seed, std::size_t iterations) {
  Hyperparams local = hp;
  local.total_iterations = iterations;
  validate(local);
  TrainState state = make_train_state(local, seed);
  TrainResult result;
  result.hp = local;
  result.log.reserve(iterations);
  for (std::size_t i = 0; i < iterations; ++i) {
    result.log.push_back(train_iteration(state, local, i, path));
  }
  result.params = std::move(state.params);
  return result;
}

TrainResult run_training(const Hyperparams& hp, std::uint64_t seed,
                         std::uint64_t total_env_steps) {
  const std::size_t batch = hp.batch_size();
  if (total_env_steps == 0 || total_env_steps % batch != 0) {
    throw std::invalid_argument(
        "run_training: total env steps (" + std::to_string(total_env_steps) +
        ") must be a positive multiple of num_envs * num_steps (" +
        std::to_string(batch) + ")");
  }
  return run_training_iters(hp, PolicyLossPath::clipped_surrogate, seed,
                            static_cast<std::size_t>(total_env_steps / batch));
}

EquivalenceReport compare_params(const ParamSet& a, const ParamSet& b) {
  if (!a.same_layout(b)) {
    throw CheckpointIoError(CheckpointError::structure_mismatch,
                            "compare: tensor names or shapes differ");
  }
  EquivalenceReport report;
  report.bitwise_equal = true;
  report.per_tensor.reserve(a.tensors.size());
  for (std::size_t t = 0; t < a.tensors.size(); ++t) {
    TensorDiff diff{a.tensors[t].name, 0.0};
    for (std::size_t i = 0; i < a.tensors[t].size(); ++i) {
      const double va = a.tensors[t].data[i];
      const double vb = b.tensors[t].data[i];
      if (std::bit_cast<std::uint64_t>(va) != std::bit_cast<std::uint64_t>(vb)) {
        report.bitwise_equal = false;
      }
      diff.max_abs_diff = std::max(diff.max_abs_diff, std::abs(va - vb));
    }
    report.max_abs_param_diff = std::max(report.max_abs_param_diff, diff.max_abs_diff);
    report.per_tensor.push_back(std::move(diff));
  }
  return report;
}

EquivalenceReport check_equivalence(std::uint64_t seed, std::uint64_t total_env_steps) {
  return run_pair(seed, total_env_steps, a2c_preset(), align_to_a2c(ppo_defaults()));
}

const char* misalignment_name(Misalignment m) {
  switch (m) {
    case Misalignment::optimizer_adam: return "optimizer_adam";
    case Misalignment::lr_3e4: return "lr_3e4";
    case Misalignment::steps_128: return "steps_128";
    case Misalignment::lambda_095: return "lambda_095";
    case Misalignment::epochs_4_minibatch_4: return "epochs_4_minibatch_4";
    case Misalignment::normalize_advantage_on: return "normalize_advantage_on";
    case Misalignment::value_clip_on: return "value_clip_on";
  }
  return "unknown";
}

EquivalenceReport check_equivalence_perturbed(std::uint64_t seed,
                                              std::uint64_t total_env_steps,
                                              Misalignment which) {
  Hyperparams b = align_to_a2c(ppo_defaults());
  switch (which) {
    case Misalignment::optimizer_adam:
      b.optimizer_kind = OptimizerKind::adam;
      break;
    case Misalignment::lr_3e4:
      b.lr = 3e-4;
      break;
    case Misalignment::steps_128:
      b.num_steps = 128;
      b.minibatch_size = b.batch_size();  // still one full-batch update
      break;
    case Misalignment::lambda_095:
      b.gae_lambda = 0.95;
      break;
    case Misalignment::epochs_4_minibatch_4:
      b.update_epochs = 4;
      b.minibatch_size = b.batch_size() / 4;
      break;
    case Misalignment::normalize_advantage_on:
      b.normalize_advantage = true;
      break;
    case Misalignment::value_clip_on:
      b.clip_vloss = true;
      break;
  }
  return run_pair(seed, total_env_steps, a2c_preset(), b);
}

GradientIdentityReport gradient_identity_check(std::uint64_t seed, std::uint32_t trials) {
  if (trials < 1) {
    throw std::invalid_argument("gradient_identity_check: trials must be >= 1");
  }
  const NetConfig cfg{};
  const std::size_t batch = 16;
  Hyperparams hp = ppo_defaults();
  hp.normalize_advantage = false;
  hp.clip_vloss = false;
  hp.ent_coef = 0.0;

  GradientIdentityReport report{seed, trials, 0.0};
  for (std::uint32_t trial = 0; trial < trials; ++trial) {
    RngState rng = seed_stream(seed, 1000 + trial);
    const ParamSet params = init_params(rng, cfg);

    MiniBatch mb;
    mb.size = batch;
    mb.obs_dim = cfg.obs_dim;
    mb.obs.resize(batch * cfg.obs_dim);
    for (double& o : mb.obs) o = next_uniform(rng) * 2.0 - 1.0;
    const PolicyOutput pol = policy_forward(params, cfg, mb.obs, batch);
    mb.actions.resize(batch);
    mb.logp_old.resize(batch);
    mb.advantages.resize(batch);
    mb.v_old.assign(batch, 0.0);
    mb.returns.resize(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      mb.actions[i] =
          sample_action(pol.log_probs.data() + i * cfg.num_actions, cfg.num_actions, rng);
      // On-policy by construction: the stored log-prob is the same double
      // the surrogate recomputes, so the ratio is exactly one.
      mb.logp_old[i] =
          pol.log_probs[i * cfg.num_actions + static_cast<std::size_t>(mb.actions[i])];
      mb.advantages[i] = next_uniform(rng) * 4.0 - 2.0;
      mb.returns[i] = next_uniform(rng) * 2.0 - 1.0;
    }

    ParamSet grads_clipped, grads_plain;
    minibatch_loss(params, cfg, mb, hp, PolicyLossPath::clipped_surrogate, &grads_clipped);
    minibatch_loss(params, cfg, mb, hp, PolicyLossPath::a2c_objective, &grads_plain);
    for (std::size_t t = 0; t < grads_clipped.tensors.size(); ++t) {
      for (std::size_t i = 0; i < grads_clipped.tensors[t].size(); ++i) {
        report.max_abs_gradient_diff =
            std::max(report.max_abs_gradient_diff,
                     std::abs(grads_clipped.tensors[t].data[i] -
                              grads_plain.tensors[t].data[i]));
      }
    }
  }
  return report;
}

EquivalenceReport compare_checkpoints(const std::string& path_a,
                                      const std::string& path_b) {
  const ParamSet a = read_checkpoint(path_a);
  const ParamSet b = read_checkpoint(path_b);
  return compare_params(a, b);
}

Hyperparams apply_config_overrides(Hyperparams hp, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "optimizer") {
      if (value == "rmsprop") hp.optimizer_kind = OptimizerKind::rmsprop;
      else if (value == "adam") hp.optimizer_kind = OptimizerKind::adam;
      else throw std::invalid_argument("config: unknown optimizer " + value);
    } else if (key == "lr") hp.lr = std::stod(value);
    else if (key == "anneal_lr") hp.anneal_lr = parse_bool(value, key);
    else if (key == "num_envs") hp.num_envs = std::stoull(value);
    else if (key == "num_steps") hp.num_steps = std::stoull(value);
    else if (key == "gamma") hp.gamma = std::stod(value);
    else if (key == "gae_lambda") hp.gae_lambda = std::stod(value);
    else if (key == "update_epochs") hp.update_epochs = std::stoull(value);
    else if (key == "minibatch_size") hp.minibatch_size = std::stoull(value);
    else if (key == "normalize_advantage") hp.normalize_advantage = parse_bool(value, key);
    else if (key == "clip_coef") hp.clip_coef = std::stod(value);
    else if (key == "clip_vloss") hp.clip_vloss = parse_bool(value, key);
    else if (key == "vf_coef") hp.vf_coef = std::stod(value);
    else if (key == "ent_coef") hp.ent_coef = std::stod(value);
    else if (key == "max_grad_norm") hp.max_grad_norm = std::stod(value);
    else if (key == "rmsprop_alpha") hp.rmsprop_alpha = std::stod(value);
    else if (key == "adam_beta1") hp.adam_beta1 = std::stod(value);
    else if (key == "adam_beta2") hp.adam_beta2 = std::stod(value);
    else if (key == "opt_eps") hp.opt_eps = std::stod(value);
    else throw std::invalid_argument("config: unknown key " + key);
  }
  return hp;
}

void write_metrics_csv(const std::string& path,
                       const std::vector<IterationMetrics>& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot open metrics log " + path);
  for (const auto& m : log) {
    out << m.iteration << ',' << m.env_steps << ','
        << format_double(m.mean_episodic_return) << ','
        << format_double(m.policy_loss) << ',' << format_double(m.value_loss)
        << ',' << format_double(m.entropy) << '\n';
  }
}

nlohmann::json to_json(const Hyperparams& hp) {
  return nlohmann::json{
      {"optimizer", optimizer_name(hp.optimizer_kind)},
      {"lr", hp.lr},
      {"anneal_lr", hp.anneal_lr},
      {"num_envs", hp.num_envs},
      {"num_steps", hp.num_steps},
      {"gamma", hp.gamma},
      {"gae_lambda", hp.gae_lambda},
      {"update_epochs", hp.update_epochs},
      {"minibatch_size", hp.minibatch_size},
      {"normalize_advantage", hp.normalize_advantage},
      {"clip_coef", hp.clip_coef},
      {"clip_vloss", hp.clip_vloss},
      {"vf_coef", hp.vf_coef},
      {"ent_coef", hp.ent_coef},
      {"max_grad_norm", hp.max_grad_norm},
      {"total_iterations", hp.total_iterations},
      {"rmsprop_alpha", hp.rmsprop_alpha},
      {"adam_beta1", hp.adam_beta1},
      {"adam_beta2", hp.adam_beta2},
      {"opt_eps", hp.opt_eps},
  };
}

nlohmann::json to_json(const EquivalenceReport& report) {
  nlohmann::json per_tensor = nlohmann::json::array();
  for (const auto& d : report.per_tensor) {
    per_tensor.push_back({{"name", d.name}, {"max_abs_diff", d.max_abs_diff}});
  }
  return nlohmann::json{
      {"seed", report.seed},
      {"total_env_steps", report.total_env_steps},
      {"bitwise_equal", report.bitwise_equal},
      {"max_abs_param_diff", report.max_abs_param_diff},
      {"per_tensor", per_tensor},
      {"config_a", to_json(report.config_a)},
      {"config_b", to_json(report.config_b)},
  };
}

nlohmann::json to_json(const GradientIdentityReport& report) {
  return nlohmann::json{
      {"seed", report.seed},
      {"trials", report.trials},
      {"max_abs_gradient_diff", report.max_abs_gradient_diff},
      {"passed", report.max_abs_gradient_diff == 0.0},
  };
}

}  // namespace acpc
