// acpc command-line driver: train, check-equivalence, check-gradients, compare.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "acpc/checkpoint.hpp"
#include "acpc/harness.hpp"
#include "acpc/learner.hpp"

namespace {

// Exit codes: 0 check passed, 1 check failed, 2 usage or contract error,
// 3 missing file, 4 checkpoint version mismatch, 5 tensor structure mismatch.
constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_contract = 2;
constexpr int exit_missing_file = 3;
constexpr int exit_version_mismatch = 4;
constexpr int exit_structure_mismatch = 5;

int checkpoint_error_code(acpc::CheckpointError code) {
  switch (code) {
    case acpc::CheckpointError::missing_file: return exit_missing_file;
    case acpc::CheckpointError::version_mismatch: return exit_version_mismatch;
    case acpc::CheckpointError::structure_mismatch: return exit_structure_mismatch;
    case acpc::CheckpointError::bad_magic:
    case acpc::CheckpointError::truncated: return exit_version_mismatch;
  }
  return exit_contract;
}

void emit_report(const nlohmann::json& report, const std::string& report_path) {
  std::cout << report.dump(2) << std::endl;
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot open report file " + report_path);
    out << report.dump(2) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-path PPO/A2C trainer with a bitwise equivalence harness"};
  app.require_subcommand(1);

  std::string algo = "ppo";
  std::uint64_t seed = 1;
  std::uint64_t total_steps = 0;
  std::string config_path, out_path, log_path, report_path;
  std::string compare_a, compare_b;
  std::uint32_t trials = 0;

  auto* train = app.add_subcommand("train", "Train one configuration");
  train->add_option("--algo", algo, "Preset: a2c or ppo")
      ->check(CLI::IsMember({"a2c", "ppo"}))
      ->required();
  train->add_option("--seed", seed, "Run seed");
  train->add_option("--total-steps", total_steps, "Total environment steps")->required();
  train->add_option("--config", config_path, "key=value overrides");
  train->add_option("--out", out_path, "Checkpoint output path");
  train->add_option("--log", log_path, "Per-iteration metrics CSV path");

  auto* check_eq = app.add_subcommand(
      "check-equivalence", "Train the A2C preset and aligned PPO, compare bitwise");
  check_eq->add_option("--seed", seed, "Run seed");
  check_eq->add_option("--total-steps", total_steps, "Total environment steps")->required();
  check_eq->add_option("--report", report_path, "Write the JSON report here too");

  auto* check_grad = app.add_subcommand(
      "check-gradients", "Compare clipped-surrogate and plain policy gradients");
  check_grad->add_option("--seed", seed, "Run seed");
  check_grad->add_option("--trials", trials, "Number of random trials")->required();

  auto* compare = app.add_subcommand("compare", "Compare two checkpoints");
  compare->add_option("--a", compare_a, "First checkpoint")->required();
  compare->add_option("--b", compare_b, "Second checkpoint")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      acpc::Hyperparams hp = algo == "a2c" ? acpc::a2c_preset() : acpc::ppo_defaults();
      if (!config_path.empty()) hp = acpc::apply_config_overrides(hp, config_path);
      const acpc::TrainResult result = acpc::run_training(hp, seed, total_steps);
      if (!out_path.empty()) acpc::write_checkpoint(out_path, result.params);
      if (!log_path.empty()) acpc::write_metrics_csv(log_path, result.log);
      nlohmann::json summary{
          {"algo", algo},
          {"seed", seed},
          {"total_env_steps", total_steps},
          {"iterations", result.log.size()},
          {"mean_episodic_return",
           result.log.empty() ? 0.0 : result.log.back().mean_episodic_return},
          {"config", acpc::to_json(result.hp)},
      };
      if (!out_path.empty()) summary["checkpoint"] = out_path;
      std::cout << summary.dump(2) << std::endl;
      return exit_ok;
    }
    if (*check_eq) {
      const acpc::EquivalenceReport report = acpc::check_equivalence(seed, total_steps);
      emit_report(acpc::to_json(report), report_path);
      return report.bitwise_equal ? exit_ok : exit_check_failed;
    }
    if (*check_grad) {
      const acpc::GradientIdentityReport report =
          acpc::gradient_identity_check(seed, trials);
      emit_report(acpc::to_json(report), "");
      return report.max_abs_gradient_diff == 0.0 ? exit_ok : exit_check_failed;
    }
    if (*compare) {
      const acpc::EquivalenceReport report =
          acpc::compare_checkpoints(compare_a, compare_b);
      emit_report(acpc::to_json(report), "");
      return report.bitwise_equal ? exit_ok : exit_check_failed;
    }
  } catch (const acpc::CheckpointIoError& err) {
    std::cerr << "error: " << err.what() << std::endl;
    return checkpoint_error_code(err.code);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << std::endl;
    return exit_contract;
  }
  return exit_contract;
}
