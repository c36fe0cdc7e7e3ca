#include <doctest.h>

#include <stdexcept>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "acpc/net.hpp"
#include "oracles.hpp"

using namespace acpc;

namespace {

std::vector<double> random_obs(RngState& rng, std::size_t batch, std::size_t dim,
                               double scale = 1.0) {
  std::vector<double> obs(batch * dim);
  for (double& o : obs) o = (next_uniform(rng) * 2.0 - 1.0) * scale;
  return obs;
}

bool within_one_ulp(double a, double b) {
  if (a == b) return true;
  return b == std::nextafter(a, b);
}

// Full policy forward through the naive per-unit oracle.
std::vector<double> oracle_policy_logits(const ParamSet& p, const NetConfig& cfg,
                                         const std::vector<double>& row) {
  using oracle::linear;
  using oracle::tanh_vec;
  const auto h1 = tanh_vec(linear(p.tensors[0].data, p.tensors[1].data, row,
                                  cfg.obs_dim, cfg.hidden_dim));
  const auto h2 = tanh_vec(linear(p.tensors[2].data, p.tensors[3].data, h1,
                                  cfg.hidden_dim, cfg.hidden_dim));
  return linear(p.tensors[4].data, p.tensors[5].data, h2, cfg.hidden_dim,
                cfg.num_actions);
}

double oracle_value(const ParamSet& p, const NetConfig& cfg,
                    const std::vector<double>& row) {
  using oracle::linear;
  using oracle::tanh_vec;
  const auto h1 = tanh_vec(linear(p.tensors[6].data, p.tensors[7].data, row,
                                  cfg.obs_dim, cfg.hidden_dim));
  const auto h2 = tanh_vec(linear(p.tensors[8].data, p.tensors[9].data, h1,
                                  cfg.hidden_dim, cfg.hidden_dim));
  return linear(p.tensors[10].data, p.tensors[11].data, h2, cfg.hidden_dim, 1)[0];
}

}  // namespace

TEST_CASE("init_params is deterministic and respects the init rule") {
  const NetConfig cfg{};
  RngState a = seed_stream(1, streams::param_init);
  RngState b = seed_stream(1, streams::param_init);
  const ParamSet pa = init_params(a, cfg);
  const ParamSet pb = init_params(b, cfg);
  REQUIRE(pa.tensors.size() == 12);
  for (std::size_t t = 0; t < pa.tensors.size(); ++t) {
    CHECK(pa.tensors[t].data == pb.tensors[t].data);
    if (pa.tensors[t].shape.size() == 1) {
      for (double v : pa.tensors[t].data) CHECK(v == 0.0);  // biases
    } else {
      const double bound = std::sqrt(1.0 / static_cast<double>(pa.tensors[t].shape[0]));
      for (double v : pa.tensors[t].data) CHECK(std::abs(v) <= bound);
    }
  }
  // First layer reads 4 inputs, so its bound is exactly one half.
  for (double v : pa.tensors[0].data) CHECK(std::abs(v) <= 0.5);
}

TEST_CASE("init draws follow the stream in canonical order") {
  const NetConfig cfg{4, 8, 2};
  RngState rng = seed_stream(6, streams::param_init);
  const ParamSet p = init_params(rng, cfg);
  oracle::Xoshiro ref = oracle::seed_stream(6, streams::param_init);
  for (const auto& t : p.tensors) {
    if (t.shape.size() != 2) continue;
    const double bound = std::sqrt(1.0 / static_cast<double>(t.shape[0]));
    for (double v : t.data) {
      CHECK(v == (ref.uniform() * 2.0 - 1.0) * bound);
    }
  }
}

TEST_CASE("zero parameters give a uniform policy with entropy ln 2") {
  const NetConfig cfg{};
  const ParamSet p = make_param_set(cfg);
  const std::vector<double> obs{0.1, -0.2, 0.3, 0.4};
  const PolicyOutput out = policy_forward(p, cfg, obs, 1);
  CHECK(out.log_probs[0] == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(out.log_probs[1] == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(std::abs(out.entropy[0] - std::log(2.0)) < 1e-12);
}

TEST_CASE("log-softmax is stable for huge equal logits") {
  const double logits[2] = {1000.0, 1000.0};
  double out[2];
  log_softmax_row(logits, 2, out);
  // Absolute accuracy is limited by the ulp of 1000 + ln 2 (~1e-13).
  CHECK(out[0] == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(std::isfinite(out[0]));
}

TEST_CASE("probability rows sum to one and entropy is bounded") {
  const NetConfig cfg{};
  RngState rng = seed_stream(21, 0);
  const ParamSet p = init_params(rng, cfg);
  const std::size_t batch = 32;
  const auto obs = random_obs(rng, batch, cfg.obs_dim);
  const PolicyOutput out = policy_forward(p, cfg, obs, batch);
  const double ln2 = std::log(2.0);
  for (std::size_t b = 0; b < batch; ++b) {
    const double sum = std::exp(out.log_probs[b * 2]) + std::exp(out.log_probs[b * 2 + 1]);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(out.entropy[b] >= 0.0);
    CHECK(out.entropy[b] <= ln2 + 1e-12);
  }
}

TEST_CASE("forward passes match the naive matrix-math oracle") {
  const NetConfig cfg{4, 16, 2};
  RngState rng = seed_stream(33, 0);
  const ParamSet p = init_params(rng, cfg);
  const std::size_t batch = 5;
  const auto obs = random_obs(rng, batch, cfg.obs_dim);
  const PolicyOutput pol = policy_forward(p, cfg, obs, batch);
  const std::vector<double> val = value_forward(p, cfg, obs, batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const std::vector<double> row(obs.begin() + b * 4, obs.begin() + (b + 1) * 4);
    const auto logits = oracle_policy_logits(p, cfg, row);
    CHECK(pol.logits[b * 2] == doctest::Approx(logits[0]).epsilon(1e-12));
    CHECK(pol.logits[b * 2 + 1] == doctest::Approx(logits[1]).epsilon(1e-12));
    const auto probs = oracle::softmax(logits);
    CHECK(std::exp(pol.log_probs[b * 2]) == doctest::Approx(probs[0]).epsilon(1e-12));
    CHECK(val[b] == doctest::Approx(oracle_value(p, cfg, row)).epsilon(1e-12));
  }
}

TEST_CASE("zero value parameters output exactly zero") {
  const NetConfig cfg{};
  const ParamSet p = make_param_set(cfg);
  const std::vector<double> obs{0.5, 0.5, -0.5, 0.25};
  CHECK(value_forward(p, cfg, obs, 1)[0] == 0.0);
}

TEST_CASE("forward passes are pure and row-independent") {
  const NetConfig cfg{};
  RngState rng = seed_stream(44, 0);
  const ParamSet p = init_params(rng, cfg);
  const std::vector<double> row{0.2, -0.1, 0.05, 0.3};
  std::vector<double> two_rows;
  two_rows.insert(two_rows.end(), row.begin(), row.end());
  two_rows.insert(two_rows.end(), row.begin(), row.end());
  const auto v1 = value_forward(p, cfg, row, 1);
  const auto v2 = value_forward(p, cfg, two_rows, 2);
  CHECK(v1[0] == v2[0]);
  CHECK(v2[0] == v2[1]);
  const PolicyOutput p1 = policy_forward(p, cfg, row, 1);
  const PolicyOutput p2 = policy_forward(p, cfg, row, 1);
  CHECK(p1.log_probs == p2.log_probs);
}

TEST_CASE("non-finite observations are rejected") {
  const NetConfig cfg{};
  const ParamSet p = make_param_set(cfg);
  const std::vector<double> bad{0.0, std::nan(""), 0.0, 0.0};
  CHECK_THROWS_AS(policy_forward(p, cfg, bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(value_forward(p, cfg, bad, 1), std::invalid_argument);
}

TEST_CASE("sampling from a deterministic distribution always picks it") {
  RngState rng = seed_stream(3, 9);
  const double log_probs[2] = {0.0, -745.0};  // probs 1 and ~0
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_action(log_probs, 2, rng) == 0);
  }
}

TEST_CASE("sampling follows the inverse-cdf rule") {
  const double half = std::log(0.5);
  const double log_probs[2] = {half, half};
  RngState rng = seed_stream(12, 9);
  for (int i = 0; i < 1000; ++i) {
    RngState peek = rng;
    const double u = next_uniform(peek);
    const int action = sample_action(log_probs, 2, rng);
    CHECK(action == (u < 0.5 ? 0 : 1));
  }
}

TEST_CASE("sampling frequencies match the distribution") {
  const double log_probs[2] = {std::log(0.25), std::log(0.75)};
  RngState rng = seed_stream(500, 9);
  int count1 = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    count1 += sample_action(log_probs, 2, rng);
  }
  const double freq = static_cast<double>(count1) / draws;
  CHECK(std::abs(freq - 0.75) < 0.01);
}

TEST_CASE("zero upstream seeds give zero gradients") {
  const NetConfig cfg{4, 8, 2};
  RngState rng = seed_stream(9, 0);
  const ParamSet p = init_params(rng, cfg);
  const std::size_t batch = 3;
  const auto obs = random_obs(rng, batch, cfg.obs_dim);
  const std::vector<double> glogits(batch * 2, 0.0);
  const std::vector<double> gvalues(batch, 0.0);
  const ParamSet grads = backward(p, cfg, obs, batch, glogits, gvalues);
  for (const auto& t : grads.tensors) {
    for (double g : t.data) CHECK(g == 0.0);
  }
}

TEST_CASE("doubled upstream seeds double every gradient") {
  const NetConfig cfg{4, 8, 2};
  RngState rng = seed_stream(10, 0);
  const ParamSet p = init_params(rng, cfg);
  const std::size_t batch = 4;
  const auto obs = random_obs(rng, batch, cfg.obs_dim);
  auto glogits = random_obs(rng, batch, 2);
  auto gvalues = random_obs(rng, batch, 1);
  const ParamSet g1 = backward(p, cfg, obs, batch, glogits, gvalues);
  for (double& v : glogits) v *= 2.0;
  for (double& v : gvalues) v *= 2.0;
  const ParamSet g2 = backward(p, cfg, obs, batch, glogits, gvalues);
  for (std::size_t t = 0; t < g1.tensors.size(); ++t) {
    for (std::size_t i = 0; i < g1.tensors[t].size(); ++i) {
      CHECK(within_one_ulp(2.0 * g1.tensors[t].data[i], g2.tensors[t].data[i]));
    }
  }
}

TEST_CASE("backward matches central finite differences") {
  const NetConfig cfg{4, 8, 2};
  const double h = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    RngState rng = seed_stream(100 + trial, 0);
    ParamSet p = init_params(rng, cfg);
    const std::size_t batch = 3;
    const auto obs = random_obs(rng, batch, cfg.obs_dim);
    const auto glogits = random_obs(rng, batch, 2);
    const auto gvalues = random_obs(rng, batch, 1);

    const auto eval = [&](const ParamSet& q) {
      const PolicyOutput pol = policy_forward(q, cfg, obs, batch);
      const auto val = value_forward(q, cfg, obs, batch);
      double loss = 0.0;
      for (std::size_t i = 0; i < batch * 2; ++i) loss += glogits[i] * pol.logits[i];
      for (std::size_t i = 0; i < batch; ++i) loss += gvalues[i] * val[i];
      return loss;
    };

    const ParamSet analytic = backward(p, cfg, obs, batch, glogits, gvalues);
    for (std::size_t t = 0; t < p.tensors.size(); ++t) {
      for (std::size_t i = 0; i < p.tensors[t].size(); ++i) {
        const double saved = p.tensors[t].data[i];
        p.tensors[t].data[i] = saved + h;
        const double up = eval(p);
        p.tensors[t].data[i] = saved - h;
        const double down = eval(p);
        p.tensors[t].data[i] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double an = analytic.tensors[t].data[i];
        const double scale = std::max({1.0, std::abs(fd), std::abs(an)});
        worst = std::max(worst, std::abs(fd - an) / scale);
      }
    }
  }
  CHECK(worst <= 1e-6);
}
