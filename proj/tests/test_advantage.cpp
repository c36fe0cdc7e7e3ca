#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "acpc/advantage.hpp"
#include "acpc/prng.hpp"
#include "oracles.hpp"

using namespace acpc;

namespace {

struct RandomBuffer {
  std::size_t steps;
  std::size_t envs;
  std::vector<double> rewards, values, values_next;
  std::vector<int> dones, dones_next;
};

RandomBuffer make_random_buffer(std::uint64_t seed, std::size_t max_steps,
                                std::size_t max_envs, double done_prob) {
  RngState rng = seed_stream(seed, 0);
  RandomBuffer b;
  b.steps = 1 + static_cast<std::size_t>(next_uniform(rng) * max_steps);
  b.envs = 1 + static_cast<std::size_t>(next_uniform(rng) * max_envs);
  const std::size_t total = b.steps * b.envs;
  b.rewards.resize(total);
  b.values.resize(total);
  b.dones.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    b.rewards[i] = next_uniform(rng) * 2.0 - 1.0;
    b.values[i] = next_uniform(rng) * 2.0 - 1.0;
    b.dones[i] = next_uniform(rng) < done_prob ? 1 : 0;
  }
  b.values_next.resize(b.envs);
  b.dones_next.resize(b.envs);
  for (std::size_t n = 0; n < b.envs; ++n) {
    b.values_next[n] = next_uniform(rng) * 2.0 - 1.0;
    b.dones_next[n] = next_uniform(rng) < done_prob ? 1 : 0;
  }
  return b;
}

}  // namespace

TEST_CASE("all-zero inputs give all-zero advantages") {
  const std::vector<double> zeros(6, 0.0);
  const std::vector<int> no_dones(6, 0);
  const auto adv = gae(zeros, zeros, no_dones, {0.0, 0.0}, {0, 0}, 3, 2, 0.99, 0.95);
  for (double a : adv) CHECK(a == 0.0);
}

TEST_CASE("three-step example matches the frozen recursion oracle") {
  // M=3, N=1, r=[1,1,1], v=[0.5,0.5,0.5], v_next=0.5, no dones,
  // gamma=0.99, lambda=0.95; expected values computed before the build.
  const std::vector<double> r{1.0, 1.0, 1.0};
  const std::vector<double> v{0.5, 0.5, 0.5};
  const auto adv = gae(r, v, {0, 0, 0}, {0.5}, {0}, 3, 1, 0.99, 0.95);
  CHECK(adv[0] == doctest::Approx(0x1.67cc10771b956p+1).epsilon(1e-15));
  CHECK(adv[1] == doctest::Approx(0x1.ee48beb5b2d4ep+0).epsilon(1e-15));
  CHECK(adv[2] == doctest::Approx(0x1.fd70a3d70a3d8p-1).epsilon(1e-15));
}

TEST_CASE("lambda 1 telescopes into discounted returns minus values") {
  RngState rng = seed_stream(7, 0);
  const std::size_t steps = 6;
  std::vector<double> r(steps), v(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    r[t] = next_uniform(rng);
    v[t] = next_uniform(rng) - 0.5;
  }
  const double v_next = 0.25;
  const double gamma = 0.99;
  const auto adv =
      gae(r, v, std::vector<int>(steps, 0), {v_next}, {0}, steps, 1, gamma, 1.0);
  for (std::size_t t = 0; t < steps; ++t) {
    double expected = 0.0;
    double disc = 1.0;
    for (std::size_t k = t; k < steps; ++k) {
      expected += disc * r[k];
      disc *= gamma;
    }
    expected += disc * v_next;
    expected -= v[t];
    CHECK(adv[t] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("lambda 0 reduces to the one-step residual") {
  const RandomBuffer b = make_random_buffer(5, 8, 3, 0.2);
  const auto adv = gae(b.rewards, b.values, b.dones, b.values_next, b.dones_next,
                       b.steps, b.envs, 0.99, 0.0);
  for (std::size_t n = 0; n < b.envs; ++n) {
    for (std::size_t t = 0; t < b.steps; ++t) {
      const double nonterminal =
          1.0 - static_cast<double>(t + 1 < b.steps ? b.dones[(t + 1) * b.envs + n]
                                                    : b.dones_next[n]);
      const double value_next =
          t + 1 < b.steps ? b.values[(t + 1) * b.envs + n] : b.values_next[n];
      const double delta = b.rewards[t * b.envs + n] +
                           0.99 * nonterminal * value_next -
                           b.values[t * b.envs + n];
      CHECK(adv[t * b.envs + n] == delta);
    }
  }
}

TEST_CASE("a done flag cuts the recursion from later data") {
  RandomBuffer b = make_random_buffer(9, 10, 1, 0.0);
  if (b.steps < 4) b = make_random_buffer(10, 10, 1, 0.0);
  REQUIRE(b.steps >= 4);
  const std::size_t cut = b.steps / 2;
  b.dones[cut] = 1;  // episode boundary before step `cut`
  const auto base = gae(b.rewards, b.values, b.dones, b.values_next, b.dones_next,
                        b.steps, 1, 0.99, 0.95);
  // Mutating everything at and after the boundary leaves earlier advantages
  // bitwise untouched.
  RandomBuffer mutated = b;
  for (std::size_t t = cut; t < b.steps; ++t) {
    mutated.rewards[t] += 5.0;
    mutated.values[t] -= 3.0;
  }
  mutated.values_next[0] += 11.0;
  const auto changed = gae(mutated.rewards, mutated.values, mutated.dones,
                           mutated.values_next, mutated.dones_next, b.steps, 1,
                           0.99, 0.95);
  for (std::size_t t = 0; t < cut; ++t) {
    CHECK(base[t] == changed[t]);
  }
}

TEST_CASE("returns are advantages plus values, bitwise") {
  const RandomBuffer b = make_random_buffer(12, 8, 4, 0.15);
  const auto adv = gae(b.rewards, b.values, b.dones, b.values_next, b.dones_next,
                       b.steps, b.envs, 0.99, 0.95);
  const auto ret = returns_from(adv, b.values);
  for (std::size_t i = 0; i < ret.size(); ++i) {
    CHECK(ret[i] == adv[i] + b.values[i]);
  }
}

TEST_CASE("returns_from passes through degenerate inputs bitwise") {
  const std::vector<double> v{0.5, -1.25, 3.0};
  const std::vector<double> zeros(3, 0.0);
  CHECK(returns_from(zeros, v) == v);
  CHECK(returns_from(v, zeros) == v);
}

TEST_CASE("lambda 1 agrees with the forward Monte-Carlo oracle") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const RandomBuffer b = make_random_buffer(seed, 16, 4, 0.2);
    const auto fast = gae(b.rewards, b.values, b.dones, b.values_next,
                          b.dones_next, b.steps, b.envs, 0.99, 1.0);
    const auto slow =
        oracle::mc_advantage(b.rewards, b.values, b.dones, b.values_next,
                             b.dones_next, b.steps, b.envs, 0.99);
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(std::abs(fast[i] - slow[i]) <= 1e-12);
    }
  }
}

TEST_CASE("shape and range violations are rejected") {
  const std::vector<double> r(4, 0.0);
  const std::vector<int> d(4, 0);
  CHECK_THROWS_AS(gae(r, r, d, {0.0}, {0}, 2, 3, 0.99, 0.95), std::invalid_argument);
  CHECK_THROWS_AS(gae(r, r, d, {0.0, 0.0}, {0, 0}, 2, 2, 1.5, 0.95),
                  std::invalid_argument);
  CHECK_THROWS_AS(gae(r, r, d, {0.0, 0.0}, {0, 0}, 2, 2, 0.99, -0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(returns_from({1.0}, {1.0, 2.0}), std::invalid_argument);
}
