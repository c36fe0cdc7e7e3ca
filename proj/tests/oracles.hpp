// Independent reference implementations used as test oracles. These are
// deliberately written from the published algorithm definitions and plain
// formula transcriptions, not from the library code paths they check.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

// splitmix64, reference constants from the published algorithm.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

// xoshiro256++ reference next().
struct Xoshiro {
  std::uint64_t s[4];

  std::uint64_t next() {
    const std::uint64_t result = rotl64(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl64(s[3], 45);
    return result;
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Stream derivation contract: one splitmix64 output of the id hashes the
// stream, then (seed ^ hash) seeds a splitmix64 run producing four words.
inline Xoshiro seed_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t h = stream_id;
  const std::uint64_t hash = splitmix64(h);
  std::uint64_t sm = seed ^ hash;
  Xoshiro g{};
  for (auto& w : g.s) w = splitmix64(sm);
  if ((g.s[0] | g.s[1] | g.s[2] | g.s[3]) == 0) g.s[0] = 0x9e3779b97f4a7c15ULL;
  return g;
}

// One cart-pole step transcribed directly from the ODE plus semi-implicit
// Euler (accelerations from the current state, velocities updated first).
struct CartPoleState {
  double x, x_dot, theta, theta_dot;
};

inline CartPoleState cartpole_step(const CartPoleState& s, int action) {
  const double g = 9.8, mc = 1.0, mp = 0.1, l = 0.5, fmag = 10.0, dt = 0.02;
  const double mtot = mc + mp;
  const double f = action == 1 ? fmag : -fmag;
  const double ct = std::cos(s.theta);
  const double st = std::sin(s.theta);
  const double temp = (f + mp * l * s.theta_dot * s.theta_dot * st) / mtot;
  const double th_acc =
      (g * st - ct * temp) / (l * (4.0 / 3.0 - mp * ct * ct / mtot));
  const double x_acc = temp - mp * l * th_acc * ct / mtot;
  CartPoleState out = s;
  out.x_dot += dt * x_acc;
  out.x += dt * out.x_dot;
  out.theta_dot += dt * th_acc;
  out.theta += dt * out.theta_dot;
  return out;
}

// Naive MLP layer evaluation, one dot product per output unit. Weights are
// row-major [fan_in][fan_out].
inline std::vector<double> linear(const std::vector<double>& w,
                                  const std::vector<double>& b,
                                  const std::vector<double>& x,
                                  std::size_t fan_in, std::size_t fan_out) {
  std::vector<double> y(fan_out);
  for (std::size_t j = 0; j < fan_out; ++j) {
    double acc = b[j];
    for (std::size_t i = 0; i < fan_in; ++i) acc += x[i] * w[i * fan_out + j];
    y[j] = acc;
  }
  return y;
}

inline std::vector<double> tanh_vec(std::vector<double> v) {
  for (double& x : v) x = std::tanh(x);
  return v;
}

// Softmax probabilities straight from the definition (no max subtraction).
inline std::vector<double> softmax(const std::vector<double>& logits) {
  double z = 0.0;
  for (double l : logits) z += std::exp(l);
  std::vector<double> p(logits.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::exp(logits[i]) / z;
  return p;
}

// Forward-summed discounted Monte-Carlo advantage: the lambda = 1 target.
// Done flags follow the cached-at-entry convention, so the flag tied to
// transition k is dones[k+1] (dones_next past the end). An episode that is
// still running at the buffer edge bootstraps with values_next.
inline std::vector<double> mc_advantage(const std::vector<double>& rewards,
                                        const std::vector<double>& values,
                                        const std::vector<int>& dones,
                                        const std::vector<double>& values_next,
                                        const std::vector<int>& dones_next,
                                        std::size_t steps, std::size_t envs,
                                        double gamma) {
  std::vector<double> adv(steps * envs);
  for (std::size_t n = 0; n < envs; ++n) {
    for (std::size_t t = 0; t < steps; ++t) {
      double ret = 0.0;
      double disc = 1.0;
      bool terminated = false;
      for (std::size_t k = t; k < steps; ++k) {
        ret += disc * rewards[k * envs + n];
        const int flag = k + 1 < steps ? dones[(k + 1) * envs + n] : dones_next[n];
        if (flag) {
          terminated = true;
          break;
        }
        disc *= gamma;
      }
      if (!terminated) ret += disc * values_next[n];
      adv[t * envs + n] = ret - values[t * envs + n];
    }
  }
  return adv;
}

}  // namespace oracle
