#pragma once

#include <cstdint>

namespace acpc {

// xoshiro256++ state. Never all-zero; identical (seed, stream_id) pairs
// produce identical sequences on every platform (integer arithmetic only).
struct RngState {
  std::uint64_t s[4];
};

// Derives a decorrelated stream: (seed XOR hash(stream_id)) fed through
// splitmix64 four times, where hash is one splitmix64 output of the id.
RngState seed_stream(std::uint64_t seed, std::uint64_t stream_id);

// Advances the state once and returns the raw 64-bit output.
std::uint64_t next_u64(RngState& state);

// Uniform in [0,1): top 53 bits of the next output times 2^-53. Never 1.0.
double next_uniform(RngState& state);

// Fixed stream assignment for a run with N parallel environments. Each
// stochastic consumer owns a stream, so disabling one consumer cannot
// shift the draws seen by another.
namespace streams {
inline constexpr std::uint64_t param_init = 0;
inline constexpr std::uint64_t env(std::uint64_t index) { return 1 + index; }
inline constexpr std::uint64_t action(std::uint64_t num_envs) { return num_envs + 1; }
inline constexpr std::uint64_t shuffle(std::uint64_t num_envs) { return num_envs + 2; }
}  // namespace streams

}  // namespace acpc
