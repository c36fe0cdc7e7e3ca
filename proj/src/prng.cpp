#include "acpc/prng.hpp"

namespace acpc {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngState seed_stream(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t h = stream_id;
  const std::uint64_t stream_hash = splitmix64(h);
  std::uint64_t sm = seed ^ stream_hash;
  RngState state;
  for (auto& word : state.s) word = splitmix64(sm);
  if ((state.s[0] | state.s[1] | state.s[2] | state.s[3]) == 0) {
    state.s[0] = 0x9e3779b97f4a7c15ULL;  // all-zero is invalid for xoshiro
  }
  return state;
}

std::uint64_t next_u64(RngState& state) {
  std::uint64_t* s = state.s;
  const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double next_uniform(RngState& state) {
  return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

}  // namespace acpc
