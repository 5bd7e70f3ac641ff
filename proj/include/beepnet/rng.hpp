#pragma once

#include <cstdint>

namespace beepnet {

// One SplitMix64 step: advances the state and returns a mixed 64-bit value.
inline uint64_t splitmix64_next(uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic per-node random stream.
//
// The stream is a fixed function of (run_seed, stream_id, salt); two nodes of
// the same run get disjoint streams because their stream ids differ.  All
// draws go through integer arithmetic and an exact 53-bit conversion, so the
// byte-for-byte behaviour is identical on every platform.
class NodeRng {
 public:
  NodeRng() = default;

  NodeRng(uint64_t run_seed, uint64_t stream_id, uint64_t salt = 0) {
    state_ = run_seed;
    splitmix64_next(state_);
    state_ ^= (stream_id + 1) * 0x9e3779b97f4a7c15ull;
    splitmix64_next(state_);
    state_ ^= salt;
    splitmix64_next(state_);
  }

  uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform draw in [0, 1) with 53 bits of precision.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_unit() < p; }

  bool next_bit() { return (next_u64() >> 63) != 0; }

  // Uniform index in [0, bound).  bound must be positive; the modulo bias is
  // negligible for the small bounds used here but the result stays fully
  // deterministic, which is what matters.
  uint64_t next_index(uint64_t bound) { return next_u64() % bound; }

 private:
  uint64_t state_ = 0;
};

}  // namespace beepnet
