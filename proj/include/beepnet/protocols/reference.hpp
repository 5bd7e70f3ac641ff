#pragma once

#include <cstdint>
#include <stdexcept>

#include "beepnet/engine.hpp"

namespace beepnet {

// What a reference beeper does after the first time it hears a beep.
enum class OnBeepRule : uint8_t {
  SilentForever,  // never beep again
  BeepAfter,      // stay silent until the m-th round of the new regime,
                  // then beep with probability p_prime each round
};

// Scripted automaton for lower-bound experiments.  It listens for the
// first ell - 1 participating rounds, then beeps with probability p each
// round for as long as it has heard nothing but silence.  The first heard
// beep switches it permanently to its OnBeepRule.  Round indices are
// 1-based and count participating rounds only.
class ReferenceSilenceBeeper {
 public:
  ReferenceSilenceBeeper(uint64_t ell, double p, OnBeepRule rule,
                         uint64_t m = 1, double p_prime = 0.0)
      : ell_(ell), p_(p), rule_(rule), m_(m), p_prime_(p_prime) {
    if (ell == 0) throw std::invalid_argument("ell must be at least 1");
    if (p <= 0.0 || p > 1.0) throw std::invalid_argument("p must be in (0, 1]");
    if (rule == OnBeepRule::BeepAfter) {
      if (m == 0) throw std::invalid_argument("m must be at least 1");
      if (p_prime < 0.0 || p_prime > 1.0)
        throw std::invalid_argument("p_prime must be in [0, 1]");
    }
  }

  template <class Rng>
  Action decide(uint64_t /*t*/, Rng& rng) {
    const uint64_t current = rounds_done_ + 1;
    if (first_heard_round_ == 0) {
      if (current >= ell_ && rng.bernoulli(p_))
        return Action::Beep;
      return Action::Listen;
    }
    if (rule_ == OnBeepRule::SilentForever) return Action::Listen;
    const uint64_t regime_round = current - first_heard_round_ + 1;
    if (regime_round >= m_ && rng.bernoulli(p_prime_)) return Action::Beep;
    return Action::Listen;
  }

  template <class Rng>
  void absorb(const RoundFeedback& fb, uint64_t /*t*/, Rng& /*rng*/) {
    ++rounds_done_;
    if (fb.heard_beep && first_heard_round_ == 0)
      first_heard_round_ = rounds_done_;
  }

  Status status() const {
    if (first_heard_round_ != 0 && rule_ == OnBeepRule::SilentForever)
      return Status::Inactive;
    return Status::Competing;
  }

  uint64_t participating_rounds() const { return rounds_done_; }
  uint64_t first_heard_round() const { return first_heard_round_; }

 private:
  uint64_t ell_;
  double p_;
  OnBeepRule rule_;
  uint64_t m_;
  double p_prime_;
  uint64_t rounds_done_ = 0;
  uint64_t first_heard_round_ = 0;
};

}  // namespace beepnet
