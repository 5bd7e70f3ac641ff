#pragma once

#include <cstdint>

#include "beepnet/engine.hpp"

namespace beepnet {

// MIS protocol for synchronized clocks (all nodes share the global round
// number t, wake rounds are multiples of 3).  Rounds cycle through three
// roles:
//
//   t % 3 == 0  restart bit.  Everyone beeps unless t is a multiple of
//               the local period k, in which case the node listens: a
//               beep means some neighbour is out of phase, so the node
//               reverts to inactive and doubles k; silence lets the node
//               advance (inactive -> competing -> MIS) starting next
//               round.
//   t % 3 == 1  MIS bit.  MIS nodes beep; a listener that hears one
//               becomes inactive.
//   t % 3 == 2  competing bit.  Competing nodes beep with probability
//               1/2 and drop out if they hear a beep.  MIS nodes beep on
//               a pre-drawn coin (`next`); when the coin says listen,
//               hearing a beep demotes the node and doubles k.
//
// k starts at 6 and only ever doubles, so every k is 6 * 2^j.
class Alg4Automaton {
 public:
  explicit Alg4Automaton(uint64_t initial_k = 6) : k_(initial_k) {}

  template <class Rng>
  Action decide(uint64_t t, Rng& rng) {
    if (!next_drawn_) {
      next_bit_ = rng.next_bit();
      next_drawn_ = true;
    }
    if (advance_pending_) {
      advance_pending_ = false;
      if (state_ == State::Inactive) {
        state_ = State::Competing;
      } else if (state_ == State::Competing) {
        state_ = State::Mis;
      }
    }
    beeped_ = false;
    switch (t % 3) {
      case 0:
        if (t % k_ != 0) beeped_ = true;
        break;
      case 1:
        if (state_ == State::Mis) beeped_ = true;
        break;
      default:
        if (state_ == State::Competing) {
          beeped_ = rng.bernoulli(0.5);
        } else if (state_ == State::Mis) {
          if (next_bit_) {
            beeped_ = true;
            next_bit_ = rng.next_bit();
          } else {
            next_bit_ = true;
          }
        }
        break;
    }
    return beeped_ ? Action::Beep : Action::Listen;
  }

  template <class Rng>
  void absorb(const RoundFeedback& fb, uint64_t t, Rng& /*rng*/) {
    switch (t % 3) {
      case 0:
        if (t % k_ == 0) {
          if (fb.heard_beep) {
            state_ = State::Inactive;
            k_ *= 2;
          } else {
            advance_pending_ = true;
          }
        }
        break;
      case 1:
        if (state_ != State::Mis && fb.heard_beep) state_ = State::Inactive;
        break;
      default:
        if (beeped_ || !fb.heard_beep) break;
        if (state_ == State::Competing) {
          state_ = State::Inactive;
        } else if (state_ == State::Mis) {
          state_ = State::Inactive;
          k_ *= 2;
        }
        break;
    }
  }

  Status status() const {
    switch (state_) {
      case State::Inactive: return Status::Inactive;
      case State::Competing: return Status::Competing;
      default: return Status::Mis;
    }
  }

  uint64_t priority_size() const { return k_; }
  bool advance_scheduled() const { return advance_pending_; }

 private:
  enum class State : uint8_t { Inactive, Competing, Mis };

  State state_ = State::Inactive;
  uint64_t k_;
  bool next_bit_ = false;
  bool next_drawn_ = false;
  bool advance_pending_ = false;
  bool beeped_ = false;
};

}  // namespace beepnet
