#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "beepnet/engine.hpp"

namespace beepnet {

// MIS protocol for the wake-on-beep model with sender-side collision
// detection.  A node beeps once upon waking, waits one round, then runs
// phases x = 1, 2, ...; phase x consists of steps i = 0..x and each step is
// two three-round exchanges:
//
//   exchange 1: listen; beep with probability 2^-i (setting v = 1); listen.
//               Any beep received during the exchange, including one heard
//               while beeping, clears v at the end of the exchange.
//   exchange 2: listen; if v = 1 beep and join the MIS; listen.  A node
//               that received a beep in this exchange without joining
//               becomes permanently inactive at the end of the exchange.
//
// Nodes that joined the MIS stop executing and stay silent, as do
// terminated nodes.  Requires SenderCd feedback to be meaningful.
class Alg2Automaton {
 public:
  Alg2Automaton() = default;

  template <class Rng>
  Action decide(uint64_t /*t*/, Rng& rng) {
    switch (mode_) {
      case Mode::WakeBeep:
        return Action::Beep;
      case Mode::Wait:
      case Mode::Mis:
      case Mode::Terminated:
        return Action::Listen;
      case Mode::Loop:
        break;
    }
    if (exchange_ == 1) {
      switch (round_) {
        case 1:
          v_ = false;
          heard_in_exchange_ = false;
          return Action::Listen;
        case 2:
          if (rng.bernoulli(std::ldexp(1.0, -static_cast<int>(step_)))) {
            v_ = true;
            return Action::Beep;
          }
          return Action::Listen;
        case 3:
          return Action::Listen;
      }
    } else {
      switch (round_) {
        case 1:
          heard_in_exchange_ = false;
          return Action::Listen;
        case 2:
          if (v_) {
            join_pending_ = true;
            return Action::Beep;
          }
          return Action::Listen;
        case 3:
          return Action::Listen;
      }
    }
    throw std::logic_error("alg2: bad position");
  }

  template <class Rng>
  void absorb(const RoundFeedback& fb, uint64_t /*t*/, Rng& /*rng*/) {
    switch (mode_) {
      case Mode::WakeBeep:
        mode_ = Mode::Wait;
        return;
      case Mode::Wait:
        mode_ = Mode::Loop;
        phase_ = 1;
        step_ = 0;
        exchange_ = 1;
        round_ = 1;
        return;
      case Mode::Mis:
      case Mode::Terminated:
        return;
      case Mode::Loop:
        break;
    }
    heard_in_exchange_ = heard_in_exchange_ || fb.heard_beep;
    if (++round_ <= 3) return;
    round_ = 1;
    if (exchange_ == 1) {
      if (heard_in_exchange_) v_ = false;
      exchange_ = 2;
      return;
    }
    // end of exchange 2: resolve the step
    if (join_pending_) {
      mode_ = Mode::Mis;
      return;
    }
    if (heard_in_exchange_) {
      mode_ = Mode::Terminated;
      return;
    }
    exchange_ = 1;
    if (++step_ > phase_) {
      ++phase_;
      step_ = 0;
    }
  }

  Status status() const {
    switch (mode_) {
      case Mode::Mis: return Status::Mis;
      case Mode::Terminated: return Status::Inactive;
      default: return Status::Competing;
    }
  }

  bool in_loop() const { return mode_ == Mode::Loop; }
  uint32_t phase() const { return phase_; }
  uint32_t step() const { return step_; }
  uint32_t exchange() const { return exchange_; }
  uint32_t exchange_round() const { return round_; }

 private:
  enum class Mode : uint8_t { WakeBeep, Wait, Loop, Mis, Terminated };

  Mode mode_ = Mode::WakeBeep;
  uint32_t phase_ = 1;
  uint32_t step_ = 0;
  uint32_t exchange_ = 1;
  uint32_t round_ = 1;
  bool v_ = false;
  bool heard_in_exchange_ = false;
  bool join_pending_ = false;
};

}  // namespace beepnet
