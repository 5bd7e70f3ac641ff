#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "beepnet/engine.hpp"

namespace beepnet {

// Draws a random 0/1 schedule of the given length with at least one 1:
// every entry is a fair coin, then one uniformly chosen entry is forced
// to 1.
template <class Rng>
std::vector<uint8_t> draw_beep_schedule(uint32_t length, Rng& rng) {
  if (length == 0) throw std::invalid_argument("schedule length must be positive");
  std::vector<uint8_t> bits(length);
  for (auto& b : bits) b = static_cast<uint8_t>(rng.next_bit());
  bits[rng.next_index(length)] = 1;
  return bits;
}

// MIS protocol for the wake-on-beep model without collision detection.
// After the wake-up beep and one waiting round, a node runs phases
// x = 1, 2, ... of steps i = 0..x.  At the start of a step it becomes a
// candidate (v = 1) with probability 2^-i if it is neither a candidate nor
// inhibited (z = 1), and draws a fresh beep schedule X of length c*x.  The
// step then runs c*x three-round exchanges (listen / beep if v = 1 and the
// schedule says so / listen).
//
// Hearing a beep in any round clears v and sets z: the node stops
// competing and turns inactive.  z drops again only at the end of a step
// in which the node heard nothing at all, so a neighbourhood with a
// beeping winner stays suppressed while nodes whose surroundings have
// gone quiet recandidate.  Without the silence gate a winner's neighbour
// whose own inhibitors went silent would recoin forever and keep
// knocking the winner out: exchange grids of nodes woken one round apart
// are offset, so one direction of each edge can only be re-silenced, not
// suppressed, and on a beep-woken path the member set then churns
// instead of settling.
//
// A candidate that survives a whole step with v = 1 is in the MIS and
// keeps running; its schedule guarantees at least one beep per step,
// which keeps every neighbour inhibited for good.
class Alg3Automaton {
 public:
  explicit Alg3Automaton(uint32_t c = 3) : c_(c) {
    if (c == 0) throw std::invalid_argument("alg3: c must be positive");
  }

  template <class Rng>
  Action decide(uint64_t /*t*/, Rng& rng) {
    switch (mode_) {
      case Mode::WakeBeep:
        return Action::Beep;
      case Mode::Wait:
        return Action::Listen;
      case Mode::Loop:
        break;
    }
    if (exchange_ == 1 && round_ == 1) start_step(rng);
    if (round_ == 2 && v_ && schedule_[exchange_ - 1]) return Action::Beep;
    return Action::Listen;
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
      case Mode::Loop:
        break;
    }
    if (fb.heard_beep) {
      v_ = false;
      mis_latched_ = false;
      z_ = true;
      heard_in_step_ = true;
    }
    if (++round_ <= 3) return;
    round_ = 1;
    if (++exchange_ <= c_ * phase_) return;
    // end of step
    mis_latched_ = v_;
    if (!heard_in_step_) z_ = false;
    exchange_ = 1;
    if (++step_ > phase_) {
      ++phase_;
      step_ = 0;
    }
  }

  Status status() const {
    if (mode_ != Mode::Loop) return Status::Competing;
    if (v_ && mis_latched_) return Status::Mis;
    if (v_) return Status::Competing;
    return z_ ? Status::Inactive : Status::Competing;
  }

  bool in_loop() const { return mode_ == Mode::Loop; }
  uint32_t phase() const { return phase_; }
  uint32_t step() const { return step_; }
  uint32_t exchange() const { return exchange_; }
  uint32_t exchange_round() const { return round_; }
  bool candidate() const { return v_; }
  bool inhibited() const { return z_; }
  const std::vector<uint8_t>& schedule() const { return schedule_; }

 private:
  enum class Mode : uint8_t { WakeBeep, Wait, Loop };

  template <class Rng>
  void start_step(Rng& rng) {
    if (!v_ && !z_ &&
        rng.bernoulli(std::ldexp(1.0, -static_cast<int>(step_)))) {
      v_ = true;
      mis_latched_ = false;
    }
    schedule_ = draw_beep_schedule(c_ * phase_, rng);
    heard_in_step_ = false;
  }

  uint32_t c_;
  Mode mode_ = Mode::WakeBeep;
  uint32_t phase_ = 1;
  uint32_t step_ = 0;
  uint32_t exchange_ = 1;
  uint32_t round_ = 1;
  bool v_ = false;
  bool z_ = false;
  bool mis_latched_ = false;
  bool heard_in_step_ = false;
  std::vector<uint8_t> schedule_;
};

}  // namespace beepnet
