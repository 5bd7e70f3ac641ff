#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "beepnet/engine.hpp"
#include "beepnet/graph.hpp"

namespace beepnet {

// MIS protocol for nodes that know an upper bound N on the network size.
//
// A node listens silently for c*log^2(N) rounds, then competes in log(N)
// phases of c*log(N) rounds, beeping with probability 2^i/(8N) in phase i.
// Surviving all phases it enters a permanent loop of two-round blocks,
// beeping in one round of each block (which side is a fair coin).  Hearing a
// beep while listening, at any point, resets the node to the start of the
// inactive countdown.  Logarithms are base-2 ceilings.
//
// Progress transitions (inactive -> competing -> MIS) take effect at the
// start of the next round, so the reported status always labels the segment
// the round's action belonged to.  Restarts take effect immediately.
class Alg1Automaton {
 public:
  Alg1Automaton(uint64_t upper_bound, uint32_t c) : upper_bound_(upper_bound), c_(c) {
    if (upper_bound == 0) throw std::invalid_argument("alg1: upper bound must be positive");
    if (c == 0) throw std::invalid_argument("alg1: c must be positive");
    log_n_ = ceil_log2(upper_bound);
    inactive_len_ = static_cast<uint64_t>(c_) * log_n_ * log_n_;
    phase_len_ = static_cast<uint64_t>(c_) * log_n_;
    reset();
  }

  template <class Rng>
  Action decide(uint64_t /*t*/, Rng& rng) {
    apply_pending();
    switch (mode_) {
      case Mode::Inactive:
        last_listened_ = true;
        return Action::Listen;
      case Mode::Competing: {
        bool beep = rng.bernoulli(phase_beep_probability(phase_));
        last_listened_ = !beep;
        return beep ? Action::Beep : Action::Listen;
      }
      case Mode::Mis: {
        if (block_pos_ == 0) beep_first_ = rng.bernoulli(0.5);
        bool beep = (block_pos_ == 0) == beep_first_;
        last_listened_ = !beep;
        return beep ? Action::Beep : Action::Listen;
      }
    }
    throw std::logic_error("alg1: bad mode");
  }

  template <class Rng>
  void absorb(const RoundFeedback& fb, uint64_t /*t*/, Rng& /*rng*/) {
    if (fb.heard_beep && last_listened_) {
      reset();
      return;
    }
    switch (mode_) {
      case Mode::Inactive:
        if (inactive_left_ > 0 && --inactive_left_ == 0) advance_pending_ = true;
        break;
      case Mode::Competing:
        if (++phase_round_ == phase_len_) {
          phase_round_ = 0;
          if (++phase_ > log_n_) advance_pending_ = true;
        }
        break;
      case Mode::Mis:
        block_pos_ ^= 1;
        break;
    }
  }

  Status status() const {
    switch (mode_) {
      case Mode::Inactive: return Status::Inactive;
      case Mode::Competing: return Status::Competing;
      case Mode::Mis: return Status::Mis;
    }
    throw std::logic_error("alg1: bad mode");
  }

  // Competition beep probability for the node's next round; zero outside
  // the competing segment.  This is the quantity the potential diagnostics
  // sum over, and it already accounts for a pending transition.
  double beep_probability() const {
    Mode m = mode_;
    uint32_t ph = phase_;
    if (advance_pending_) {
      if (m == Mode::Inactive) {
        m = Mode::Competing;
        ph = 1;
      } else {
        m = Mode::Mis;
      }
    }
    return m == Mode::Competing ? phase_beep_probability(ph) : 0.0;
  }

  double phase_beep_probability(uint32_t phase) const {
    return std::ldexp(1.0, static_cast<int>(phase)) / (8.0 * static_cast<double>(upper_bound_));
  }

  uint32_t phase() const { return mode_ == Mode::Competing ? phase_ : 0; }

 private:
  enum class Mode : uint8_t { Inactive, Competing, Mis };

  void reset() {
    advance_pending_ = false;
    phase_ = 1;
    phase_round_ = 0;
    block_pos_ = 0;
    if (inactive_len_ > 0) {
      mode_ = Mode::Inactive;
      inactive_left_ = inactive_len_;
    } else if (log_n_ > 0) {
      mode_ = Mode::Competing;
    } else {
      mode_ = Mode::Mis;
    }
  }

  void apply_pending() {
    if (!advance_pending_) return;
    advance_pending_ = false;
    if (mode_ == Mode::Inactive) {
      mode_ = log_n_ > 0 ? Mode::Competing : Mode::Mis;
      phase_ = 1;
      phase_round_ = 0;
    } else if (mode_ == Mode::Competing) {
      mode_ = Mode::Mis;
      block_pos_ = 0;
    }
  }

  uint64_t upper_bound_;
  uint32_t c_;
  uint32_t log_n_ = 0;
  uint64_t inactive_len_ = 0;
  uint64_t phase_len_ = 0;

  Mode mode_ = Mode::Inactive;
  bool advance_pending_ = false;
  uint64_t inactive_left_ = 0;
  uint32_t phase_ = 1;
  uint64_t phase_round_ = 0;
  uint8_t block_pos_ = 0;
  bool beep_first_ = false;
  bool last_listened_ = true;
};

}  // namespace beepnet
