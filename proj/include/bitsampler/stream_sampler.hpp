#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <utility>

#include "bitsampler/bit_tape.hpp"
#include "bitsampler/numeric.hpp"

namespace bitsampler {

// Single-sample streaming sampler with an explicit error budget eps.
//
// Conceptually the sampler owns a pool of s equally likely bit strings,
// partitioned into one block of h strings per item seen so far plus a
// discard block of h_bot strings. Processing an item first doubles the pool
// (one random bit per doubling) until s >= (t+1)^2/eps, then re-partitions
// so every item owns exactly floor(s/t) strings. Only the position of the
// one live string is tracked: loc says which block it is in (0 = discard)
// and rank its position inside that block. Returning the stored item iff
// loc != 0 yields each item with probability floor(s/t)/s and a discard
// probability of at most eps, while consuming log2(s) bits in total.
struct StreamCore {
  Epsilon eps;
  std::uint64_t t = 0;   // items processed
  Int s = 1;             // pool size, always a power of two
  Int h = 0;             // strings owned by each item
  Int h_bot = 0;         // strings owned by the discard block
  std::uint64_t loc = 0; // block holding the live string; 0 = discard
  Int rank = 0;          // 1-based position inside that block
  unsigned last_doublings = 0;

  explicit StreamCore(Epsilon e) : eps(e) {}

  // Grow the pool for step t (t must already be incremented). At t == 1 this
  // also draws the live string's initial rank.
  void double_step(BitTape& tape);

  // Re-partition the pool so the newest item owns floor(s/t) strings.
  void chop_step();

  // One full step; returns the new location.
  std::uint64_t process(BitTape& tape) {
    ++t;
    double_step(tape);
    chop_step();
    return loc;
  }

  bool has_sample() const { return loc != 0; }

  // Structural invariants; throws Error on violation.
  void check_invariants() const;
};

// StreamCore plus payload storage. T is any movable payload type.
template <class T>
class StreamSampler {
 public:
  explicit StreamSampler(Epsilon eps) : core_(eps) {}

  void process(T item, BitTape& tape) {
    std::uint64_t prev = core_.loc;
    core_.process(tape);
    assert(core_.loc == prev || core_.loc == core_.t || core_.loc == 0);
    (void)prev;
    if (core_.loc == core_.t) {
      stored_ = std::move(item);
    } else if (core_.loc == 0) {
      stored_.reset();
    }
    if (buffered() > max_buffered_) max_buffered_ = buffered();
  }

  // nullptr when the sampler currently holds the discard outcome.
  const T* current_sample() const {
    return core_.has_sample() ? &*stored_ : nullptr;
  }

  const StreamCore& core() const { return core_; }
  std::uint64_t items_seen() const { return core_.t; }
  std::size_t buffered() const { return stored_.has_value() ? 1 : 0; }
  std::size_t max_buffered() const { return max_buffered_; }

 private:
  StreamCore core_;
  std::optional<T> stored_;
  std::size_t max_buffered_ = 0;
};

// Weighted variant. An item of weight w stands for w unit copies; the pool
// is partitioned into one block of u = floor(s/W) strings per unit, where W
// is the running weight total, so item i is returned with probability
// w_i*u/s. The whole arrival is processed in one doubling phase (threshold
// (W_t+1)^2/eps) and one re-partition, which only needs the live string's
// own unit bookkeeping: its item's weight, that item's prefix weight (total
// weight of earlier items), the unit index inside the item, and the rank
// inside the unit.
struct WeightedCore {
  Epsilon eps;
  std::uint64_t t = 0;      // positive-weight items processed
  Int weight_sum = 0;       // W
  Int s = 1;
  Int unit_alloc = 0;       // u, strings owned by each unit
  Int h_bot = 0;
  std::uint64_t loc = 0;    // item holding the live string; 0 = discard
  Int unit_index = 0;       // 1-based unit inside item loc
  Int unit_rank = 0;        // 1-based position inside that unit
  Int bot_rank = 0;         // 1-based position when loc == 0
  std::uint64_t loc_weight = 0;  // weight of item loc
  Int loc_prefix = 0;            // total weight of items before loc
  unsigned last_doublings = 0;

  explicit WeightedCore(Epsilon e) : eps(e) {}

  enum class Step { Processed, SkippedZeroWeight };

  Step process(std::uint64_t weight, BitTape& tape);

  bool has_sample() const { return loc != 0; }
  void check_invariants() const;

 private:
  void place_live(const Int& block_rank, std::uint64_t weight,
                  const Int& prefix);
};

template <class T>
class WeightedStreamSampler {
 public:
  explicit WeightedStreamSampler(Epsilon eps) : core_(eps) {}

  WeightedCore::Step process(T item, std::uint64_t weight, BitTape& tape) {
    auto st = core_.process(weight, tape);
    if (st == WeightedCore::Step::SkippedZeroWeight) return st;
    if (core_.loc == core_.t) stored_ = std::move(item);
    else if (core_.loc == 0) stored_.reset();
    if (buffered() > max_buffered_) max_buffered_ = buffered();
    return st;
  }

  const T* current_sample() const {
    return core_.has_sample() ? &*stored_ : nullptr;
  }

  const WeightedCore& core() const { return core_; }
  std::size_t buffered() const { return stored_.has_value() ? 1 : 0; }
  std::size_t max_buffered() const { return max_buffered_; }

 private:
  WeightedCore core_;
  std::optional<T> stored_;
  std::size_t max_buffered_ = 0;
};

// One-shot sampler for a known n: draws r bits where r is the smallest
// integer with 2^r >= n/eps, splits the 2^r values into n runs of
// k = floor(2^r/n), and returns 0 (the discard outcome) for the at most
// eps*2^r values past the last run. Items are 1-based.
std::uint64_t offline_uniform(std::uint64_t n, const Epsilon& eps,
                              BitTape& tape);

// Bits offline_uniform will consume for this n and eps.
unsigned offline_bits(std::uint64_t n, const Epsilon& eps);

}  // namespace bitsampler
