#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "bitsampler/bit_tape.hpp"
#include "bitsampler/numeric.hpp"

namespace bitsampler {

// Replace-with-probability-1/i reservoir step. Returns true when the
// arriving item i (1-based) should replace the held sample.
inline bool basic_reservoir_step(std::uint64_t i, BitTape& tape) {
  return bernoulli(tape, Int(1), Int(i));
}

// Runs the basic reservoir over items 1..n and returns the final sample.
std::uint64_t basic_reservoir_sample(std::uint64_t n, BitTape& tape);

// Skip distribution used by the jump-ahead reservoir: probability that,
// holding a sample at time i, the next replacement happens s items later.
inline Rational skip_probability(const Int& i, const Int& s) {
  return Rational(i, (i + s) * (i + s + 1));
}

// P[skip >= m] = i/(i+m); the tail telescopes.
inline Rational skip_tail_probability(const Int& i, const Int& m) {
  return Rational(i, i + m);
}

// Samples from an explicit rational distribution D over {0..m} using the
// array-with-rejection scheme: conceptually an array A holding value j
// exactly floor((m+1)*D(j)) + 1 times; a uniform slot of A is accepted
// outright unless it is the first copy of its value, which is accepted only
// with the fractional part of (m+1)*D(j). Each round returns with
// probability (m+1)/|A| >= 1/2, so the expected bit cost stays O(log m).
// The array is never materialized; only the per-value counts are.
struct DiscreteSamplerMachine {
  std::vector<Int> cum;                        // cumulative copy counts
  std::vector<std::pair<Int, Int>> frac;       // fractional parts, num/den
  Int asize = 0;
  UniformIntMachine uni;
  std::optional<BernoulliMachine> bern;
  std::uint64_t picked = 0;
  bool finished = false;
  std::uint64_t value = 0;

  explicit DiscreteSamplerMachine(const std::vector<Rational>& dist);

  bool done() const { return finished; }
  std::uint64_t result() const { return value; }
  void feed(bool bit);
  auto key() const {
    return std::make_tuple(uni.got, uni.acc,
                           bern ? bern->rem : Int(-1),
                           bern ? bern->den : Int(-1), picked, finished,
                           value);
  }

 private:
  void restart();
  void resolve();
};

std::uint64_t bl_discrete_sample(const std::vector<Rational>& dist,
                                 BitTape& tape);

// Samples the skip length at time i. The first window covers {0..i} with a
// tail bucket for larger skips; hitting the tail restarts on the
// conditional distribution, which keeps the same closed form with the
// window start folded into the shape parameter, so each escalation doubles
// the window. All per-window copy counts come from closed forms:
// value 0 gets 2 copies, values 1..i one copy each, the tail bucket
// floor(i(i+2)/(2i+1)) + 1 copies.
//
// With a cap c the machine reports any skip >= c as exactly c and skips
// whole windows past the cap without consuming bits, which is how a driver
// over a finite stream uses it.
struct VitterSkipMachine {
  Int base;                 // time index i
  std::optional<Int> cap;
  Int lo = 0;               // start of the current window
  Int shape = 0;            // window shape parameter, base + lo
  Int tail_copies = 0;
  Int asize = 0;
  UniformIntMachine uni;
  std::optional<BernoulliMachine> bern;
  Int picked = 0;
  bool finished = false;
  Int skip = 0;

  explicit VitterSkipMachine(Int i, std::optional<Int> cap = std::nullopt);

  bool done() const { return finished; }
  const Int& result() const { return skip; }
  void feed(bool bit);
  auto key() const {
    return std::make_tuple(lo, uni.got, uni.acc,
                           bern ? bern->rem : Int(-1),
                           bern ? bern->den : Int(-1), picked, finished, skip);
  }

 private:
  void open_window();
  void accept(const Int& offset);
  void resolve();
};

// Skip length at time i; values >= cap are reported as cap when a cap is
// given.
Int vitter_skip_step(const Int& i, BitTape& tape,
                     std::optional<Int> cap = std::nullopt);

// Runs the jump-ahead reservoir over items 1..n and returns the final
// sample.
std::uint64_t vitter_reservoir_sample(std::uint64_t n, BitTape& tape);

}  // namespace bitsampler
