#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "bitsampler/errors.hpp"
#include "bitsampler/numeric.hpp"

namespace bitsampler {

namespace detail {
struct SeededTape {
  std::mt19937_64 gen;
  std::uint64_t word = 0;
  unsigned left = 0;
};
struct KeyedTape {
  std::uint64_t seed = 0;
  std::uint64_t block_index = 0;
  unsigned char block[64] = {};
  unsigned byte_pos = 64;
  unsigned bit_pos = 0;
};
struct FixedTape {
  std::vector<bool> bits;
  std::size_t pos = 0;
};
}  // namespace detail

// A tape of random bits. Every primitive in the library draws its randomness
// through one of these, one bit at a time, so the exact number of consumed
// bits is always observable.
//
// Providers:
//   seeded(seed)  - std::mt19937_64 keyed by the seed; bits are served from
//                   each 64-bit output most significant first.
//   keyed(seed)   - ChaCha20 keystream (via libsodium) keyed by the seed,
//                   for callers that want a cryptographic-quality stream.
//   from_bits(s)  - fixed finite tape of '0'/'1' characters; running past the
//                   end throws TapeExhausted.
//   from_value(x, nbits) - fixed tape holding the nbits-wide binary expansion
//                   of x, most significant bit first.
class BitTape {
 public:
  static BitTape seeded(std::uint64_t seed);
  static BitTape keyed(std::uint64_t seed);
  static BitTape from_bits(std::string_view bits);
  static BitTape from_value(std::uint64_t value, unsigned nbits);

  bool next_bit();
  std::uint64_t bits_consumed() const { return consumed_; }

 private:
  BitTape() = default;
  std::variant<detail::SeededTape, detail::KeyedTape, detail::FixedTape> src_;
  std::uint64_t consumed_ = 0;
};

// Resumable core of uniform_int: consumes ceil(log2(m)) bits most significant
// first and rejects values >= m. Kept as an explicit state machine so the
// same logic can run against a tape or inside an exhaustive enumerator.
struct UniformIntMachine {
  Int m;
  unsigned width = 0;
  unsigned got = 0;
  Int acc = 0;
  bool finished = false;

  explicit UniformIntMachine(Int target) : m(std::move(target)) {
    if (m < 1) throw std::invalid_argument("uniform_int needs m >= 1");
    width = ceil_log2(m);
    if (width == 0) finished = true;  // m == 1: the only value is 0
  }

  bool done() const { return finished; }
  Int result() const { return acc; }

  void feed(bool bit) {
    acc <<= 1;
    if (bit) acc |= 1;
    if (++got == width) {
      if (acc < m) {
        finished = true;
      } else {
        acc = 0;
        got = 0;
      }
    }
  }

  auto key() const { return std::make_tuple(m, got, acc, finished); }
};

// Resumable core of bernoulli(num/den): lazily compares tape bits against the
// binary expansion of num/den; the first disagreeing bit decides. Expected
// consumption is at most 2 bits.
struct BernoulliMachine {
  Int den;
  Int rem;          // current remainder of the expansion
  bool finished = false;
  bool value = false;

  BernoulliMachine(const Int& num, const Int& den_in) : den(den_in), rem(num) {
    if (den <= 0 || num < 0 || num > den)
      throw std::invalid_argument("bernoulli needs 0 <= num <= den");
    if (num == 0) { finished = true; value = false; }
    else if (num == den) { finished = true; value = true; }
  }

  bool done() const { return finished; }
  bool result() const { return value; }

  void feed(bool bit) {
    rem <<= 1;
    bool digit = rem >= den;
    if (digit) rem -= den;
    if (bit != digit) {
      finished = true;
      value = digit;  // tape bit below the expansion digit means tape < num/den
    } else if (rem == 0) {
      finished = true;  // expansion terminated; remaining digits are zero
      value = false;
    }
  }

  auto key() const { return std::make_tuple(den, rem, finished, value); }
};

// Uniform value in [0, m). Exactly log2(m) bits when m is a power of two.
Int uniform_int(BitTape& tape, const Int& m);
std::uint64_t uniform_int(BitTape& tape, std::uint64_t m);

// True with probability exactly num/den.
bool bernoulli(BitTape& tape, const Int& num, const Int& den);

}  // namespace bitsampler
