#include <cstdint>
#include <string>
#include <vector>

#include "bitsampler/bit_tape.hpp"
#include "bitsampler/errors.hpp"
#include "bitsampler/verify.hpp"
#include "doctest.h"

using namespace bitsampler;

TEST_CASE("fixed tape serves bits in order and counts them") {
  auto tape = BitTape::from_bits("1");
  CHECK(tape.next_bit() == true);
  CHECK(tape.bits_consumed() == 1);

  auto zero = BitTape::from_bits("0");
  CHECK(zero.next_bit() == false);
  CHECK(zero.bits_consumed() == 1);

  auto empty = BitTape::from_bits("");
  CHECK_THROWS_AS(empty.next_bit(), TapeExhausted);
}

TEST_CASE("from_value expands most significant bit first") {
  auto tape = BitTape::from_value(6, 3);  // 110
  CHECK(tape.next_bit() == true);
  CHECK(tape.next_bit() == true);
  CHECK(tape.next_bit() == false);
  CHECK_THROWS_AS(tape.next_bit(), TapeExhausted);
}

TEST_CASE("uniform_int consumes no bits for m = 1") {
  auto tape = BitTape::from_bits("");
  CHECK(uniform_int(tape, Int(1)) == 0);
  CHECK(tape.bits_consumed() == 0);
}

TEST_CASE("uniform_int reads ceil(log2 m) bits most significant first") {
  auto tape = BitTape::from_bits("110");
  CHECK(uniform_int(tape, Int(8)) == 6);
  CHECK(tape.bits_consumed() == 3);
}

TEST_CASE("uniform_int rejects and redraws out-of-range values") {
  // m = 3: "11" is rejected, "01" accepted as 1; 4 bits total.
  auto tape = BitTape::from_bits("1101");
  CHECK(uniform_int(tape, Int(3)) == 1);
  CHECK(tape.bits_consumed() == 4);
}

TEST_CASE("uniform_int over the word overload matches the Int overload") {
  auto a = BitTape::seeded(7);
  auto b = BitTape::seeded(7);
  for (int i = 0; i < 200; ++i) {
    std::uint64_t m = 1 + (i * 37) % 97;
    CHECK(uniform_int(a, m) == static_cast<std::uint64_t>(uniform_int(b, Int(m))));
  }
  CHECK(a.bits_consumed() == b.bits_consumed());
}

TEST_CASE("bernoulli degenerate arguments consume no bits") {
  auto tape = BitTape::from_bits("");
  CHECK(bernoulli(tape, Int(0), Int(1)) == false);
  CHECK(bernoulli(tape, Int(1), Int(1)) == true);
  CHECK(tape.bits_consumed() == 0);
}

TEST_CASE("bernoulli decides on the first disagreeing expansion bit") {
  // 1/3 = 0.010101...; tape 00 disagrees at the second bit, below the
  // expansion, so the draw is true after exactly 2 bits.
  auto tape = BitTape::from_bits("00");
  CHECK(bernoulli(tape, Int(1), Int(3)) == true);
  CHECK(tape.bits_consumed() == 2);
}

TEST_CASE("bernoulli with terminating expansion stops at the last digit") {
  // 1/2 = 0.1; tape bit 1 matches, remainder hits zero, result false.
  auto tape = BitTape::from_bits("1");
  CHECK(bernoulli(tape, Int(1), Int(2)) == false);
  CHECK(tape.bits_consumed() == 1);
  auto tape2 = BitTape::from_bits("0");
  CHECK(bernoulli(tape2, Int(1), Int(2)) == true);
}

TEST_CASE("uniform_int is exactly uniform for every m up to 64") {
  for (std::uint64_t m = 1; m <= 64; ++m) {
    UniformIntMachine machine{Int(m)};
    unsigned width = ceil_log2(Int(m));
    // Three full rejection rounds leave at most (1 - m/2^w)^3 < 1/8 of the
    // mass undecided; every decided value must carry identical mass.
    auto e = enumerate_machine(machine, 3 * std::max(1u, width));
    REQUIRE(e.outcomes.size() == static_cast<std::size_t>(m));
    Rational first = e.outcomes.begin()->second;
    for (auto& [value, mass] : e.outcomes) {
      CHECK(value >= 0);
      CHECK(value < Int(m));
      CHECK(mass == first);
    }
    CHECK(Rational(first * m + e.undecided) == 1);
  }
}

TEST_CASE("bernoulli mass converges to num/den") {
  const Int cases[][2] = {{1, 3}, {2, 5}, {7, 11}, {1, 7}, {54, 101}};
  for (auto& c : cases) {
    BernoulliMachine machine{c[0], c[1]};
    auto e = enumerate_machine(machine, 32);
    Rational truth(c[0], c[1]);
    Rational got = e.mass_of(true);
    Rational err = got > truth ? got - truth : truth - got;
    // Undecided mass halves per level, so the gap is at most 2^-32.
    CHECK(err <= Rational(1, Int(1) << 32));
    CHECK(e.undecided <= Rational(1, Int(1) << 32));
  }
}

TEST_CASE("seeded tapes are deterministic and replayable bit for bit") {
  auto live = BitTape::seeded(42);
  std::string recorded;
  std::vector<Int> values;
  for (int i = 0; i < 50; ++i) values.push_back(uniform_int(live, Int(3 + i)));
  // Re-record the raw bits from an identical tape, then replay them.
  auto raw = BitTape::seeded(42);
  for (std::uint64_t i = 0; i < live.bits_consumed(); ++i)
    recorded.push_back(raw.next_bit() ? '1' : '0');
  auto replay = BitTape::from_bits(recorded);
  for (int i = 0; i < 50; ++i) CHECK(uniform_int(replay, Int(3 + i)) == values[i]);
  CHECK(replay.bits_consumed() == live.bits_consumed());
  CHECK_THROWS_AS(replay.next_bit(), TapeExhausted);
}

TEST_CASE("keyed tapes are deterministic per seed and differ across seeds") {
  auto a1 = BitTape::keyed(9);
  auto a2 = BitTape::keyed(9);
  auto b = BitTape::keyed(10);
  int diff = 0;
  for (int i = 0; i < 512; ++i) {
    bool bit = a1.next_bit();
    CHECK(a2.next_bit() == bit);
    if (b.next_bit() != bit) ++diff;
  }
  CHECK(diff > 128);  // streams from different keys decorrelate
}

TEST_CASE("seeded streams with different seeds disagree") {
  auto a = BitTape::seeded(1);
  auto b = BitTape::seeded(2);
  int diff = 0;
  for (int i = 0; i < 512; ++i)
    if (a.next_bit() != b.next_bit()) ++diff;
  CHECK(diff > 128);
}

TEST_CASE("uniform_int rejects m < 1") {
  CHECK_THROWS_AS(UniformIntMachine{Int(0)}, std::invalid_argument);
}

TEST_CASE("bernoulli rejects malformed fractions") {
  CHECK_THROWS_AS((BernoulliMachine{Int(2), Int(1)}), std::invalid_argument);
  CHECK_THROWS_AS((BernoulliMachine{Int(-1), Int(2)}), std::invalid_argument);
  CHECK_THROWS_AS((BernoulliMachine{Int(1), Int(0)}), std::invalid_argument);
}
