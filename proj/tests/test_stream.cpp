#include <cstdint>
#include <string>

#include "bitsampler/bit_tape.hpp"
#include "bitsampler/errors.hpp"
#include "bitsampler/stream_sampler.hpp"
#include "bitsampler/verify.hpp"
#include "doctest.h"

using namespace bitsampler;

TEST_CASE("fresh core starts with a pool of one discard string") {
  for (auto eps : {Epsilon(1, 2), Epsilon(1, 4), Epsilon(3, 4)}) {
    StreamCore core(eps);
    CHECK(core.t == 0);
    CHECK(core.s == 1);
    CHECK(core.h == 0);
    CHECK(core.h_bot == 0);
    CHECK(core.loc == 0);
    CHECK_FALSE(core.has_sample());
  }
}

TEST_CASE("first step grows the pool to the initial size and draws a rank") {
  // eps = 1/2: initial pool 8, so the first item costs exactly 3 bits and
  // the live string's rank is the drawn value plus one.
  StreamCore core(Epsilon(1, 2));
  core.t = 1;
  auto tape = BitTape::from_bits("101");
  core.double_step(tape);
  CHECK(core.s == 8);
  CHECK(core.h == 8);
  CHECK(core.h_bot == 0);
  CHECK(core.loc == 1);
  CHECK(core.rank == 6);  // 101 -> 5, ranks are 1-based
  CHECK(tape.bits_consumed() == 3);
}

TEST_CASE("doubling grows the pool until it clears the step threshold") {
  // eps = 1/2, t = 2: threshold (t+1)^2/eps = 18, so 8 -> 16 -> 32.
  StreamCore core(Epsilon(1, 2));
  auto tape = BitTape::from_bits("000");
  core.t = 1;
  core.double_step(tape);
  core.chop_step();
  CHECK(core.s == 8);

  core.t = 2;
  auto grow = BitTape::from_bits("00");
  core.double_step(grow);
  CHECK(core.s == 32);
  CHECK(core.h == 32);
  CHECK(grow.bits_consumed() == 2);
  CHECK(core.last_doublings == 2);

  // A zero bit keeps the rank in the lower half each time.
  CHECK(core.rank == 1);
}

TEST_CASE("doubling a rank into the upper half adds the block size") {
  StreamCore core(Epsilon(1, 2));
  core.t = 1;
  auto init = BitTape::from_bits("000");
  core.double_step(init);  // s=8, rank=1
  core.chop_step();
  core.t = 2;
  auto grow = BitTape::from_bits("11");
  core.double_step(grow);
  // First doubling: h 8 -> 16, bit 1 lifts rank by the old h (8) -> 9.
  // Second: h 16 -> 32, bit 1 lifts by 16 -> 25.
  CHECK(core.rank == 25);
  CHECK(core.s == 32);
}

TEST_CASE("chop after the second item splits the pool per the hand run") {
  // eps = 1/2: after doubling at t=2 the pool is 32 with h=32; the chop
  // gives each of the two items floor(32/2) = 16 strings and none discard.
  StreamCore core(Epsilon(1, 2));
  core.t = 1;
  auto init = BitTape::from_bits("000");
  core.double_step(init);
  core.chop_step();
  core.t = 2;
  auto grow = BitTape::from_bits("00");
  core.double_step(grow);
  core.chop_step();
  CHECK(core.s == 32);
  CHECK(core.h == 16);
  CHECK(core.h_bot == 0);
  core.check_invariants();
}

TEST_CASE("third item needs no doubling and chops into a discard block") {
  // eps = 1/2, t = 3: 32 >= 16/eps = 32 so zero bits; chop to
  // h = floor(32/3) = 10 with h_bot = 2.
  StreamCore core(Epsilon(1, 2));
  auto tape = BitTape::from_bits("00000");
  for (int i = 0; i < 3; ++i) core.process(tape);
  CHECK(tape.bits_consumed() == 5);
  CHECK(core.s == 32);
  CHECK(core.h == 10);
  CHECK(core.h_bot == 2);
  core.check_invariants();
}

TEST_CASE("chop keeps a low rank inside the new block") {
  // Hand run: t=2 state h=32 rank=16; new h' = 16, tail h_T = 16; with
  // rank <= h' the live string stays put in item 2's block.
  StreamCore core(Epsilon(1, 2));
  core.t = 1;
  auto init = BitTape::from_bits("111");  // rank 8
  core.double_step(init);
  core.chop_step();
  core.t = 2;
  auto grow = BitTape::from_bits("10");
  core.double_step(grow);
  // First doubling lifts rank by the old h (8 + 8 = 16); the second bit is
  // 0 so the rank stays 16 while h reaches 32.
  CHECK(core.rank == 16);
  core.chop_step();
  CHECK(core.loc == 1);
  CHECK(core.rank == 16);
  CHECK(core.h == 16);
}

TEST_CASE("processing returns only the arriving item, the old one, or discard") {
  StreamCore core(Epsilon(1, 4));
  auto tape = BitTape::seeded(3);
  std::uint64_t prev = 0;
  for (std::uint64_t i = 1; i <= 3000; ++i) {
    std::uint64_t next = core.process(tape);
    bool legal = next == prev || next == i || next == 0;
    CHECK(legal);
    if (!legal) break;
    core.check_invariants();
    prev = next;
  }
}

TEST_CASE("per-item doubling count is at most two from the third item on") {
  for (auto eps : {Epsilon(1, 2), Epsilon(1, 16)}) {
    StreamCore core(eps);
    auto tape = BitTape::seeded(11);
    for (std::uint64_t i = 1; i <= 5000; ++i) {
      core.process(tape);
      if (i >= 3) CHECK(core.last_doublings <= 2);
    }
  }
}

TEST_CASE("total bits equal log2 of the final pool size") {
  for (auto eps : {Epsilon(1, 2), Epsilon(1, 16), Epsilon(3, 7)}) {
    StreamCore core(eps);
    auto tape = BitTape::seeded(5);
    for (int i = 0; i < 1000; ++i) core.process(tape);
    CHECK(is_power_of_two(core.s));
    CHECK(tape.bits_consumed() == floor_log2(core.s));
    // Pool bound: s < 2(t+1)^2/eps.
    CHECK(core.s * eps.num < Int(2) * (core.t + 1) * (core.t + 1) * eps.den);
  }
}

TEST_CASE("a single item with eps 1/4 is held with certainty") {
  StreamSampler<std::string> sampler(Epsilon(1, 4));
  auto tape = BitTape::seeded(1);
  sampler.process("only", tape);
  CHECK(sampler.core().s == 16);
  CHECK(tape.bits_consumed() == 4);
  REQUIRE(sampler.current_sample() != nullptr);
  CHECK(*sampler.current_sample() == "only");
  CHECK(sampler.items_seen() == 1);
  // n = 1 never discards: every rank lands in the single item's block.
  for (std::uint64_t v = 0; v < 16; ++v) {
    StreamSampler<int> s(Epsilon(1, 4));
    auto t = BitTape::from_value(v, 4);
    s.process(7, t);
    CHECK(s.current_sample() != nullptr);
  }
}

TEST_CASE("sampler hands back payloads only while the live string is owned") {
  StreamSampler<int> sampler(Epsilon(1, 2));
  auto tape = BitTape::seeded(17);
  int held = 0;
  for (int i = 1; i <= 500; ++i) {
    sampler.process(i, tape);
    const int* cur = sampler.current_sample();
    if (sampler.core().loc == 0) {
      CHECK(cur == nullptr);
    } else {
      REQUIRE(cur != nullptr);
      CHECK(*cur == static_cast<int>(sampler.core().loc));
      held = *cur;
    }
  }
  (void)held;
  CHECK(sampler.max_buffered() == 1);
}

TEST_CASE("exhaustive runs match the uniform share with bounded discard") {
  // 3 items, eps = 1/2: pool 32, each item 10/32, discard 2/32.
  auto d = enumerate_stream_distribution(3, Epsilon(1, 2));
  REQUIRE(d.items.size() == 3);
  for (auto& p : d.items) CHECK(p == Rational(10, 32));
  CHECK(d.bot == Rational(2, 32));
  CHECK(d.total() == 1);

  // 1 item: never the discard outcome.
  auto single = enumerate_stream_distribution(1, Epsilon(1, 2));
  REQUIRE(single.items.size() == 1);
  CHECK(single.items[0] == 1);
  CHECK(single.bot == 0);
}

TEST_CASE("exhaustive runs stay exact across small n and eps") {
  for (auto eps : {Epsilon(1, 2), Epsilon(1, 4)}) {
    for (std::uint64_t n = 1; n <= 5; ++n) {
      auto d = enumerate_stream_distribution(n, eps, 26);
      REQUIRE(d.items.size() == n);
      for (std::uint64_t i = 1; i < n; ++i) CHECK(d.items[i] == d.items[0]);
      CHECK(d.bot <= eps.value());
      CHECK(d.total() == 1);
    }
  }
}

TEST_CASE("pool clears the per-step threshold after every doubling phase") {
  StreamCore core(Epsilon(1, 8));
  auto tape = BitTape::seeded(23);
  for (std::uint64_t i = 1; i <= 2000; ++i) {
    core.process(tape);
    // s >= (t+1)^2/eps guarantees the next chop keeps h_bot under eps*s.
    CHECK(core.s * core.eps.num >= Int(core.t + 1) * (core.t + 1) * core.eps.den);
  }
}

TEST_CASE("one-shot sampler sizes its draw from n and eps") {
  CHECK(offline_bits(1, Epsilon(1, 2)) == 1);
  CHECK(offline_bits(3, Epsilon(1, 4)) == 4);
  CHECK(offline_bits(64, Epsilon(1, 2)) == 7);
}

TEST_CASE("one-shot sampler maps draws onto runs of equal length") {
  // n=3, eps=1/4: r=4, k=5; x=7 falls in the second run.
  auto tape = BitTape::from_bits("0111");
  CHECK(offline_uniform(3, Epsilon(1, 4), tape) == 2);
  CHECK(tape.bits_consumed() == 4);
  // x=15 goes past the last run: discard.
  auto top = BitTape::from_bits("1111");
  CHECK(offline_uniform(3, Epsilon(1, 4), top) == 0);
  // n=1, eps=1/2: r=1, k=2, both bits map to the item.
  for (auto bits : {"0", "1"}) {
    auto t = BitTape::from_bits(bits);
    CHECK(offline_uniform(1, Epsilon(1, 2), t) == 1);
  }
}

TEST_CASE("one-shot enumeration is uniform with discard below eps") {
  auto d = enumerate_offline_distribution(3, Epsilon(1, 4));
  REQUIRE(d.items.size() == 3);
  for (auto& p : d.items) CHECK(p == Rational(5, 16));
  CHECK(d.bot == Rational(1, 16));
  for (std::uint64_t n = 1; n <= 9; ++n) {
    for (auto eps : {Epsilon(1, 2), Epsilon(1, 8)}) {
      auto e = enumerate_offline_distribution(n, eps);
      REQUIRE(e.items.size() == n);
      for (auto& p : e.items) CHECK(p == e.items[0]);
      CHECK(e.bot <= eps.value());
      CHECK(e.total() == 1);
    }
  }
}
