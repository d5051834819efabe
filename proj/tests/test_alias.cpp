#include <cstdint>
#include <map>
#include <vector>

#include "bitsampler/alias_table.hpp"
#include "bitsampler/bit_tape.hpp"
#include "bitsampler/errors.hpp"
#include "bitsampler/verify.hpp"
#include "doctest.h"

using namespace bitsampler;

namespace {

std::vector<Int> ints(std::initializer_list<long> xs) {
  return std::vector<Int>(xs.begin(), xs.end());
}

}  // namespace

TEST_CASE("equal weights give wholly owned buckets") {
  auto t = build_alias(ints({1, 1}));
  CHECK(t.n == 2);
  CHECK(t.total == 2);
  REQUIRE(t.buckets.size() == 2);
  for (std::uint64_t b = 0; b < 2; ++b) {
    CHECK(t.buckets[b].primary == b);
    CHECK(t.buckets[b].cut == t.total);
    CHECK_FALSE(t.buckets[b].alias.has_value());
  }
}

TEST_CASE("weights 1,3 split the first bucket at its owned mass") {
  auto t = build_alias(ints({1, 3}));
  CHECK(t.total == 4);
  REQUIRE(t.buckets.size() == 2);
  CHECK(t.buckets[0].primary == 0);
  CHECK(t.buckets[0].cut == 2);
  REQUIRE(t.buckets[0].alias.has_value());
  CHECK(*t.buckets[0].alias == 1);
  CHECK(t.buckets[1].primary == 1);
  CHECK(t.buckets[1].cut == 4);
  CHECK_FALSE(t.buckets[1].alias.has_value());
  auto owned = t.owned_mass();
  CHECK(owned[0] == 2);  // n * x_0
  CHECK(owned[1] == 6);
}

TEST_CASE("a single weight owns its whole bucket") {
  auto t = build_alias(ints({5}));
  CHECK(t.n == 1);
  CHECK(t.total == 5);
  REQUIRE(t.buckets.size() == 1);
  CHECK(t.buckets[0].cut == t.total);
  auto tape = BitTape::seeded(1);
  for (int i = 0; i < 20; ++i) CHECK(alias_sample(t, tape) == 0);
}

TEST_CASE("sampling walks bucket then cut") {
  auto t = build_alias(ints({1, 3}));
  // Draws come from uniform_int(8): value 0 lands below bucket 0's cut,
  // value 3 above it (alias), value 4 opens bucket 1.
  auto a = BitTape::from_bits("000");
  CHECK(alias_sample(t, a) == 0);
  auto b = BitTape::from_bits("011");
  CHECK(alias_sample(t, b) == 1);
  auto c = BitTape::from_bits("100");
  CHECK(alias_sample(t, c) == 1);
}

TEST_CASE("owned mass is exactly n times each weight") {
  auto tape = BitTape::seeded(77);
  for (int round = 0; round < 40; ++round) {
    std::size_t n = 1 + static_cast<std::size_t>(uniform_int(tape, 50));
    std::vector<Int> xs;
    Int total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(uniform_int(tape, Int(1) << 40));
      total += xs.back();
    }
    if (total == 0) xs[0] = total = 1;
    auto t = build_alias(xs);
    CHECK(t.total == total);
    auto owned = t.owned_mass();
    REQUIRE(owned.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(owned[i] == Int(n) * xs[i]);
    for (auto& b : t.buckets) {
      CHECK(b.cut >= 0);
      CHECK(b.cut <= t.total);
      CHECK(b.alias.has_value() == (b.cut < t.total));
    }
    CHECK(t.build_ops <= 4 * n);
  }
}

TEST_CASE("the sampling map reproduces the weight shares exactly") {
  const std::vector<std::vector<Int>> cases = {
      ints({1, 3}), ints({2, 2, 1}), ints({7, 1, 4}), ints({1, 0, 2}),
      ints({9}),    ints({1, 1, 1, 1, 1}),
  };
  for (auto& xs : cases) {
    auto t = build_alias(xs);
    Int space = Int(t.n) * t.total;
    UniformIntMachine m{space};
    auto e = enumerate_machine(m, 3 * ceil_log2(space));
    // Each residual value keeps identical mass, so the decided mass of an
    // item is its owned count times the per-value share.
    std::map<std::uint64_t, Rational> per_item;
    for (auto& [value, mass] : e.outcomes) {
      std::uint64_t bucket = static_cast<std::uint64_t>(value / t.total);
      Int offset = value % t.total;
      auto& bkt = t.buckets[bucket];
      std::uint64_t item = offset < bkt.cut ? bkt.primary : *bkt.alias;
      per_item[item] += mass;
    }
    auto owned = t.owned_mass();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Rational got = per_item.count(i) ? per_item[i] : Rational(0);
      CHECK(got * space == Rational(owned[i]) * (1 - e.undecided));
    }
  }
}

TEST_CASE("zero-weight items are never sampled") {
  auto t = build_alias(ints({0, 4, 0, 1}));
  auto owned = t.owned_mass();
  CHECK(owned[0] == 0);
  CHECK(owned[2] == 0);
  auto tape = BitTape::seeded(13);
  for (int i = 0; i < 500; ++i) {
    auto got = alias_sample(t, tape);
    CHECK((got == 1 || got == 3));
  }
}

TEST_CASE("building with no positive weight is an error") {
  CHECK_THROWS_AS(build_alias(ints({0, 0, 0})), AllZeroWeights);
  CHECK_THROWS_AS(build_alias(ints({})), AllZeroWeights);
}

TEST_CASE("builds are deterministic") {
  auto a = build_alias(ints({3, 1, 4, 1, 5}));
  auto b = build_alias(ints({3, 1, 4, 1, 5}));
  REQUIRE(a.buckets.size() == b.buckets.size());
  for (std::size_t i = 0; i < a.buckets.size(); ++i) {
    CHECK(a.buckets[i].primary == b.buckets[i].primary);
    CHECK(a.buckets[i].cut == b.buckets[i].cut);
    CHECK(a.buckets[i].alias == b.buckets[i].alias);
  }
}

TEST_CASE("sampled frequencies track the exact shares") {
  auto t = build_alias(ints({1, 3}));
  auto tape = BitTape::seeded(4);
  int first = 0;
  const int trials = 40000;
  for (int i = 0; i < trials; ++i)
    if (alias_sample(t, tape) == 0) ++first;
  CHECK(first > trials / 4 - 600);
  CHECK(first < trials / 4 + 600);
}
