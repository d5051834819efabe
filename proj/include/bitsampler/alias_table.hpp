#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bitsampler/bit_tape.hpp"
#include "bitsampler/numeric.hpp"

namespace bitsampler {

// Exact alias table over non-negative integer weights x_0..x_{n-1} with
// total S. Every weight is scaled by n so each of the n buckets carries
// total mass exactly S: the first cut units of bucket b belong to item
// b itself, the rest to the alias. Sampling draws one uniform value in
// [0, n*S) and needs no divisions beyond the bucket split, so
// P[item i] = x_i/S holds exactly.
struct AliasTable {
  struct Bucket {
    std::uint64_t primary = 0;
    std::optional<std::uint64_t> alias;
    Int cut = 0;  // in [0, S]; mass below the cut goes to primary
  };

  std::uint64_t n = 0;
  Int total = 0;  // S
  std::vector<Bucket> buckets;
  std::uint64_t build_ops = 0;  // worklist pushes + pops, O(n)

  // Owned mass of item i over the n*S outcome space.
  std::vector<Int> owned_mass() const;
};

// Deterministic build; worklists are processed lowest index first.
// Throws AllZeroWeights when no weight is positive.
AliasTable build_alias(const std::vector<Int>& weights);

// One exact draw: 0-based item index.
std::uint64_t alias_sample(const AliasTable& table, BitTape& tape);

}  // namespace bitsampler
