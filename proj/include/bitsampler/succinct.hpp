#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "bitsampler/alias_table.hpp"
#include "bitsampler/bit_tape.hpp"
#include "bitsampler/numeric.hpp"

namespace bitsampler {

// Truncated form of a w-bit weight: the position of the leading one
// (f, counted 1-based from the most significant of the w bits) plus the
// mantissa_bits(eps) bits that follow it. Reconstruction zero-fills the
// rest, so x' <= x < x' + (eps/2) * x and weights with few significant bits
// round-trip exactly. Requires eps to be a power of 1/2.
struct TruncatedWeight {
  bool zero = true;
  std::uint16_t f = 0;          // 1..w when not zero
  std::uint64_t mantissa = 0;   // bits after the implicit leading one
};

// ceil(log2(2/eps)); throws unless eps is a power of 1/2.
unsigned mantissa_bits(const Epsilon& eps);

TruncatedWeight truncate_weight(const Int& x, const Epsilon& eps, unsigned w);
Int reconstruct_weight(const TruncatedWeight& t, const Epsilon& eps,
                       unsigned w);

// Multiplicative-error index: an exact alias table over the truncated
// weights, so each positive item is returned with probability within
// [(1-eps), (1+eps)] times its true share. Stored form keeps only
// ceil(log2 w) + mantissa_bits(eps) + 1 bits per item; the alias table is
// rebuilt deterministically on load.
struct MultIndex {
  std::uint64_t n = 0;
  unsigned w = 0;
  Epsilon eps;
  std::vector<TruncatedWeight> weights;
  AliasTable table;
};

MultIndex build_mult(const std::vector<Int>& xs, const Epsilon& eps,
                     unsigned w);
std::uint64_t sample_mult(const MultIndex& index, BitTape& tape);

// Additive-error index: m = 1/eps slots (requires integer 1/eps), item i
// owning c_i of them with |c_i/m - x_i/S| < eps. Counts come from
// largest-remainder rounding of m*x_i/S with ties broken toward the lower
// index; slots list items in ascending order.
struct AdditiveTable {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  Epsilon eps;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> slots;
};

AdditiveTable build_add(const std::vector<Int>& xs, const Epsilon& eps);
std::uint64_t sample_add(const AdditiveTable& table, BitTape& tape);

// SSMP index container, version 1. Little-endian layout:
//   "SSMP" | version u8 | mode u8 (1 mult, 2 add) | n u64 | w u16 |
//   eps num u64 | eps den u64 | payload length u64 | payload | crc32 u32
// The checksum covers everything before it. Payload arrays are bit-packed
// and each starts on a byte boundary: for mult the zero flags (n x 1),
// leading-one positions (n x ceil(log2 w)) and mantissas
// (n x mantissa_bits); for add the slots (m x ceil(log2 n)).
std::vector<std::uint8_t> serialize(const MultIndex& index);
std::vector<std::uint8_t> serialize(const AdditiveTable& table);

using LoadedIndex = std::variant<MultIndex, AdditiveTable>;
LoadedIndex deserialize_index(const std::vector<std::uint8_t>& bytes);

// Payload length in bits (excluding the fixed header and checksum) of the
// serialized form.
std::uint64_t payload_bits(const MultIndex& index);
std::uint64_t payload_bits(const AdditiveTable& table);

}  // namespace bitsampler
