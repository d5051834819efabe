#include "bitsampler/bit_tape.hpp"

#include <cstring>

#include <sodium.h>

namespace bitsampler {

BitTape BitTape::seeded(std::uint64_t seed) {
  BitTape t;
  detail::SeededTape s;
  s.gen.seed(seed);
  t.src_ = std::move(s);
  return t;
}

BitTape BitTape::keyed(std::uint64_t seed) {
  static int rc = sodium_init();  // idempotent; -1 only on catastrophic failure
  (void)rc;
  BitTape t;
  detail::KeyedTape k;
  k.seed = seed;
  t.src_ = k;
  return t;
}

BitTape BitTape::from_bits(std::string_view bits) {
  BitTape t;
  detail::FixedTape f;
  f.bits.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("fixed tape must contain only 0 and 1");
    f.bits.push_back(c == '1');
  }
  t.src_ = std::move(f);
  return t;
}

BitTape BitTape::from_value(std::uint64_t value, unsigned nbits) {
  BitTape t;
  detail::FixedTape f;
  f.bits.reserve(nbits);
  for (unsigned i = nbits; i-- > 0;)
    f.bits.push_back((value >> i) & 1u);
  t.src_ = std::move(f);
  return t;
}

bool BitTape::next_bit() {
  bool out;
  if (auto* s = std::get_if<detail::SeededTape>(&src_)) {
    if (s->left == 0) {
      s->word = s->gen();
      s->left = 64;
    }
    out = (s->word >> (s->left - 1)) & 1u;
    --s->left;
  } else if (auto* k = std::get_if<detail::KeyedTape>(&src_)) {
    if (k->byte_pos == 64) {
      unsigned char zeros[64];
      unsigned char nonce[crypto_stream_chacha20_NONCEBYTES] = {0};
      unsigned char key[crypto_stream_chacha20_KEYBYTES] = {0};
      std::memset(zeros, 0, sizeof zeros);
      for (unsigned i = 0; i < 8; ++i)
        key[i] = static_cast<unsigned char>(k->seed >> (8 * i));
      crypto_stream_chacha20_xor_ic(k->block, zeros, sizeof zeros, nonce,
                                    k->block_index++, key);
      k->byte_pos = 0;
      k->bit_pos = 0;
    }
    out = (k->block[k->byte_pos] >> (7 - k->bit_pos)) & 1u;
    if (++k->bit_pos == 8) {
      k->bit_pos = 0;
      ++k->byte_pos;
    }
  } else {
    auto& f = std::get<detail::FixedTape>(src_);
    if (f.pos >= f.bits.size()) throw TapeExhausted();
    out = f.bits[f.pos++];
  }
  ++consumed_;
  return out;
}

Int uniform_int(BitTape& tape, const Int& m) {
  UniformIntMachine mach(m);
  while (!mach.done()) mach.feed(tape.next_bit());
  return mach.result();
}

std::uint64_t uniform_int(BitTape& tape, std::uint64_t m) {
  return static_cast<std::uint64_t>(uniform_int(tape, Int(m)));
}

bool bernoulli(BitTape& tape, const Int& num, const Int& den) {
  BernoulliMachine mach(num, den);
  while (!mach.done()) mach.feed(tape.next_bit());
  return mach.result();
}

}  // namespace bitsampler
