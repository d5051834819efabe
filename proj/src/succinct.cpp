#include "bitsampler/succinct.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include <zlib.h>

#include "bitsampler/errors.hpp"

namespace bitsampler {

namespace {

constexpr std::uint64_t kMaxAdditiveSlots = std::uint64_t(1) << 24;

// Bit arrays are packed most significant bit of each value first, filling
// bytes from the high bit down.
class BitWriter {
 public:
  void append(std::uint64_t value, unsigned bits) {
    for (unsigned i = bits; i-- > 0;) push_bit((value >> i) & 1u);
  }
  void align() { bit_ = 0; }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void push_bit(bool b) {
    if (bit_ == 0) bytes_.push_back(0);
    if (b) bytes_.back() |= std::uint8_t(1u << (7 - bit_));
    bit_ = (bit_ + 1) % 8;
  }
  std::vector<std::uint8_t> bytes_;
  unsigned bit_ = 0;
};

class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t size)
      : data_(data), size_(size) {}

  std::uint64_t read(unsigned bits) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < bits; ++i) {
      std::size_t byte = pos_ / 8;
      if (byte >= size_) throw TruncatedFile();
      unsigned off = pos_ % 8;
      v = (v << 1) | ((data_[byte] >> (7 - off)) & 1u);
      ++pos_;
    }
    return v;
  }
  void align() { pos_ = (pos_ + 7) / 8 * 8; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
std::uint16_t get_u16(const std::uint8_t* p) {
  return std::uint16_t(p[0]) | std::uint16_t(p[1]) << 8;
}
std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
  return v;
}
std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

std::vector<std::uint8_t> wrap_container(std::uint8_t mode, std::uint64_t n,
                                         std::uint16_t w, const Epsilon& eps,
                                         std::vector<std::uint8_t> payload) {
  std::vector<std::uint8_t> out;
  out.reserve(44 + payload.size());
  for (char c : {'S', 'S', 'M', 'P'}) out.push_back(std::uint8_t(c));
  out.push_back(1);  // version
  out.push_back(mode);
  put_u64(out, n);
  put_u16(out, w);
  put_u64(out, eps.num);
  put_u64(out, eps.den);
  put_u64(out, payload.size());
  for (std::uint8_t b : payload) out.push_back(b);
  std::uint32_t crc =
      static_cast<std::uint32_t>(::crc32(0L, out.data(), static_cast<uInt>(out.size())));
  put_u32(out, crc);
  return out;
}

}  // namespace

unsigned mantissa_bits(const Epsilon& eps) {
  unsigned k = 0;
  if (!eps.is_power_of_half(k))
    throw Error("multiplicative truncation needs eps = 1/2^k, got " +
                eps.str());
  return k + 1;  // ceil(log2(2/eps))
}

TruncatedWeight truncate_weight(const Int& x, const Epsilon& eps, unsigned w) {
  if (w < 1 || w > 64) throw Error("weight width must be 1..64");
  if (x < 0) throw Error("weights must be non-negative");
  TruncatedWeight t;
  if (x == 0) return t;
  if (x >= (Int(1) << w)) throw Error("weight exceeds the declared width");
  unsigned keep = mantissa_bits(eps);
  unsigned top = floor_log2(x);  // bit position of the leading one
  t.zero = false;
  t.f = static_cast<std::uint16_t>(w - top);
  unsigned mbits = std::min<unsigned>(keep, top);
  Int mant = (x >> (top - mbits)) - (Int(1) << mbits);
  t.mantissa = static_cast<std::uint64_t>(mant);
  return t;
}

Int reconstruct_weight(const TruncatedWeight& t, const Epsilon& eps,
                       unsigned w) {
  if (t.zero) return 0;
  unsigned keep = mantissa_bits(eps);
  unsigned top = w - t.f;
  unsigned mbits = std::min<unsigned>(keep, top);
  return ((Int(1) << mbits) | Int(t.mantissa)) << (top - mbits);
}

MultIndex build_mult(const std::vector<Int>& xs, const Epsilon& eps,
                     unsigned w) {
  MultIndex idx;
  idx.n = xs.size();
  idx.w = w;
  idx.eps = eps;
  idx.weights.reserve(xs.size());
  std::vector<Int> reconstructed;
  reconstructed.reserve(xs.size());
  for (const Int& x : xs) {
    TruncatedWeight t = truncate_weight(x, eps, w);
    idx.weights.push_back(t);
    reconstructed.push_back(reconstruct_weight(t, eps, w));
  }
  idx.table = build_alias(reconstructed);
  return idx;
}

std::uint64_t sample_mult(const MultIndex& index, BitTape& tape) {
  return alias_sample(index.table, tape);
}

AdditiveTable build_add(const std::vector<Int>& xs, const Epsilon& eps) {
  std::uint64_t m = eps.inverse_integer();
  if (m == 0) throw NonIntegerInverseEps(eps.str());
  if (m > kMaxAdditiveSlots) throw Error("additive table too large");
  AdditiveTable t;
  t.n = xs.size();
  t.m = m;
  t.eps = eps;
  Int S = 0;
  for (const Int& x : xs) {
    if (x < 0) throw Error("weights must be non-negative");
    S += x;
  }
  if (S == 0) throw AllZeroWeights();

  t.counts.resize(t.n);
  std::vector<Int> rem(t.n);
  std::uint64_t assigned = 0;
  for (std::uint64_t i = 0; i < t.n; ++i) {
    Int scaled = Int(m) * xs[i];
    t.counts[i] = static_cast<std::uint64_t>(scaled / S);
    rem[i] = scaled % S;
    assigned += t.counts[i];
  }
  std::uint64_t deficit = m - assigned;
  if (deficit > 0) {
    std::vector<std::uint64_t> order(t.n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint64_t a, std::uint64_t b) {
                       return rem[a] > rem[b];
                     });
    for (std::uint64_t k = 0; k < deficit; ++k) ++t.counts[order[k]];
  }
  t.slots.reserve(m);
  for (std::uint64_t i = 0; i < t.n; ++i)
    t.slots.insert(t.slots.end(), t.counts[i], i);
  return t;
}

std::uint64_t sample_add(const AdditiveTable& table, BitTape& tape) {
  return table.slots[uniform_int(tape, table.m)];
}

std::vector<std::uint8_t> serialize(const MultIndex& index) {
  unsigned fbits = ceil_log2(Int(index.w));
  unsigned keep = mantissa_bits(index.eps);
  BitWriter bw;
  for (const auto& t : index.weights) bw.append(t.zero ? 1 : 0, 1);
  bw.align();
  for (const auto& t : index.weights)
    bw.append(t.zero ? 0 : std::uint64_t(t.f) - 1, fbits);
  bw.align();
  for (const auto& t : index.weights) bw.append(t.mantissa, keep);
  bw.align();
  return wrap_container(1, index.n, static_cast<std::uint16_t>(index.w),
                        index.eps, bw.take());
}

std::vector<std::uint8_t> serialize(const AdditiveTable& table) {
  unsigned sbits = ceil_log2(Int(table.n));
  BitWriter bw;
  for (std::uint64_t s : table.slots) bw.append(s, sbits);
  bw.align();
  return wrap_container(2, table.n, 0, table.eps, bw.take());
}

std::uint64_t payload_bits(const MultIndex& index) {
  unsigned fbits = ceil_log2(Int(index.w));
  unsigned keep = mantissa_bits(index.eps);
  auto bytes_for = [](std::uint64_t bits) { return (bits + 7) / 8; };
  return 8 * (bytes_for(index.n) + bytes_for(index.n * fbits) +
              bytes_for(index.n * keep));
}

std::uint64_t payload_bits(const AdditiveTable& table) {
  unsigned sbits = ceil_log2(Int(table.n));
  return 8 * ((table.m * sbits + 7) / 8);
}

LoadedIndex deserialize_index(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "SSMP", 4) != 0)
    throw BadMagic();
  if (bytes.size() < 44) throw TruncatedFile();
  if (bytes[4] != 1) throw BadVersion();
  std::uint8_t mode = bytes[5];
  std::uint64_t n = get_u64(bytes.data() + 6);
  std::uint16_t w = get_u16(bytes.data() + 14);
  std::uint64_t eps_num = get_u64(bytes.data() + 16);
  std::uint64_t eps_den = get_u64(bytes.data() + 24);
  std::uint64_t plen = get_u64(bytes.data() + 32);
  if (bytes.size() < 44 + plen) throw TruncatedFile();
  std::uint32_t stored_crc = get_u32(bytes.data() + 40 + plen);
  std::uint32_t crc = static_cast<std::uint32_t>(
      ::crc32(0L, bytes.data(), static_cast<uInt>(40 + plen)));
  if (crc != stored_crc) throw ChecksumMismatch();

  Epsilon eps;
  try {
    eps = Epsilon(eps_num, eps_den);
  } catch (const std::invalid_argument&) {
    throw FormatError("bad error parameter in index header");
  }
  BitReader br(bytes.data() + 40, plen);

  if (mode == 1) {
    unsigned fbits = ceil_log2(Int(w));
    unsigned keep = mantissa_bits(eps);
    std::vector<TruncatedWeight> ts(n);
    for (auto& t : ts) t.zero = br.read(1) != 0;
    br.align();
    for (auto& t : ts) {
      std::uint64_t f = br.read(fbits);
      if (!t.zero) t.f = static_cast<std::uint16_t>(f + 1);
    }
    br.align();
    for (auto& t : ts) {
      std::uint64_t mant = br.read(keep);
      if (!t.zero) t.mantissa = mant;
    }
    std::vector<Int> reconstructed;
    reconstructed.reserve(n);
    for (const auto& t : ts) reconstructed.push_back(reconstruct_weight(t, eps, w));
    MultIndex idx;
    idx.n = n;
    idx.w = w;
    idx.eps = eps;
    idx.weights = std::move(ts);
    idx.table = build_alias(reconstructed);
    return idx;
  }
  if (mode == 2) {
    unsigned sbits = ceil_log2(Int(n));
    std::uint64_t m = eps.inverse_integer();
    if (m == 0) throw FormatError("bad error parameter in index header");
    if (m > kMaxAdditiveSlots) throw FormatError("additive table too large");
    AdditiveTable t;
    t.n = n;
    t.m = m;
    t.eps = eps;
    t.counts.assign(n, 0);
    t.slots.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
      std::uint64_t s = br.read(sbits);
      if (s >= n) throw FormatError("slot references item out of range");
      t.slots.push_back(s);
      ++t.counts[s];
    }
    return t;
  }
  throw FormatError("unknown index mode");
}

}  // namespace bitsampler
