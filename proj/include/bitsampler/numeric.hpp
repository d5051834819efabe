#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace bitsampler {

// All probability bookkeeping is exact. Int is unbounded; Rational is a
// normalized fraction of two Ints.
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Number of bits needed to index m values, i.e. ceil(log2(m)) for m >= 1.
inline unsigned ceil_log2(const Int& m) {
  if (m <= 1) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(Int(m - 1))) + 1;
}

inline bool is_power_of_two(const Int& m) {
  return m > 0 && (m & (m - 1)) == 0;
}

// floor(log2(m)) for m >= 1.
inline unsigned floor_log2(const Int& m) {
  return static_cast<unsigned>(boost::multiprecision::msb(m));
}

// Exact error parameter num/den, 0 < num/den < 1, kept in lowest terms.
struct Epsilon {
  std::uint64_t num = 1;
  std::uint64_t den = 2;

  Epsilon() = default;
  Epsilon(std::uint64_t n, std::uint64_t d) : num(n), den(d) { normalize(); }

  // Accepts only the "num/den" form, e.g. "1/4".
  static Epsilon parse(std::string_view text);

  void normalize();

  // True when the value is 2^-k for some k >= 1; k is returned through out.
  bool is_power_of_half(unsigned& out_k) const {
    if (num != 1) return false;
    Int d = den;
    if (!is_power_of_two(d)) return false;
    out_k = floor_log2(d);
    return out_k >= 1;
  }

  // Exact 1/eps when it is an integer; 0 otherwise.
  std::uint64_t inverse_integer() const {
    return den % num == 0 ? den / num : 0;
  }

  Rational value() const { return Rational(Int(num), Int(den)); }
  std::string str() const {
    return std::to_string(num) + "/" + std::to_string(den);
  }
};

inline void Epsilon::normalize() {
  if (num == 0 || den == 0 || num >= den)
    throw std::invalid_argument("error parameter must satisfy 0 < num/den < 1");
  std::uint64_t a = num, b = den;
  while (b) { std::uint64_t t = a % b; a = b; b = t; }
  num /= a;
  den /= a;
}

inline Epsilon Epsilon::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 == text.size())
    throw std::invalid_argument("error parameter must be written as num/den");
  auto to_u64 = [](std::string_view s) {
    std::uint64_t v = 0;
    if (s.empty()) throw std::invalid_argument("bad integer in error parameter");
    for (char c : s) {
      if (c < '0' || c > '9')
        throw std::invalid_argument("bad integer in error parameter");
      v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
  };
  return Epsilon(to_u64(text.substr(0, slash)), to_u64(text.substr(slash + 1)));
}

// Smallest power of two s with s >= 4/eps.
inline Int initial_pool_size(const Epsilon& eps) {
  Int s = 1;
  while (s * eps.num < Int(4) * eps.den) s <<= 1;
  return s;
}

}  // namespace bitsampler
