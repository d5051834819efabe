#include "bitsampler/baselines.hpp"

#include <algorithm>
#include <stdexcept>

#include "bitsampler/errors.hpp"

namespace bitsampler {

std::uint64_t basic_reservoir_sample(std::uint64_t n, BitTape& tape) {
  if (n == 0) throw Error("reservoir needs n >= 1");
  std::uint64_t held = 0;
  for (std::uint64_t i = 1; i <= n; ++i)
    if (basic_reservoir_step(i, tape)) held = i;
  return held;
}

DiscreteSamplerMachine::DiscreteSamplerMachine(
    const std::vector<Rational>& dist)
    : uni(Int(1)) {
  if (dist.empty())
    throw std::invalid_argument("distribution must be non-empty");
  Int m = Int(dist.size());
  Rational total = 0;
  Int c = 0;
  cum.reserve(dist.size());
  frac.reserve(dist.size());
  for (const Rational& p : dist) {
    if (p < 0) throw std::invalid_argument("negative probability");
    total += p;
    Rational scaled = p * m;
    Int whole = numerator(scaled) / denominator(scaled);
    Rational part = scaled - whole;
    c += whole + 1;
    cum.push_back(c);
    frac.emplace_back(numerator(part), denominator(part));
  }
  if (total != 1)
    throw std::invalid_argument("distribution must sum to 1");
  asize = c;
  uni = UniformIntMachine(asize);
}

void DiscreteSamplerMachine::restart() { uni = UniformIntMachine(asize); }

void DiscreteSamplerMachine::resolve() {
  for (;;) {
    if (bern) {
      if (!bern->done()) return;
      bool ok = bern->result();
      bern.reset();
      if (ok) {
        finished = true;
        value = picked;
        return;
      }
      restart();
      continue;
    }
    if (!uni.done()) return;
    Int slot = uni.result() + 1;  // 1-based slot of the conceptual array
    auto it = std::lower_bound(cum.begin(), cum.end(), slot);
    std::size_t j = static_cast<std::size_t>(it - cum.begin());
    Int before = j == 0 ? Int(0) : cum[j - 1];
    picked = j;
    if (slot != before + 1) {  // not the first copy: accept outright
      finished = true;
      value = picked;
      return;
    }
    bern.emplace(frac[j].first, frac[j].second);
  }
}

void DiscreteSamplerMachine::feed(bool bit) {
  if (finished) throw Error("sampler already finished");
  if (bern) bern->feed(bit);
  else uni.feed(bit);
  resolve();
}

std::uint64_t bl_discrete_sample(const std::vector<Rational>& dist,
                                 BitTape& tape) {
  DiscreteSamplerMachine m(dist);
  while (!m.done()) m.feed(tape.next_bit());
  return m.result();
}

VitterSkipMachine::VitterSkipMachine(Int i, std::optional<Int> cap_in)
    : base(std::move(i)), cap(std::move(cap_in)), uni(Int(1)) {
  if (base < 1) throw std::invalid_argument("skip needs time index >= 1");
  if (cap && *cap < 0) throw std::invalid_argument("cap must be >= 0");
  if (cap && *cap == 0) {
    finished = true;
    skip = 0;
    return;
  }
  open_window();
}

void VitterSkipMachine::open_window() {
  shape = base + lo;
  tail_copies = shape * (shape + 2) / (2 * shape + 1) + 1;
  asize = shape + 2 + tail_copies;
  uni = UniformIntMachine(asize);
}

void VitterSkipMachine::accept(const Int& offset) {
  if (offset <= shape) {
    Int s = lo + offset;
    skip = (cap && s >= *cap) ? *cap : s;
    finished = true;
    return;
  }
  lo += shape + 1;  // tail bucket: restart on the conditional distribution
  if (cap && lo >= *cap) {
    skip = *cap;
    finished = true;
    return;
  }
  open_window();
}

void VitterSkipMachine::resolve() {
  for (;;) {
    if (finished) return;
    if (bern) {
      if (!bern->done()) return;
      bool ok = bern->result();
      bern.reset();
      if (ok) {
        accept(picked);
        continue;
      }
      uni = UniformIntMachine(asize);
      continue;
    }
    if (!uni.done()) return;
    Int slot = uni.result() + 1;
    if (slot == 2) {  // second copy of value 0
      accept(Int(0));
      continue;
    }
    if (slot == 1) {  // first copy of value 0: fraction is 1/(shape+1)
      picked = 0;
      bern.emplace(Int(1), shape + 1);
      continue;
    }
    if (slot <= shape + 2) {  // single copy of value slot-2
      picked = slot - 2;
      Int den = (shape + picked) * (shape + picked + 1);
      bern.emplace(shape * (shape + 2), den);
      continue;
    }
    if (slot == shape + 3) {  // first copy of the tail bucket
      picked = shape + 1;
      Int den = 2 * shape + 1;
      bern.emplace(shape * (shape + 2) % den, den);
      continue;
    }
    accept(shape + 1);  // later copy of the tail bucket
  }
}

void VitterSkipMachine::feed(bool bit) {
  if (finished) throw Error("sampler already finished");
  if (bern) bern->feed(bit);
  else uni.feed(bit);
  resolve();
}

Int vitter_skip_step(const Int& i, BitTape& tape, std::optional<Int> cap) {
  VitterSkipMachine m(i, std::move(cap));
  while (!m.done()) m.feed(tape.next_bit());
  return m.result();
}

std::uint64_t vitter_reservoir_sample(std::uint64_t n, BitTape& tape) {
  if (n == 0) throw Error("reservoir needs n >= 1");
  Int i = 1;
  while (i < n) {
    Int remaining = Int(n) - i;
    Int s = vitter_skip_step(i, tape, remaining);
    if (s >= remaining) break;
    i += s + 1;
  }
  return static_cast<std::uint64_t>(i);
}

}  // namespace bitsampler
