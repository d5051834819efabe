#include "bitsampler/stream_sampler.hpp"

#include "bitsampler/errors.hpp"

namespace bitsampler {

void StreamCore::double_step(BitTape& tape) {
  last_doublings = 0;
  if (t == 1) {
    s = initial_pool_size(eps);
    h = s;
    h_bot = 0;
    loc = 1;
    rank = 1 + uniform_int(tape, s);
  }
  Int bound = Int(t + 1) * Int(t + 1) * eps.den;
  while (s * eps.num < bound) {
    bool b = tape.next_bit();
    if (b) rank += (loc == 0) ? h_bot : h;
    h <<= 1;
    h_bot <<= 1;
    s <<= 1;
    ++last_doublings;
  }
}

void StreamCore::chop_step() {
  if (t == 1) return;
  Int h_new = s / t;
  Int tail = Int(t - 1) * (h - h_new);  // strings chopped off the old blocks
  bool in_tail = false;
  if (loc != 0 && rank > h_new) {
    // The live string falls in the chopped part of block loc; its position
    // in the concatenated tail is offset by the earlier blocks' tails.
    rank = Int(loc - 1) * (h - h_new) + (rank - h_new);
    in_tail = true;
  }
  Int h_bot_new = h_bot + tail - h_new;
  if (tail > h_new) {
    // Tail overflows the new block; the excess is appended to the discard
    // block (positions computed against the old h_bot).
    if (in_tail) {
      if (rank > h_new) {
        rank = h_bot + (rank - h_new);
        loc = 0;
      } else {
        loc = t;
      }
    }
  } else {
    // Tail is short; the last h_new - tail discard strings top up the new
    // block.
    if (in_tail) {
      loc = t;
    } else if (loc == 0 && rank > h_bot_new) {
      rank = tail + (rank - h_bot_new);
      loc = t;
    }
  }
  h = h_new;
  h_bot = h_bot_new;
}

void StreamCore::check_invariants() const {
  if (t == 0) return;
  if (!is_power_of_two(s)) throw Error("pool size must be a power of two");
  if (t == 1) {
    if (h != s || h_bot != 0) throw Error("bad first-step partition");
  } else {
    if (h != s / t) throw Error("block size must be floor(s/t)");
    if (Int(t) * h + h_bot != s) throw Error("partition does not cover pool");
  }
  if (h_bot * eps.den > Int(eps.num) * s)
    throw Error("discard block exceeds eps * s");
  if (s * eps.num < Int(t + 1) * Int(t + 1) * eps.den)
    throw Error("pool below doubling threshold");
  if (loc != 0) {
    if (loc > t) throw Error("location out of range");
    if (rank < 1 || rank > h) throw Error("rank out of range");
  } else if (h_bot > 0) {
    if (rank < 1 || rank > h_bot) throw Error("discard rank out of range");
  }
}

void WeightedCore::place_live(const Int& block_rank, std::uint64_t weight,
                              const Int& prefix) {
  loc = t;
  unit_index = (block_rank - 1) / unit_alloc + 1;
  unit_rank = block_rank - (unit_index - 1) * unit_alloc;
  loc_weight = weight;
  loc_prefix = prefix;
}

WeightedCore::Step WeightedCore::process(std::uint64_t weight, BitTape& tape) {
  if (weight == 0) return Step::SkippedZeroWeight;
  ++t;
  Int prev_weight_sum = weight_sum;
  weight_sum += weight;
  last_doublings = 0;
  Int bound = (weight_sum + 1) * (weight_sum + 1) * eps.den;

  if (t == 1) {
    // The whole pool is one block; chop it into the first item's units.
    s = initial_pool_size(eps);
    Int rank = 1 + uniform_int(tape, s);
    Int block = s;
    while (s * eps.num < bound) {
      if (tape.next_bit()) rank += block;
      block <<= 1;
      s <<= 1;
      ++last_doublings;
    }
    unit_alloc = s / weight_sum;
    Int owned = weight_sum * unit_alloc;
    if (rank <= owned) {
      place_live(rank, weight, 0);
    } else {
      loc = 0;
      bot_rank = rank - owned;
    }
    h_bot = s - owned;
    return Step::Processed;
  }

  while (s * eps.num < bound) {
    bool b = tape.next_bit();
    if (b) {
      if (loc == 0) bot_rank += h_bot;
      else unit_rank += unit_alloc;
    }
    unit_alloc <<= 1;
    h_bot <<= 1;
    s <<= 1;
    ++last_doublings;
  }

  Int u_new = s / weight_sum;
  Int block_new = Int(weight) * u_new;            // strings for the new item
  Int tail = prev_weight_sum * (unit_alloc - u_new);
  bool in_tail = false;
  Int tail_rank = 0;
  if (loc != 0 && unit_rank > u_new) {
    Int unit_global = loc_prefix + unit_index;
    tail_rank = (unit_global - 1) * (unit_alloc - u_new) + (unit_rank - u_new);
    in_tail = true;
  }
  Int h_bot_old = h_bot;
  Int h_bot_new = h_bot + tail - block_new;
  unit_alloc = u_new;
  if (tail > block_new) {
    if (in_tail) {
      if (tail_rank > block_new) {
        bot_rank = h_bot_old + (tail_rank - block_new);
        loc = 0;
      } else {
        place_live(tail_rank, weight, prev_weight_sum);
      }
    }
  } else {
    if (in_tail) {
      place_live(tail_rank, weight, prev_weight_sum);
    } else if (loc == 0 && bot_rank > h_bot_new) {
      place_live(tail + (bot_rank - h_bot_new), weight, prev_weight_sum);
    }
  }
  h_bot = h_bot_new;
  return Step::Processed;
}

void WeightedCore::check_invariants() const {
  if (t == 0) return;
  if (!is_power_of_two(s)) throw Error("pool size must be a power of two");
  if (unit_alloc != s / weight_sum)
    throw Error("unit allocation must be floor(s/W)");
  if (weight_sum * unit_alloc + h_bot != s)
    throw Error("partition does not cover pool");
  if (h_bot * eps.den > Int(eps.num) * s)
    throw Error("discard block exceeds eps * s");
  if (s * eps.num < (weight_sum + 1) * (weight_sum + 1) * eps.den)
    throw Error("pool below doubling threshold");
  if (loc != 0) {
    if (loc > t) throw Error("location out of range");
    if (unit_index < 1 || unit_index > Int(loc_weight))
      throw Error("unit index out of range");
    if (unit_rank < 1 || unit_rank > unit_alloc)
      throw Error("unit rank out of range");
  } else if (h_bot > 0) {
    if (bot_rank < 1 || bot_rank > h_bot)
      throw Error("discard rank out of range");
  }
}

unsigned offline_bits(std::uint64_t n, const Epsilon& eps) {
  if (n == 0) throw Error("offline sampler needs n >= 1");
  unsigned r = 0;
  Int pool = 1;
  while (pool * eps.num < Int(n) * eps.den) {
    pool <<= 1;
    ++r;
  }
  return r;
}

std::uint64_t offline_uniform(std::uint64_t n, const Epsilon& eps,
                              BitTape& tape) {
  unsigned r = offline_bits(n, eps);
  Int pool = Int(1) << r;
  Int run = pool / n;
  Int x = 0;
  for (unsigned i = 0; i < r; ++i) {
    x <<= 1;
    if (tape.next_bit()) x |= 1;
  }
  if (x >= Int(n) * run) return 0;
  return static_cast<std::uint64_t>(x / run) + 1;
}

}  // namespace bitsampler
