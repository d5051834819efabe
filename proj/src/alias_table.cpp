#include "bitsampler/alias_table.hpp"

#include <deque>

#include "bitsampler/errors.hpp"

namespace bitsampler {

AliasTable build_alias(const std::vector<Int>& weights) {
  AliasTable t;
  t.n = weights.size();
  for (const Int& w : weights) {
    if (w < 0) throw Error("weights must be non-negative");
    t.total += w;
  }
  if (t.total == 0) throw AllZeroWeights();

  const Int& S = t.total;
  std::vector<Int> mass(t.n);
  std::deque<std::uint64_t> small, large;
  for (std::uint64_t i = 0; i < t.n; ++i) {
    mass[i] = Int(t.n) * weights[i];
    if (mass[i] < S) small.push_back(i);
    else large.push_back(i);
    ++t.build_ops;
  }

  t.buckets.resize(t.n);
  while (!small.empty() && !large.empty()) {
    std::uint64_t s = small.front();
    small.pop_front();
    ++t.build_ops;
    std::uint64_t l = large.front();
    t.buckets[s] = {s, l, mass[s]};
    mass[l] -= S - mass[s];
    if (mass[l] < S) {
      large.pop_front();
      small.push_back(l);
      t.build_ops += 2;
    }
  }
  // With exact arithmetic every leftover bucket carries mass exactly S.
  for (std::uint64_t l : large) {
    t.buckets[l] = {l, std::nullopt, S};
    ++t.build_ops;
  }
  while (!small.empty()) {
    std::uint64_t s = small.front();
    small.pop_front();
    ++t.build_ops;
    t.buckets[s] = {s, std::nullopt, S};
  }
  return t;
}

std::vector<Int> AliasTable::owned_mass() const {
  std::vector<Int> owned(n, Int(0));
  for (const Bucket& b : buckets) {
    owned[b.primary] += b.cut;
    if (b.alias) owned[*b.alias] += total - b.cut;
  }
  return owned;
}

std::uint64_t alias_sample(const AliasTable& table, BitTape& tape) {
  Int u = uniform_int(tape, Int(table.n) * table.total);
  std::uint64_t bucket = static_cast<std::uint64_t>(u / table.total);
  Int offset = u % table.total;
  const AliasTable::Bucket& b = table.buckets[bucket];
  if (offset < b.cut) return b.primary;
  return *b.alias;
}

}  // namespace bitsampler
