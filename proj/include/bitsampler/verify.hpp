#pragma once

#include <cstdint>
#include <map>
#include <type_traits>
#include <utility>
#include <vector>

#include "bitsampler/numeric.hpp"
#include "bitsampler/succinct.hpp"

namespace bitsampler {

// Exact outcome distribution of a sampler: items[i] is the probability of
// item i+1 (items are 1-based everywhere else), bot the probability of the
// discard outcome. Probabilities are exact rationals and sum to 1.
struct ExactDistribution {
  std::vector<Rational> items;
  Rational bot = 0;

  Rational total() const;
};

// Runs the streaming sampler on every tape of its (deterministic) bit
// budget and tallies the outcomes. Throws BudgetExceeded when the run
// needs more than `budget` bits.
ExactDistribution enumerate_stream_distribution(std::uint64_t n,
                                                const Epsilon& eps,
                                                unsigned budget = 24);

// Same for the weighted sampler over the given weights.
ExactDistribution enumerate_weighted_distribution(
    const std::vector<std::uint64_t>& weights, const Epsilon& eps,
    unsigned budget = 24);

// Same for the one-shot known-n sampler.
ExactDistribution enumerate_offline_distribution(std::uint64_t n,
                                                 const Epsilon& eps,
                                                 unsigned budget = 24);

// Outcome mass computed analytically from the structure (alias owned mass,
// additive slot counts); no randomness involved.
ExactDistribution exact_index_distribution(const MultIndex& index);
ExactDistribution exact_index_distribution(const AdditiveTable& table);

// Largest |p'_i/p_i - 1| over items with positive original weight, where
// p' comes from the index and p from the original weights. Throws
// MismatchedSupport if a zero-weight item carries index mass or the sizes
// differ.
Rational max_mult_deviation(const MultIndex& index,
                            const std::vector<Int>& original);

// Largest |c_i/m - p_i| over all items.
Rational max_add_deviation(const AdditiveTable& table,
                           const std::vector<Int>& original);

struct ChiSquareResult {
  double statistic = 0;
  double critical = 0;
  std::uint64_t trials = 0;
  unsigned df = 0;
  bool pass = false;
};

// Pearson goodness-of-fit of observed counts against an exact expected
// distribution. `observed` must hold expected.items.size() + 1 entries, the
// last being the count of discard outcomes. Cells with zero expected
// probability are excluded from the statistic and the degrees of freedom;
// an observation landing in such a cell fails outright. Throws
// TooFewTrials when trials < 5 / min positive probability.
ChiSquareResult chi_square(const std::vector<std::uint64_t>& observed,
                           const ExactDistribution& expected,
                           double alpha = 0.001);

// (1/2) sum |a_i - b_i|, the discard outcome included. Throws
// MismatchedSupport when the item counts differ.
Rational tv_distance(const ExactDistribution& a, const ExactDistribution& b);

// Exhaustive run of a resumable bit-fed machine over all tapes up to
// max_depth bits. Machines that reach the same state are merged and their
// probability masses added, so rejection loops cost states-times-depth
// rather than exponential in depth. Mass still unfinished at the depth
// limit is reported as `undecided`.
template <typename Machine>
struct MachineEnumeration {
  using Outcome =
      std::decay_t<decltype(std::declval<const Machine&>().result())>;
  std::map<Outcome, Rational> outcomes;
  Rational undecided = 0;

  Rational mass_of(const Outcome& o) const {
    auto it = outcomes.find(o);
    return it == outcomes.end() ? Rational(0) : it->second;
  }
};

template <typename Machine>
MachineEnumeration<Machine> enumerate_machine(const Machine& start,
                                              unsigned max_depth) {
  using Key = std::decay_t<decltype(std::declval<const Machine&>().key())>;
  MachineEnumeration<Machine> out;
  if (start.done()) {
    out.outcomes[start.result()] = 1;
    return out;
  }
  std::map<Key, std::pair<Machine, Rational>> level;
  level.emplace(start.key(), std::make_pair(start, Rational(1)));
  for (unsigned depth = 0; depth < max_depth && !level.empty(); ++depth) {
    std::map<Key, std::pair<Machine, Rational>> next;
    for (auto& [key, state] : level) {
      for (int b = 0; b < 2; ++b) {
        Machine m = state.first;
        m.feed(b != 0);
        Rational mass = state.second / 2;
        if (m.done()) {
          out.outcomes[m.result()] += mass;
        } else {
          Key k = m.key();
          auto it = next.find(k);
          if (it == next.end())
            next.emplace(std::move(k), std::make_pair(std::move(m), mass));
          else
            it->second.second += mass;
        }
      }
    }
    level = std::move(next);
  }
  for (auto& [key, state] : level) out.undecided += state.second;
  return out;
}

}  // namespace bitsampler
