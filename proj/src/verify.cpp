#include "bitsampler/verify.hpp"

#include <limits>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "bitsampler/errors.hpp"
#include "bitsampler/stream_sampler.hpp"

namespace bitsampler {

Rational ExactDistribution::total() const {
  Rational t = bot;
  for (const Rational& p : items) t += p;
  return t;
}

namespace {

// Runs `run` on every tape of the given width and tallies the returned
// 1-based outcome (0 = discard). Every run must consume the whole tape;
// the samplers enumerated here draw a tape-independent number of bits.
template <typename RunFn>
ExactDistribution enumerate_tapes(std::uint64_t n_items, unsigned bits,
                                  RunFn run) {
  std::vector<std::uint64_t> counts(n_items + 1, 0);
  const std::uint64_t tapes = std::uint64_t(1) << bits;
  for (std::uint64_t x = 0; x < tapes; ++x) {
    BitTape tape = BitTape::from_value(x, bits);
    std::uint64_t loc = run(tape);
    if (tape.bits_consumed() != bits)
      throw Error("enumerated run consumed " +
                  std::to_string(tape.bits_consumed()) + " of " +
                  std::to_string(bits) + " tape bits");
    ++counts[loc];
  }
  ExactDistribution d;
  Int denom = Int(1) << bits;
  d.items.reserve(n_items);
  for (std::uint64_t i = 1; i <= n_items; ++i)
    d.items.emplace_back(Int(counts[i]), denom);
  d.bot = Rational(Int(counts[0]), denom);
  return d;
}

unsigned checked_bits(std::uint64_t consumed, unsigned budget,
                      const char* what) {
  if (consumed > budget || consumed > 63)
    throw BudgetExceeded(std::string(what) + " enumeration needs " +
                         std::to_string(consumed) + " bits, budget " +
                         std::to_string(budget));
  return static_cast<unsigned>(consumed);
}

}  // namespace

ExactDistribution enumerate_stream_distribution(std::uint64_t n,
                                                const Epsilon& eps,
                                                unsigned budget) {
  if (n == 0) {
    ExactDistribution d;
    d.bot = 1;
    return d;
  }
  BitTape probe = BitTape::seeded(0);
  {
    StreamCore core(eps);
    for (std::uint64_t t = 0; t < n; ++t) core.process(probe);
  }
  unsigned bits = checked_bits(probe.bits_consumed(), budget, "stream");
  return enumerate_tapes(n, bits, [&](BitTape& tape) {
    StreamCore core(eps);
    std::uint64_t loc = 0;
    for (std::uint64_t t = 0; t < n; ++t) loc = core.process(tape);
    return loc;
  });
}

ExactDistribution enumerate_weighted_distribution(
    const std::vector<std::uint64_t>& weights, const Epsilon& eps,
    unsigned budget) {
  BitTape probe = BitTape::seeded(0);
  std::vector<std::size_t> position_of;  // t-index -> original position
  {
    WeightedCore core(eps);
    for (std::size_t j = 0; j < weights.size(); ++j) {
      if (core.process(weights[j], probe) == WeightedCore::Step::Processed)
        position_of.push_back(j);
    }
  }
  unsigned bits = checked_bits(probe.bits_consumed(), budget, "weighted");
  ExactDistribution compact =
      enumerate_tapes(position_of.size(), bits, [&](BitTape& tape) {
        WeightedCore core(eps);
        for (std::uint64_t w : weights) core.process(w, tape);
        return core.loc;
      });
  ExactDistribution d;
  d.items.assign(weights.size(), Rational(0));
  d.bot = compact.bot;
  for (std::size_t k = 0; k < position_of.size(); ++k)
    d.items[position_of[k]] = compact.items[k];
  return d;
}

ExactDistribution enumerate_offline_distribution(std::uint64_t n,
                                                 const Epsilon& eps,
                                                 unsigned budget) {
  unsigned bits = checked_bits(offline_bits(n, eps), budget, "offline");
  return enumerate_tapes(
      n, bits, [&](BitTape& tape) { return offline_uniform(n, eps, tape); });
}

ExactDistribution exact_index_distribution(const MultIndex& index) {
  std::vector<Int> owned = index.table.owned_mass();
  Int space = Int(index.table.n) * index.table.total;
  ExactDistribution d;
  d.items.reserve(owned.size());
  for (const Int& o : owned) d.items.emplace_back(o, space);
  return d;
}

ExactDistribution exact_index_distribution(const AdditiveTable& table) {
  ExactDistribution d;
  d.items.reserve(table.counts.size());
  for (std::uint64_t c : table.counts)
    d.items.emplace_back(Int(c), Int(table.m));
  return d;
}

Rational max_mult_deviation(const MultIndex& index,
                            const std::vector<Int>& original) {
  if (original.size() != index.n) throw MismatchedSupport();
  ExactDistribution d = exact_index_distribution(index);
  Int S = 0;
  for (const Int& x : original) S += x;
  if (S == 0) throw AllZeroWeights();
  Rational worst = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (original[i] == 0) {
      if (d.items[i] != 0) throw MismatchedSupport();
      continue;
    }
    Rational ratio = d.items[i] / Rational(original[i], S);
    Rational dev = boost::multiprecision::abs(Rational(ratio - 1));
    if (dev > worst) worst = dev;
  }
  return worst;
}

Rational max_add_deviation(const AdditiveTable& table,
                           const std::vector<Int>& original) {
  if (original.size() != table.n) throw MismatchedSupport();
  Int S = 0;
  for (const Int& x : original) S += x;
  if (S == 0) throw AllZeroWeights();
  Rational worst = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    Rational dev = boost::multiprecision::abs(
        Rational(Rational(Int(table.counts[i]), Int(table.m)) -
                 Rational(original[i], S)));
    if (dev > worst) worst = dev;
  }
  return worst;
}

ChiSquareResult chi_square(const std::vector<std::uint64_t>& observed,
                           const ExactDistribution& expected, double alpha) {
  if (observed.size() != expected.items.size() + 1) throw MismatchedSupport();
  std::vector<Rational> probs = expected.items;
  probs.push_back(expected.bot);

  ChiSquareResult r;
  for (std::uint64_t c : observed) r.trials += c;

  Rational min_prob = 2;
  unsigned cells = 0;
  bool support_violated = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0) {
      if (observed[i] > 0) support_violated = true;
      continue;
    }
    ++cells;
    if (probs[i] < min_prob) min_prob = probs[i];
  }
  if (cells == 0) throw Error("expected distribution has no mass");
  if (Rational(r.trials) * min_prob < 5)
    throw TooFewTrials("need at least 5/min-probability trials, got " +
                       std::to_string(r.trials));

  r.df = cells - 1;
  if (r.df > 0) {
    boost::math::chi_squared dist(r.df);
    r.critical = boost::math::quantile(dist, 1 - alpha);
  }
  if (support_violated) {
    r.statistic = std::numeric_limits<double>::infinity();
    r.pass = false;
    return r;
  }
  double stat = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0) continue;
    double e = Rational(Rational(r.trials) * probs[i]).convert_to<double>();
    double o = static_cast<double>(observed[i]);
    stat += (o - e) * (o - e) / e;
  }
  r.statistic = stat;
  r.pass = stat <= r.critical || r.df == 0;
  return r;
}

Rational tv_distance(const ExactDistribution& a, const ExactDistribution& b) {
  if (a.items.size() != b.items.size()) throw MismatchedSupport();
  Rational sum = boost::multiprecision::abs(Rational(a.bot - b.bot));
  for (std::size_t i = 0; i < a.items.size(); ++i)
    sum += boost::multiprecision::abs(Rational(a.items[i] - b.items[i]));
  return sum / 2;
}

}  // namespace bitsampler
