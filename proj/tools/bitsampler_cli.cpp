#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bitsampler/baselines.hpp"
#include "bitsampler/errors.hpp"
#include "bitsampler/stream_sampler.hpp"
#include "bitsampler/succinct.hpp"
#include "bitsampler/verify.hpp"

namespace bs = bitsampler;
using nlohmann::json;

namespace {

std::uint64_t parse_u64(const std::string& text, const char* what) {
  if (text.empty()) throw bs::Error(std::string(what) + " is empty");
  std::uint64_t v = 0;
  for (char c : text) {
    if (c < '0' || c > '9')
      throw bs::Error(std::string(what) + " must be a decimal integer, got \"" +
                      text + "\"");
    std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (v > (UINT64_MAX - d) / 10)
      throw bs::Error(std::string(what) + " overflows 64 bits");
    v = v * 10 + d;
  }
  return v;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed) {
  if (cli_seed) return *cli_seed;
  if (const char* env = std::getenv("SAMPLER_SEED"))
    return parse_u64(env, "SAMPLER_SEED");
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

bs::BitTape make_tape(std::uint64_t seed, bool keyed) {
  return keyed ? bs::BitTape::keyed(seed) : bs::BitTape::seeded(seed);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<bs::Int> read_weights_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bs::Error("cannot open weights file " + path);
  std::vector<bs::Int> xs;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t a = line.find_first_not_of(" \t");
    if (a == std::string::npos) {
      if (in.peek() == EOF) break;  // trailing blank line
      throw bs::Error("line " + std::to_string(lineno) +
                      ": empty weight line");
    }
    std::size_t b = line.find_last_not_of(" \t");
    std::string tok = line.substr(a, b - a + 1);
    for (char c : tok)
      if (c < '0' || c > '9')
        throw bs::Error("line " + std::to_string(lineno) +
                        ": weight must be a decimal integer, got \"" + tok +
                        "\"");
    xs.push_back(bs::Int(tok));
  }
  if (xs.empty()) throw bs::Error("weights file " + path + " is empty");
  return xs;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw bs::Error("cannot open index file " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

// The fraction num/den as text over the original denominator, with integer
// values printed plainly.
std::string unreduced(const bs::Rational& p, const bs::Int& den) {
  bs::Int num = boost::multiprecision::numerator(p) *
                (den / boost::multiprecision::denominator(p));
  if (num == 0) return "0";
  if (num == den) return "1";
  return num.str() + "/" + den.str();
}

std::string rational_str(const bs::Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

struct Checkpoint {
  std::uint64_t items = 0;
  std::optional<std::string> sample;
};

struct StreamReport {
  std::optional<std::string> sample;
  std::uint64_t items = 0;
  std::uint64_t bits = 0;
  std::optional<std::uint64_t> skipped;  // weighted runs only
  std::vector<Checkpoint> checkpoints;
  std::optional<std::uint64_t> max_buffered;  // --stats only
};

void emit_report(const StreamReport& r, const std::string& format) {
  auto text_of = [](const std::optional<std::string>& s) {
    return s ? *s : std::string("BOT");
  };
  if (format == "json") {
    json out;
    out["sample"] = r.sample ? json(*r.sample) : json(nullptr);
    out["items"] = r.items;
    out["bits"] = r.bits;
    if (r.skipped) out["skipped"] = *r.skipped;
    if (!r.checkpoints.empty()) {
      json cps = json::array();
      for (const auto& c : r.checkpoints)
        cps.push_back({{"items", c.items},
                       {"sample", c.sample ? json(*c.sample) : json(nullptr)}});
      out["checkpoints"] = cps;
    }
    if (r.max_buffered) out["max_buffered_payloads"] = *r.max_buffered;
    std::cout << out.dump() << "\n";
    return;
  }
  if (format == "csv") {
    std::string header = "kind,items,sample,bits";
    if (r.skipped) header += ",skipped";
    if (r.max_buffered) header += ",max_buffered_payloads";
    std::cout << header << "\n";
    for (const auto& c : r.checkpoints) {
      std::cout << "checkpoint," << c.items << "," << csv_field(text_of(c.sample))
                << ",";
      if (r.skipped) std::cout << ",";
      if (r.max_buffered) std::cout << ",";
      std::cout << "\n";
    }
    std::cout << "final," << r.items << "," << csv_field(text_of(r.sample))
              << "," << r.bits;
    if (r.skipped) std::cout << "," << *r.skipped;
    if (r.max_buffered) std::cout << "," << *r.max_buffered;
    std::cout << "\n";
    return;
  }
  for (const auto& c : r.checkpoints)
    std::cout << "checkpoint items=" << c.items << " sample="
              << text_of(c.sample) << "\n";
  std::cout << "sample=" << text_of(r.sample) << "\n";
  std::cout << "items=" << r.items << "\n";
  std::cout << "bits=" << r.bits << "\n";
  if (r.skipped) std::cout << "skipped=" << *r.skipped << "\n";
  if (r.max_buffered)
    std::cout << "max_buffered_payloads=" << *r.max_buffered << "\n";
}

std::istream& open_input(const std::string& path, std::ifstream& file) {
  if (path.empty() || path == "-") return std::cin;
  file.open(path);
  if (!file) throw bs::Error("cannot open input file " + path);
  return file;
}

int cmd_stream(const std::string& input, const std::string& eps_text,
               std::optional<std::uint64_t> seed_opt, bool keyed,
               std::uint64_t checkpoint, const std::string& format,
               bool stats) {
  bs::Epsilon eps = bs::Epsilon::parse(eps_text);
  bs::BitTape tape = make_tape(resolve_seed(seed_opt), keyed);
  bs::StreamSampler<std::string> sampler(eps);
  std::ifstream file;
  std::istream& in = open_input(input, file);

  StreamReport report;
  std::string line;
  while (std::getline(in, line)) {
    sampler.process(std::move(line), tape);
    if (checkpoint > 0 && sampler.items_seen() % checkpoint == 0) {
      Checkpoint c;
      c.items = sampler.items_seen();
      if (const std::string* s = sampler.current_sample()) c.sample = *s;
      report.checkpoints.push_back(std::move(c));
    }
  }
  if (const std::string* s = sampler.current_sample()) report.sample = *s;
  report.items = sampler.items_seen();
  report.bits = tape.bits_consumed();
  if (stats) report.max_buffered = sampler.max_buffered();
  emit_report(report, format);
  return 0;
}

int cmd_weighted(const std::string& input, const std::string& eps_text,
                 std::optional<std::uint64_t> seed_opt, bool keyed,
                 const std::string& format, bool stats) {
  bs::Epsilon eps = bs::Epsilon::parse(eps_text);
  bs::BitTape tape = make_tape(resolve_seed(seed_opt), keyed);
  bs::WeightedStreamSampler<std::string> sampler(eps);
  std::ifstream file;
  std::istream& in = open_input(input, file);

  StreamReport report;
  std::uint64_t lineno = 0;
  std::uint64_t skipped = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw bs::Error("line " + std::to_string(lineno) +
                      ": expected weight<TAB>payload");
    std::uint64_t weight;
    try {
      weight = parse_u64(line.substr(0, tab), "weight");
    } catch (const bs::Error& e) {
      throw bs::Error("line " + std::to_string(lineno) + ": " + e.what());
    }
    auto step = sampler.process(line.substr(tab + 1), weight, tape);
    if (step == bs::WeightedCore::Step::SkippedZeroWeight) ++skipped;
  }
  if (const std::string* s = sampler.current_sample()) report.sample = *s;
  report.items = lineno;
  report.bits = tape.bits_consumed();
  report.skipped = skipped;
  if (stats) report.max_buffered = sampler.max_buffered();
  emit_report(report, format);
  return 0;
}

int cmd_succinct_build(const std::string& weights_path,
                       const std::string& mode, const std::string& eps_text,
                       std::optional<unsigned> width,
                       const std::string& out_path) {
  bs::Epsilon eps = bs::Epsilon::parse(eps_text);
  std::vector<bs::Int> xs = read_weights_file(weights_path);
  std::vector<std::uint8_t> bytes;
  if (mode == "mult") {
    unsigned w = 1;
    if (width) {
      w = *width;
    } else {
      for (const bs::Int& x : xs)
        if (x > 0) w = std::max(w, bs::floor_log2(x) + 1);
    }
    bytes = bs::serialize(bs::build_mult(xs, eps, w));
  } else {
    bytes = bs::serialize(bs::build_add(xs, eps));
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw bs::Error("cannot open output file " + out_path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw bs::Error("failed writing " + out_path);
  return 0;
}

int cmd_succinct_query(const std::string& index_path, std::uint64_t trials,
                       std::optional<std::uint64_t> seed_opt, bool keyed,
                       bool histogram) {
  bs::LoadedIndex idx = bs::deserialize_index(read_binary_file(index_path));
  bs::BitTape tape = make_tape(resolve_seed(seed_opt), keyed);
  std::uint64_t n = std::holds_alternative<bs::MultIndex>(idx)
                        ? std::get<bs::MultIndex>(idx).n
                        : std::get<bs::AdditiveTable>(idx).n;
  std::vector<std::uint64_t> counts(histogram ? n : 0, 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::uint64_t item =
        std::holds_alternative<bs::MultIndex>(idx)
            ? bs::sample_mult(std::get<bs::MultIndex>(idx), tape)
            : bs::sample_add(std::get<bs::AdditiveTable>(idx), tape);
    if (histogram)
      ++counts[item];
    else
      std::cout << item + 1 << "\n";
  }
  if (histogram) {
    std::cout << "item,count\n";
    for (std::uint64_t i = 0; i < n; ++i)
      std::cout << i + 1 << "," << counts[i] << "\n";
  }
  return 0;
}

int cmd_succinct_inspect(const std::string& index_path,
                         const std::string& weights_path) {
  bs::LoadedIndex idx = bs::deserialize_index(read_binary_file(index_path));
  if (const auto* mi = std::get_if<bs::MultIndex>(&idx)) {
    std::cout << "mode=mult\n";
    std::cout << "n=" << mi->n << "\n";
    std::cout << "w=" << mi->w << "\n";
    std::cout << "eps=" << mi->eps.str() << "\n";
    std::cout << "payload_bits=" << bs::payload_bits(*mi) << "\n";
    if (!weights_path.empty()) {
      auto dev = bs::max_mult_deviation(*mi, read_weights_file(weights_path));
      std::cout << "max_multiplicative_deviation=" << rational_str(dev)
                << "\n";
    }
  } else {
    const auto& at = std::get<bs::AdditiveTable>(idx);
    std::cout << "mode=add\n";
    std::cout << "n=" << at.n << "\n";
    std::cout << "eps=" << at.eps.str() << "\n";
    std::cout << "payload_bits=" << bs::payload_bits(at) << "\n";
    if (!weights_path.empty()) {
      auto dev = bs::max_add_deviation(at, read_weights_file(weights_path));
      std::cout << "max_additive_deviation=" << rational_str(dev) << "\n";
    }
  }
  return 0;
}

int cmd_bench_bits(const std::string& n_list, const std::string& strategies,
                   std::uint64_t trials, const std::string& eps_text,
                   std::optional<std::uint64_t> seed_opt, bool keyed) {
  bs::Epsilon eps = bs::Epsilon::parse(eps_text);
  std::uint64_t seed = resolve_seed(seed_opt);
  std::vector<std::uint64_t> ns;
  for (const std::string& part : split_list(n_list))
    ns.push_back(parse_u64(part, "--n entry"));
  std::vector<std::string> strats = split_list(strategies);
  for (const std::string& s : strats)
    if (s != "basic" && s != "vitter" && s != "doubling")
      throw bs::Error("unknown strategy \"" + s +
                      "\" (expected basic, vitter, or doubling)");

  auto run_once = [&](const std::string& strat, std::uint64_t n,
                      std::uint64_t trial) {
    bs::BitTape tape = make_tape(seed + trial, keyed);
    if (strat == "basic") {
      bs::basic_reservoir_sample(n, tape);
    } else if (strat == "vitter") {
      bs::vitter_reservoir_sample(n, tape);
    } else {
      bs::StreamCore core(eps);
      for (std::uint64_t t = 0; t < n; ++t) core.process(tape);
    }
    return tape.bits_consumed();
  };

  std::cout << "strategy,n,trials,mean_bits,max_bits\n";
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  for (const std::string& strat : strats) {
    for (std::uint64_t n : ns) {
      std::vector<std::future<std::pair<std::uint64_t, std::uint64_t>>> futs;
      std::uint64_t chunk = (trials + workers - 1) / workers;
      for (std::uint64_t lo = 0; lo < trials; lo += chunk) {
        std::uint64_t hi = std::min(trials, lo + chunk);
        futs.push_back(std::async(std::launch::async, [&, lo, hi] {
          std::uint64_t sum = 0, mx = 0;
          for (std::uint64_t t = lo; t < hi; ++t) {
            std::uint64_t b = run_once(strat, n, t);
            sum += b;
            mx = std::max(mx, b);
          }
          return std::make_pair(sum, mx);
        }));
      }
      std::uint64_t sum = 0, mx = 0;
      for (auto& f : futs) {
        auto [s, m] = f.get();
        sum += s;
        mx = std::max(mx, m);
      }
      double mean = trials ? static_cast<double>(sum) / trials : 0.0;
      std::ostringstream row;
      row << strat << "," << n << "," << trials << "," << mean << "," << mx;
      std::cout << row.str() << "\n";
    }
  }
  return 0;
}

int cmd_verify_enum(std::uint64_t n, const std::string& eps_text,
                    unsigned budget, bool inject_fault) {
  bs::Epsilon eps = bs::Epsilon::parse(eps_text);
  bs::ExactDistribution d = bs::enumerate_stream_distribution(n, eps, budget);

  bs::BitTape probe = bs::BitTape::seeded(0);
  {
    bs::StreamCore core(eps);
    for (std::uint64_t t = 0; t < n; ++t) core.process(probe);
  }
  bs::Int pool = bs::Int(1) << probe.bits_consumed();
  if (inject_fault && !d.items.empty()) d.items[0] += bs::Rational(1, pool);

  bs::Rational share(pool / bs::Int(n), pool);
  bool ok = d.total() == 1 && d.bot <= eps.value();
  for (const bs::Rational& p : d.items) ok = ok && p == share;

  std::ostringstream line;
  for (const bs::Rational& p : d.items) line << unreduced(p, pool) << " ";
  line << "bot=" << unreduced(d.bot, pool) << " " << (ok ? "PASS" : "FAIL");
  std::cout << line.str() << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-sample stream and succinct-index sampling tools"};
  app.require_subcommand(1);

  std::string eps_text = "1/2";
  std::optional<std::uint64_t> seed;
  bool keyed = false;
  std::string input;
  std::string format = "text";
  bool stats = false;
  std::uint64_t checkpoint = 0;

  auto add_common = [&](CLI::App* cmd, bool with_format) {
    cmd->add_option("--eps", eps_text,
                    "error budget as an exact fraction num/den");
    cmd->add_option("--seed", seed,
                    "64-bit seed (default: SAMPLER_SEED env, then OS entropy)");
    cmd->add_flag("--keyed", keyed,
                  "use the keyed cryptographic bit stream instead of the "
                  "default seeded generator");
    if (with_format)
      cmd->add_option("--format", format, "text, csv, or json")
          ->check(CLI::IsMember({"text", "csv", "json"}));
  };

  CLI::App* stream = app.add_subcommand(
      "stream", "sample one line from newline-delimited input");
  add_common(stream, true);
  stream->add_option("--input", input, "input file (default: stdin)");
  stream->add_option("--checkpoint", checkpoint,
                     "also report the held sample every k items")
      ->check(CLI::PositiveNumber);
  stream->add_flag("--stats", stats, "include buffering statistics");

  CLI::App* weighted = app.add_subcommand(
      "weighted", "sample one line from weight<TAB>payload input");
  add_common(weighted, true);
  weighted->add_option("--input", input, "input file (default: stdin)");
  weighted->add_flag("--stats", stats, "include buffering statistics");

  CLI::App* succinct =
      app.add_subcommand("succinct", "build and query index files");
  succinct->require_subcommand(1);

  std::string weights_path, out_path, index_path, mode = "mult";
  std::optional<unsigned> width;
  std::uint64_t trials = 1;
  bool histogram = false;

  CLI::App* build = succinct->add_subcommand("build", "build an index file");
  build->add_option("--weights", weights_path, "weights file, one integer per line")
      ->required();
  build->add_option("--mode", mode, "mult or add")
      ->check(CLI::IsMember({"mult", "add"}));
  build->add_option("--eps", eps_text, "error budget as num/den");
  build->add_option("--width", width,
                    "weight bit width for mult mode (default: fit the input)");
  build->add_option("--out", out_path, "output index file")->required();

  CLI::App* query = succinct->add_subcommand("query", "sample from an index");
  query->add_option("--index", index_path, "index file")->required();
  query->add_option("--trials", trials, "number of draws")
      ->check(CLI::PositiveNumber);
  query->add_option("--seed", seed, "64-bit seed");
  query->add_flag("--keyed", keyed, "use the keyed bit stream");
  query->add_flag("--histogram", histogram,
                  "print item,count CSV instead of raw draws");

  CLI::App* inspect =
      succinct->add_subcommand("inspect", "describe an index file");
  inspect->add_option("--index", index_path, "index file")->required();
  inspect->add_option("--weights", weights_path,
                      "original weights; adds the exact deviation audit");

  CLI::App* bench = app.add_subcommand(
      "bench-bits", "compare bit budgets across sampling strategies");
  std::string n_list = "1000", strategies = "basic,vitter,doubling";
  std::uint64_t bench_trials = 100;
  bench->add_option("--n", n_list, "comma-separated stream lengths");
  bench->add_option("--strategies", strategies,
                    "comma-separated subset of basic,vitter,doubling");
  bench->add_option("--trials", bench_trials, "trials per (strategy, n)")
      ->check(CLI::PositiveNumber);
  add_common(bench, false);

  CLI::App* verify = app.add_subcommand(
      "verify-enum", "enumerate every tape and check the exact distribution");
  std::uint64_t verify_n = 1;
  unsigned budget = 24;
  bool inject_fault = false;
  verify->add_option("--n", verify_n, "stream length")->required();
  verify->add_option("--eps", eps_text, "error budget as num/den");
  verify->add_option("--budget", budget, "tape bit budget");
  verify->add_flag("--inject-fault", inject_fault)->group("");

  int rc = 0;
  stream->callback([&] {
    rc = cmd_stream(input, eps_text, seed, keyed, checkpoint, format, stats);
  });
  weighted->callback(
      [&] { rc = cmd_weighted(input, eps_text, seed, keyed, format, stats); });
  build->callback([&] {
    rc = cmd_succinct_build(weights_path, mode, eps_text, width, out_path);
  });
  query->callback([&] {
    rc = cmd_succinct_query(index_path, trials, seed, keyed, histogram);
  });
  inspect->callback([&] { rc = cmd_succinct_inspect(index_path, weights_path); });
  bench->callback([&] {
    rc = cmd_bench_bits(n_list, strategies, bench_trials, eps_text, seed,
                        keyed);
  });
  verify->callback(
      [&] { rc = cmd_verify_enum(verify_n, eps_text, budget, inject_fault); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const bs::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
