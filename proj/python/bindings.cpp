#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bitsampler/alias_table.hpp"
#include "bitsampler/baselines.hpp"
#include "bitsampler/bit_tape.hpp"
#include "bitsampler/errors.hpp"
#include "bitsampler/numeric.hpp"
#include "bitsampler/stream_sampler.hpp"
#include "bitsampler/succinct.hpp"
#include "bitsampler/verify.hpp"

namespace py = pybind11;
using namespace bitsampler;

namespace {

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

std::vector<Int> to_ints(const std::vector<std::uint64_t>& xs) {
  return std::vector<Int>(xs.begin(), xs.end());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entropy-efficient exact and near-exact discrete sampling";

  py::register_exception<FormatError>(m, "FormatError", PyExc_RuntimeError);

  py::class_<Epsilon>(m, "Epsilon")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("num"),
           py::arg("den"))
      .def_static("parse", &Epsilon::parse)
      .def_readonly("num", &Epsilon::num)
      .def_readonly("den", &Epsilon::den)
      .def("__str__", &Epsilon::str)
      .def("__repr__",
           [](const Epsilon& e) { return "Epsilon(" + e.str() + ")"; });

  py::class_<BitTape>(m, "BitTape")
      .def_static("seeded", &BitTape::seeded, py::arg("seed"))
      .def_static("keyed", &BitTape::keyed, py::arg("seed"))
      .def_static("from_bits", &BitTape::from_bits, py::arg("bits"))
      .def_static("from_value", &BitTape::from_value, py::arg("value"),
                  py::arg("nbits"))
      .def("next_bit", &BitTape::next_bit)
      .def("bits_consumed", &BitTape::bits_consumed);

  m.def(
      "uniform_int",
      [](BitTape& tape, std::uint64_t mm) { return uniform_int(tape, mm); },
      py::arg("tape"), py::arg("m"),
      "Uniform draw from {0, ..., m-1} using ceil(log2 m) bits per attempt.");
  m.def(
      "bernoulli",
      [](BitTape& tape, std::uint64_t num, std::uint64_t den) {
        return bernoulli(tape, Int(num), Int(den));
      },
      py::arg("tape"), py::arg("num"), py::arg("den"),
      "True with probability num/den; two bits in expectation.");

  // ---- streaming samplers over arbitrary python payloads ----
  using PyStream = StreamSampler<py::object>;
  py::class_<PyStream>(m, "StreamSampler")
      .def(py::init<Epsilon>(), py::arg("eps"))
      .def(
          "process",
          [](PyStream& s, py::object item, BitTape& tape) {
            s.process(std::move(item), tape);
          },
          py::arg("item"), py::arg("tape"))
      .def("current_sample",
           [](const PyStream& s) -> py::object {
             const py::object* p = s.current_sample();
             return p ? *p : py::none();
           })
      .def("has_sample", [](const PyStream& s) { return s.core().has_sample(); })
      .def("items_seen", &PyStream::items_seen)
      .def("max_buffered", &PyStream::max_buffered)
      .def("location", [](const PyStream& s) { return s.core().loc; })
      .def("pool_bits",
           [](const PyStream& s) { return floor_log2(s.core().s); });

  using PyWeighted = WeightedStreamSampler<py::object>;
  py::class_<PyWeighted>(m, "WeightedStreamSampler")
      .def(py::init<Epsilon>(), py::arg("eps"))
      .def(
          "process",
          [](PyWeighted& s, py::object item, std::uint64_t weight,
             BitTape& tape) {
            return s.process(std::move(item), weight, tape) ==
                   WeightedCore::Step::Processed;
          },
          py::arg("item"), py::arg("weight"), py::arg("tape"),
          "Returns False when the item had zero weight and was skipped.")
      .def("current_sample",
           [](const PyWeighted& s) -> py::object {
             const py::object* p = s.current_sample();
             return p ? *p : py::none();
           })
      .def("has_sample",
           [](const PyWeighted& s) { return s.core().has_sample(); })
      .def("items_seen", [](const PyWeighted& s) { return s.core().t; })
      .def("max_buffered", &PyWeighted::max_buffered)
      .def("location", [](const PyWeighted& s) { return s.core().loc; })
      .def("weight_sum", [](const PyWeighted& s) {
        return static_cast<std::uint64_t>(s.core().weight_sum);
      });

  m.def("offline_uniform", &offline_uniform, py::arg("n"), py::arg("eps"),
        py::arg("tape"),
        "One-shot draw from {1..n} (0 = discard) using offline_bits(n, eps) "
        "bits.");
  m.def("offline_bits", &offline_bits, py::arg("n"), py::arg("eps"));

  m.def("basic_reservoir_sample", &basic_reservoir_sample, py::arg("n"),
        py::arg("tape"));
  m.def("vitter_reservoir_sample", &vitter_reservoir_sample, py::arg("n"),
        py::arg("tape"));

  // ---- alias table ----
  py::class_<AliasTable>(m, "AliasTable")
      .def_property_readonly(
          "size", [](const AliasTable& t) { return t.buckets.size(); })
      .def("owned_mass", [](const AliasTable& t) {
        std::vector<std::uint64_t> out;
        for (const Int& v : t.owned_mass())
          out.push_back(static_cast<std::uint64_t>(v));
        return out;
      });
  m.def(
      "build_alias",
      [](const std::vector<std::uint64_t>& xs) {
        return build_alias(to_ints(xs));
      },
      py::arg("weights"));
  m.def("alias_sample", &alias_sample, py::arg("table"), py::arg("tape"));

  // ---- succinct indexes ----
  py::class_<MultIndex>(m, "MultIndex")
      .def_readonly("n", &MultIndex::n)
      .def_readonly("w", &MultIndex::w)
      .def_readonly("eps", &MultIndex::eps);
  py::class_<AdditiveTable>(m, "AdditiveTable")
      .def_readonly("n", &AdditiveTable::n)
      .def_readonly("m", &AdditiveTable::m)
      .def_readonly("eps", &AdditiveTable::eps)
      .def_readonly("counts", &AdditiveTable::counts)
      .def_readonly("slots", &AdditiveTable::slots);

  m.def(
      "build_mult",
      [](const std::vector<std::uint64_t>& xs, const Epsilon& eps,
         unsigned w) { return build_mult(to_ints(xs), eps, w); },
      py::arg("weights"), py::arg("eps"), py::arg("w"));
  m.def("sample_mult", &sample_mult, py::arg("index"), py::arg("tape"),
        "0-based item index; the index never returns the discard outcome.");
  m.def(
      "build_add",
      [](const std::vector<std::uint64_t>& xs, const Epsilon& eps) {
        return build_add(to_ints(xs), eps);
      },
      py::arg("weights"), py::arg("eps"));
  m.def("sample_add", &sample_add, py::arg("table"), py::arg("tape"),
        "0-based item index.");

  m.def(
      "serialize",
      [](const MultIndex& idx) {
        auto bytes = serialize(idx);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size());
      },
      py::arg("index"));
  m.def(
      "serialize",
      [](const AdditiveTable& t) {
        auto bytes = serialize(t);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()),
                         bytes.size());
      },
      py::arg("table"));
  m.def(
      "deserialize_index",
      [](py::bytes data) -> py::object {
        std::string_view view = data;
        std::vector<std::uint8_t> bytes(view.begin(), view.end());
        LoadedIndex loaded = deserialize_index(bytes);
        if (std::holds_alternative<MultIndex>(loaded))
          return py::cast(std::get<MultIndex>(std::move(loaded)));
        return py::cast(std::get<AdditiveTable>(std::move(loaded)));
      },
      py::arg("data"),
      "Parses an SSMP container; returns a MultIndex or AdditiveTable.");
  m.def("payload_bits",
        [](const MultIndex& idx) { return payload_bits(idx); });
  m.def("payload_bits",
        [](const AdditiveTable& t) { return payload_bits(t); });

  // ---- exact verification ----
  py::class_<ExactDistribution>(m, "ExactDistribution")
      .def("items",
           [](const ExactDistribution& d) {
             std::vector<std::string> out;
             out.reserve(d.items.size());
             for (const Rational& r : d.items) out.push_back(rational_str(r));
             return out;
           },
           "Item probabilities as exact 'num/den' strings, 1-based items.")
      .def("bot",
           [](const ExactDistribution& d) { return rational_str(d.bot); })
      .def("total",
           [](const ExactDistribution& d) { return rational_str(d.total()); })
      .def("__len__",
           [](const ExactDistribution& d) { return d.items.size(); });

  m.def("enumerate_stream_distribution", &enumerate_stream_distribution,
        py::arg("n"), py::arg("eps"), py::arg("budget") = 24);
  m.def("enumerate_weighted_distribution", &enumerate_weighted_distribution,
        py::arg("weights"), py::arg("eps"), py::arg("budget") = 24);
  m.def("enumerate_offline_distribution", &enumerate_offline_distribution,
        py::arg("n"), py::arg("eps"), py::arg("budget") = 24);
  m.def("exact_index_distribution",
        [](const MultIndex& idx) { return exact_index_distribution(idx); });
  m.def("exact_index_distribution", [](const AdditiveTable& t) {
    return exact_index_distribution(t);
  });
  m.def(
      "max_mult_deviation",
      [](const MultIndex& idx, const std::vector<std::uint64_t>& xs) {
        return rational_str(max_mult_deviation(idx, to_ints(xs)));
      },
      py::arg("index"), py::arg("weights"));
  m.def(
      "max_add_deviation",
      [](const AdditiveTable& t, const std::vector<std::uint64_t>& xs) {
        return rational_str(max_add_deviation(t, to_ints(xs)));
      },
      py::arg("table"), py::arg("weights"));

  py::class_<ChiSquareResult>(m, "ChiSquareResult")
      .def_readonly("statistic", &ChiSquareResult::statistic)
      .def_readonly("critical", &ChiSquareResult::critical)
      .def_readonly("trials", &ChiSquareResult::trials)
      .def_readonly("df", &ChiSquareResult::df)
      .def_readonly("passed", &ChiSquareResult::pass);
  m.def("chi_square", &chi_square, py::arg("observed"), py::arg("expected"),
        py::arg("alpha") = 0.001);
  m.def(
      "tv_distance",
      [](const ExactDistribution& a, const ExactDistribution& b) {
        return rational_str(tv_distance(a, b));
      },
      py::arg("a"), py::arg("b"));
}
