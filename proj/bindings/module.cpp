#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "padicdyn/conjugation.hpp"
#include "padicdyn/maps.hpp"
#include "padicdyn/padic.hpp"
#include "padicdyn/prng.hpp"

namespace py = pybind11;
using namespace padicdyn;

namespace {

Extractor parse_extractor(const std::string& name) {
    if (name == "low-digit") return Extractor::low_digit;
    if (name == "full-state") return Extractor::full_state;
    throw std::invalid_argument("extractor must be low-digit or full-state");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "finite-precision compatible dynamics on Z_p^k";
    m.attr("__version__") = "0.1.0";
    m.attr("MAX_PRIME") = kMaxPrime;
    m.attr("MAX_POINTS") = kMaxPoints;

    py::register_exception<IllFormed>(m, "IllFormed");
    py::register_exception<NotBijective>(m, "NotBijective");
    py::register_exception<NotTransitive>(m, "NotTransitive");
    py::register_exception<PartitionError>(m, "PartitionError");
    py::register_exception<TargetNotSingleCycle>(m, "TargetNotSingleCycle");
    py::register_exception<TargetNotCompatible>(m, "TargetNotCompatible");
    py::register_exception<VerificationFailure>(m, "VerificationFailureError");
    py::register_exception<RetriesExhausted>(m, "RetriesExhaustedError");
    py::register_exception<MapIoError>(m, "MapIoError");
    py::register_exception<ShapeMismatch>(m, "ShapeMismatchError");

    // encoded points
    m.def(
        "encode",
        [](std::uint32_t p, std::uint32_t k, std::uint32_t n,
           const std::vector<std::uint64_t>& components) {
            return encode(TruncatedVector::from_values(p, k, n, components));
        },
        py::arg("p"), py::arg("k"), py::arg("n"), py::arg("components"),
        "interleaved index of a vector given by component values");
    m.def(
        "decode",
        [](std::uint64_t index, std::uint32_t p, std::uint32_t k, std::uint32_t n) {
            const TruncatedVector v = decode(index, p, k, n);
            std::vector<std::uint64_t> values;
            for (const auto& c : v.components()) values.push_back(c.value());
            return values;
        },
        py::arg("index"), py::arg("p"), py::arg("k"), py::arg("n"),
        "component values of an interleaved index");

    py::class_<TruncatedMap>(m, "TruncatedMap")
        .def(py::init([](std::uint32_t p, std::uint32_t k, std::uint32_t n,
                         std::vector<std::uint32_t> table, const std::string& provenance) {
                 TruncatedMap map{p, k, n, std::move(table), provenance};
                 map.validate();
                 return map;
             }),
             py::arg("p"), py::arg("k"), py::arg("n"), py::arg("table"),
             py::arg("provenance") = "constructed")
        .def_readonly("p", &TruncatedMap::p)
        .def_readonly("k", &TruncatedMap::k)
        .def_readonly("n", &TruncatedMap::n)
        .def_readonly("table", &TruncatedMap::table)
        .def_readonly("provenance", &TruncatedMap::provenance)
        .def("size", &TruncatedMap::size)
        .def("save", &save_map, py::arg("path"))
        .def("__repr__", [](const TruncatedMap& map) {
            return "<TruncatedMap " + map.provenance + " p=" + std::to_string(map.p) +
                   " k=" + std::to_string(map.k) + " n=" + std::to_string(map.n) + ">";
        });

    m.def("load_map", &load_map, py::arg("path"));
    m.def("identity_map", &identity_map, py::arg("p"), py::arg("k"), py::arg("n"));
    m.def(
        "odometer",
        [](std::uint32_t p, std::uint32_t n, std::uint64_t c) {
            return induce(OdometerSpec{c}, p, 1, n);
        },
        py::arg("p"), py::arg("n"), py::arg("c") = 1);
    m.def(
        "affine",
        [](std::uint32_t p, std::uint32_t n, std::uint64_t a, std::uint64_t b) {
            return induce(AffineSpec{a, b}, p, 1, n);
        },
        py::arg("p"), py::arg("n"), py::arg("a"), py::arg("b"));
    m.def(
        "interleaved_odometer",
        [](std::uint32_t p, std::uint32_t k, std::uint32_t n) {
            return induce(InterleavedOdometerSpec{}, p, k, n);
        },
        py::arg("p"), py::arg("k"), py::arg("n"));
    m.def("tree_sampled", &tree_sampled_table, py::arg("p"), py::arg("k"), py::arg("n"),
          py::arg("seed"));
    m.def("sample_transitive", &sample_transitive, py::arg("p"), py::arg("k"), py::arg("n"),
          py::arg("seed"), py::arg("max_retries") = std::uint64_t{1} << 22);
    m.def("reduce_map", &reduce_map, py::arg("map"), py::arg("m"));

    // checks
    m.def(
        "is_one_lipschitz",
        [](const TruncatedMap& map) {
            const LipschitzReport r = is_one_lipschitz(map);
            return py::make_tuple(r.pass, r.level, r.x, r.y);
        },
        py::arg("map"), "(pass, level, x, y); the witness triple is zero when pass");
    m.def("is_bijective_at", &is_bijective_at, py::arg("map"), py::arg("m"));
    m.def("is_measure_preserving_up_to", &is_measure_preserving_up_to, py::arg("map"));
    m.def("cycle_structure", &cycle_structure, py::arg("map"), py::arg("m"));
    m.def("is_transitive_at", &is_transitive_at, py::arg("map"), py::arg("m"));
    m.def("is_ergodic_up_to", &is_ergodic_up_to, py::arg("map"));
    m.def("compose", &compose, py::arg("f"), py::arg("g"), "f after g");
    m.def("invert", &invert, py::arg("f"));

    // conjugation
    m.def("odometer_target", &odometer_target, py::arg("p"), py::arg("k"));
    m.def(
        "solve_block_permutation",
        [](const TruncatedMap& F, const std::optional<TruncatedMap>& target) {
            return solve_block_permutation(F, target ? *target : odometer_target(F.p, F.k))
                .images();
        },
        py::arg("F"), py::arg("target") = std::nullopt,
        "1-based images of the solved permutation of {1..p^k}");

    py::class_<ConjugationBundle>(m, "ConjugationBundle")
        .def_readonly("p", &ConjugationBundle::p)
        .def_readonly("k", &ConjugationBundle::k)
        .def_readonly("N", &ConjugationBundle::N)
        .def_readonly("F", &ConjugationBundle::F)
        .def_property_readonly(
            "P", [](const ConjugationBundle& b) { return b.P.images(); })
        .def("G", [](const ConjugationBundle& b, std::uint32_t n) { return b.G.at(n - 1); },
             py::arg("n"))
        .def("T", [](const ConjugationBundle& b, std::uint32_t n) { return b.T.at(n - 1); },
             py::arg("n"))
        .def(
            "T_inv",
            [](const ConjugationBundle& b, std::uint32_t n) { return b.T_inv.at(n - 1); },
            py::arg("n"))
        .def("scalar_lipschitz_everywhere",
             [](const ConjugationBundle& b) {
                 return b.checks.scalar_lipschitz_everywhere();
             })
        .def(
            "lipschitz_witness",
            [](const ConjugationBundle& b, std::uint32_t n) -> py::object {
                const auto& w = b.checks.levels.at(n - 1).lipschitz_witness;
                if (!w) return py::none();
                return py::make_tuple(w->level, w->x, w->y);
            },
            py::arg("n"), "first (level, x, y) scalar compatibility witness, or None")
        .def("export_dir", &export_bundle, py::arg("dir"));

    m.def(
        "conjugate_forward",
        [](const TruncatedMap& F, const std::vector<std::uint32_t>& P, std::uint32_t N) {
            return conjugate_forward(F, BlockPermutation(P), N);
        },
        py::arg("F"), py::arg("P"), py::arg("N"));
    m.def("conjugate_backward", &conjugate_backward, py::arg("bundle"), py::arg("n"));
    m.def("import_bundle", &import_bundle, py::arg("dir"));

    py::class_<ConventionReport>(m, "ConventionReport")
        .def_readonly("level", &ConventionReport::level)
        .def_readonly("start_modulus", &ConventionReport::start_modulus)
        .def_readonly("partition_ok", &ConventionReport::partition_ok)
        .def_readonly("partition_error", &ConventionReport::partition_error)
        .def_readonly("convention_holds", &ConventionReport::convention_holds)
        .def_readonly("commutation_ok", &ConventionReport::commutation_ok)
        .def_property_readonly("counter_witness",
                               [](const ConventionReport& r) -> py::object {
                                   if (!r.counter_witness) return py::none();
                                   return py::make_tuple(r.counter_witness->level,
                                                         r.counter_witness->x,
                                                         r.counter_witness->y);
                               });

    m.def(
        "verify_scalar_t_convention",
        [](const ConjugationBundle& bundle, std::uint32_t n,
           std::optional<std::uint64_t> start_modulus) {
            return verify_scalar_t_convention(bundle, n, start_modulus);
        },
        py::arg("bundle"), py::arg("n"), py::arg("start_modulus") = std::nullopt);

    // generator
    m.def(
        "keystream",
        [](const TruncatedMap& map, std::uint64_t state, std::uint64_t count,
           const std::string& extractor) {
            KeystreamConfig cfg;
            cfg.spec = TableSpec{map};
            cfg.p = map.p;
            cfg.k = map.k;
            cfg.n = map.n;
            cfg.state = state;
            cfg.count = count;
            cfg.extractor = parse_extractor(extractor);
            return keystream(cfg);
        },
        py::arg("map"), py::arg("state") = 0, py::arg("count") = 1,
        py::arg("extractor") = "low-digit");

    py::class_<UniformityLevel>(m, "UniformityLevel")
        .def_readonly("m", &UniformityLevel::m)
        .def_readonly("class_count", &UniformityLevel::class_count)
        .def_readonly("expected", &UniformityLevel::expected)
        .def_readonly("max_deviation", &UniformityLevel::max_deviation)
        .def_readonly("histogram", &UniformityLevel::histogram);

    py::class_<UniformityReport>(m, "UniformityReport")
        .def_readonly("period", &UniformityReport::period)
        .def_readonly("levels", &UniformityReport::levels)
        .def("max_deviation", &UniformityReport::max_deviation);

    m.def("uniformity_report", &uniformity_report, py::arg("map"), py::arg("n"));
}
