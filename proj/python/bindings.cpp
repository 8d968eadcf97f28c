#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loopsmith/corpus.hpp"
#include "loopsmith/finitise.hpp"
#include "loopsmith/io.hpp"
#include "loopsmith/limits.hpp"
#include "loopsmith/paths.hpp"
#include "loopsmith/pipeline.hpp"
#include "loopsmith/polymorphism.hpp"

namespace py = pybind11;
using namespace loopsmith;

namespace {

GroupMode parse_mode(const std::string& m) {
    if (m == "trivial") return GroupMode::Trivial;
    if (m == "sampled") return GroupMode::Sampled;
    if (m == "covering") return GroupMode::Covering;
    throw std::invalid_argument("mode must be trivial, sampled or covering");
}

}  // namespace

PYBIND11_MODULE(_loopsmith, m) {
    m.doc() = "Pseudoloop / hardness decisions for finite digraphs with symmetry";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<GuardError>(m, "GuardError", PyExc_ValueError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);

    py::class_<Digraph>(m, "Digraph")
        .def(py::init<int, const std::vector<std::pair<int, int>>&>(), py::arg("n"),
             py::arg("edges") = std::vector<std::pair<int, int>>{})
        .def_property_readonly("n", &Digraph::size)
        .def("edges", &Digraph::edges)
        .def("has_edge", &Digraph::has_edge)
        .def("is_smooth", [](const Digraph& g) { return is_smooth(g); })
        .def("has_unit_walk", [](const Digraph& g) { return find_unit_walk(g).has_value(); })
        .def("weak_components", [](const Digraph& g) { return weak_components(g); })
        .def("__eq__", [](const Digraph& a, const Digraph& b) { return a == b; })
        .def("__repr__", [](const Digraph& g) {
            return "Digraph(n=" + std::to_string(g.size()) + ", edges=" + std::to_string(g.edge_count()) + ")";
        });

    py::class_<PermGroup>(m, "PermGroup")
        .def(py::init<int, const std::vector<Perm>&>(), py::arg("n"), py::arg("generators") = std::vector<Perm>{})
        .def_static("trivial", &PermGroup::trivial)
        .def_property_readonly("degree", &PermGroup::degree)
        .def("generators", &PermGroup::generators)
        .def("orbits", &PermGroup::point_orbits)
        .def("orbit_ids", &PermGroup::orbit_ids)
        .def("is_automorphism_group_of", &PermGroup::is_automorphism_group_of);

    py::class_<Instance>(m, "Instance")
        .def_readwrite("name", &Instance::name)
        .def_readwrite("graph", &Instance::g)
        .def_readwrite("group", &Instance::gp)
        .def("to_json", [](const Instance& in) { return instance_to_json(in); })
        .def_static("from_json", &instance_from_json);

    m.def("swap_instance", &swap_instance);
    m.def("directed_cycle", &directed_cycle, py::arg("n"));
    m.def("symmetric_k3", &symmetric_k3);
    m.def(
        "generate",
        [](uint64_t seed, const std::string& mode, int n_min, int n_max, double density, int cover_degree, bool smooth,
           bool loopless, bool pattern) {
            GenParams p{n_min, n_max, density, parse_mode(mode), cover_degree, smooth, loopless, pattern};
            return generate(seed, p);
        },
        py::arg("seed"), py::arg("mode") = "trivial", py::arg("n_min") = 3, py::arg("n_max") = 6,
        py::arg("density") = 0.3, py::arg("cover_degree") = 2, py::arg("smooth") = false, py::arg("loopless") = false,
        py::arg("pattern") = false);

    m.def(
        "orbit_quotient",
        [](const Digraph& g, const PermGroup& gp) {
            OrbitQuotient q = orbit_digraph(g, gp);
            py::dict d;
            d["quotient"] = q.quotient;
            d["orbit_of"] = q.orbit_of;
            d["loop_witness"] = q.loop_witness ? py::cast(*q.loop_witness) : py::none();
            return d;
        },
        py::arg("graph"), py::arg("group"));
    m.def(
        "alpha_classes", [](const Digraph& g, const PermGroup& gp) { return compute_alpha(g, gp).classes; },
        py::arg("graph"), py::arg("group"), "Classes of the finitising equivalence.");
    m.def(
        "check_finitises",
        [](const Digraph& g, const PermGroup& gp) {
            FinitiseReport r = check_finitises(compute_alpha(g, gp), g, gp);
            return py::make_tuple(r.ok(), r.violations);
        },
        py::arg("graph"), py::arg("group"));
    m.def("euclid_hammer", &euclid_hammer, py::arg("k"), py::arg("l"), py::arg("n"));

    m.def(
        "analyze_json", [](const Digraph& g, const PermGroup& gp) { return certificate_to_json(run_master(g, gp)); },
        py::arg("graph"), py::arg("group"), py::call_guard<py::gil_scoped_release>());
    m.def(
        "verify_json",
        [](const Digraph& g, const PermGroup& gp, const std::string& cert) {
            VerifyResult v = verify_certificate(g, gp, certificate_from_json(cert));
            return py::make_tuple(v.ok, v.reasons);
        },
        py::arg("graph"), py::arg("group"), py::arg("certificate"));

    m.def(
        "find_siggers",
        [](const Digraph& g) -> std::optional<std::vector<int>> {
            auto f = find_polymorphism(as_structure(g), IdentitySpec::siggers4());
            if (!f) return std::nullopt;
            return f->values;
        },
        py::arg("graph"), "Table of a 4-ary Siggers polymorphism (base-n argument codes), or None.");
    m.def(
        "check_siggerscrap",
        [](const Digraph& g, const PermGroup& gp) {
            SiggerscrapReport r = check_siggerscrap(g, gp);
            py::dict d;
            d["orbit"] = r.orbit;
            d["union01"] = r.union01;
            d["union02"] = r.union02;
            d["union12"] = r.union12;
            d["alpha_formula"] = r.alpha_formula;
            d["ok"] = r.ok();
            return d;
        },
        py::arg("graph"), py::arg("group"));
}
