#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <mpdc/circuit.hpp>
#include <mpdc/io.hpp>
#include <mpdc/models.hpp>
#include <mpdc/version.hpp>

namespace py = pybind11;
using namespace mpdc;

namespace {

std::vector<Complex> as_vector(const ComplexTensor& t) {
  return std::vector<Complex>(t.data().begin(), t.data().end());
}

}  // namespace

PYBIND11_MODULE(mpdc, m) {
  m.doc() = "compiles matrix product states into layered qubit circuits";
  m.attr("__version__") = std::string(kToolVersion);
  py::register_exception<Error>(m, "Error");

  py::class_<MpsState>(m, "MpsState")
      .def_readonly("d", &MpsState::d)
      .def_readonly("canonical", &MpsState::canonical)
      .def_property_readonly("n_sites", &MpsState::n_sites)
      .def_property_readonly("max_bond", &MpsState::max_bond)
      .def("__repr__", [](const MpsState& s) {
        return "MpsState(n_sites=" + std::to_string(s.n_sites()) +
               ", d=" + std::to_string(s.d) + ", max_bond=" + std::to_string(s.max_bond()) + ")";
      });

  py::class_<EncodedCircuit>(m, "EncodedCircuit")
      .def_readonly("d", &EncodedCircuit::d)
      .def_readonly("n_sites", &EncodedCircuit::n_sites)
      .def_property_readonly("n_layers", &EncodedCircuit::n_layers)
      .def("__repr__", [](const EncodedCircuit& c) {
        return "EncodedCircuit(n_sites=" + std::to_string(c.n_sites) +
               ", n_layers=" + std::to_string(c.n_layers()) + ")";
      });

  py::class_<EncodeReport>(m, "EncodeReport")
      .def_readonly("n_sites", &EncodeReport::n_sites)
      .def_readonly("d", &EncodeReport::d)
      .def_readonly("n_layers", &EncodeReport::n_layers)
      .def_readonly("chi_tilde", &EncodeReport::chi_tilde)
      .def_readonly("input_max_bond", &EncodeReport::input_max_bond)
      .def_readonly("nlf", &EncodeReport::nlf)
      .def_readonly("max_discarded", &EncodeReport::max_discarded)
      .def_readonly("seconds", &EncodeReport::seconds)
      .def_readonly("nlf_reverse", &EncodeReport::nlf_reverse)
      .def_readonly("mps_params_per_site", &EncodeReport::mps_params_per_site)
      .def_readonly("circuit_params_per_site", &EncodeReport::circuit_params_per_site);

  py::class_<QubitSchedule>(m, "QubitSchedule")
      .def_readonly("d", &QubitSchedule::d)
      .def_readonly("n_sites", &QubitSchedule::n_sites)
      .def_readonly("n_layers", &QubitSchedule::n_layers)
      .def_readonly("n_wires", &QubitSchedule::n_wires)
      .def_property_readonly("n_ops", [](const QubitSchedule& s) { return s.ops.size(); });

  py::class_<DmrgResult>(m, "DmrgResult")
      .def_readonly("state", &DmrgResult::state)
      .def_readonly("energy", &DmrgResult::energy)
      .def_readonly("converged", &DmrgResult::converged)
      .def_readonly("sweeps", &DmrgResult::sweeps)
      .def_readonly("sweep_energies", &DmrgResult::sweep_energies);

  m.def("ghz", &ghz_mps, py::arg("n_sites"));
  m.def("product_state", &product_mps, py::arg("d"), py::arg("levels"));
  m.def("random_state", &random_mps, py::arg("n_sites"), py::arg("d") = 2, py::arg("chi") = 4,
        py::arg("seed") = 0);
  m.def("inner", &inner, py::arg("a"), py::arg("b"));
  m.def(
      "to_statevector", [](const MpsState& s) { return as_vector(to_statevector(s)); },
      py::arg("state"));
  m.def("entanglement_entropy", &entanglement_entropy, py::arg("state"), py::arg("bond"));
  m.def(
      "global_entanglement_nlf",
      [](const MpsState& s) { return global_entanglement_nlf(s).value; }, py::arg("state"));
  m.def(
      "truncate",
      [](const MpsState& s, std::size_t chi_max, bool variational) {
        auto r = truncate(s, chi_max, variational);
        return py::make_tuple(r.state, r.fidelity_estimate);
      },
      py::arg("state"), py::arg("chi_max"), py::arg("variational") = false);

  m.def(
      "ground_state",
      [](const std::string& model, std::size_t n_sites, double hx, std::size_t chi,
         std::uint64_t seed, int sweeps, double tol) {
        ModelSpec spec{parse_model(model), n_sites, hx};
        DmrgOptions opt;
        opt.chi = chi;
        opt.seed = seed;
        opt.max_sweeps = sweeps;
        opt.energy_tol = tol;
        return dmrg_ground_state(spec, opt);
      },
      py::arg("model"), py::arg("n_sites"), py::arg("hx") = 0.0, py::arg("chi") = 32,
      py::arg("seed") = 7, py::arg("sweeps") = 20, py::arg("tol") = 1e-10);
  m.def(
      "energy_expectation",
      [](const std::string& model, std::size_t n_sites, double hx, const MpsState& psi) {
        return mpo_expectation(build_mpo({parse_model(model), n_sites, hx}), psi);
      },
      py::arg("model"), py::arg("n_sites"), py::arg("hx"), py::arg("state"));
  m.def(
      "exact_ground_energy",
      [](const std::string& model, std::size_t n_sites, double hx) {
        return exact_ground_state({parse_model(model), n_sites, hx}).energy;
      },
      py::arg("model"), py::arg("n_sites"), py::arg("hx") = 0.0);

  m.def(
      "encode",
      [](const MpsState& psi, std::size_t n_layers, std::size_t chi_tilde) {
        auto [circuit, report] = encode(psi, n_layers, chi_tilde);
        return py::make_tuple(circuit, report);
      },
      py::arg("state"), py::arg("n_layers"), py::arg("chi_tilde"));
  m.def(
      "evolve_circuit",
      [](const EncodedCircuit& c, std::size_t chi_cap, py::object depth) {
        return evolve_circuit(c, chi_cap, depth.is_none() ? SIZE_MAX : depth.cast<std::size_t>());
      },
      py::arg("circuit"), py::arg("chi_cap"), py::arg("depth") = py::none());
  m.def(
      "fidelity_nlf",
      [](const EncodedCircuit& c, const MpsState& t, std::size_t chi_cap) {
        return fidelity_nlf(c, t, chi_cap).value;
      },
      py::arg("circuit"), py::arg("target"), py::arg("chi_cap"));
  m.def(
      "fidelity_nlf_reverse",
      [](const EncodedCircuit& c, const MpsState& t, std::size_t chi_cap) {
        return fidelity_nlf_reverse(c, t, chi_cap).value;
      },
      py::arg("circuit"), py::arg("target"), py::arg("chi_cap"));

  m.def("qubit_efficient_schedule", &qubit_efficient_schedule, py::arg("circuit"));
  m.def(
      "circuit_statevector", [](const EncodedCircuit& c) { return as_vector(circuit_statevector(c)); },
      py::arg("circuit"));
  m.def(
      "simulate_statevector",
      [](const QubitSchedule& s) { return as_vector(simulate_statevector(s)); },
      py::arg("schedule"));

  m.def(
      "save_state", [](const MpsState& s, const std::string& path) { save_mps(s, path); },
      py::arg("state"), py::arg("path"));
  m.def(
      "load_state", [](const std::string& path) { return load_mps(path); }, py::arg("path"));
  m.def(
      "save_circuit", [](const EncodedCircuit& c, const std::string& path) { save_circuit(c, path); },
      py::arg("circuit"), py::arg("path"));
  m.def(
      "load_circuit", [](const std::string& path) { return load_circuit(path); }, py::arg("path"));
  m.def(
      "write_program",
      [](const QubitSchedule& s, const std::string& path) { write_qasm_like(s, path); },
      py::arg("schedule"), py::arg("path"));
}
