#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <mpdc/disentangler.hpp>

namespace mpdc {

// Multi-layer gate circuit in generation order: layers[0] acts on |0...0>
// first, layers.back() acts last.  Running the layers in reverse with
// adjoint gates maps the encoded state (approximately) back to |0...0>.
struct EncodedCircuit {
  std::size_t d = 2;
  std::size_t n_sites = 0;
  std::vector<DisentanglerLayer> layers;

  std::size_t n_layers() const { return layers.size(); }
  void validate() const;
};

// Per-depth encoding quality.  Row t describes the sub-circuit made of the
// last t generation layers; row 0 is the baseline over product states
// (global entanglement).  All fidelities are reported as negative log
// fidelity per site, -ln|<target|circuit state>| / n_sites.
struct EncodeReport {
  std::size_t n_sites = 0;
  std::size_t d = 2;
  std::size_t n_layers = 0;
  std::size_t chi_tilde = 0;
  std::size_t input_max_bond = 0;
  std::vector<double> nlf;            // size n_layers + 1
  std::vector<double> max_discarded;  // largest discarded SVD weight per row
  std::vector<double> seconds;        // wall time spent producing each row
  double nlf_reverse = 0.0;           // residual after disentangling the target
  std::size_t mps_params_per_site = 0;
  std::size_t circuit_params_per_site = 0;
};

// Compiles `psi` into `n_layers` disentangler layers.  Each step builds a
// layer from the bond-d truncation of the current state and then applies
// its adjoint, with bonds capped at chi_tilde throughout (chi_tilde >= d).
std::pair<EncodedCircuit, EncodeReport> encode(const MpsState& psi, std::size_t n_layers,
                                               std::size_t chi_tilde);

// Applies a sub-circuit to |0...0> with bonds capped at chi_cap.  `depth`
// selects the last `depth` generation layers (the depth-t sub-circuit of
// the report); by default the whole circuit runs.
MpsState evolve_circuit(const EncodedCircuit& circuit, std::size_t chi_cap,
                        std::size_t depth = SIZE_MAX);

// -ln|<target|U|0...0>| / n_sites for the full circuit.
NlfValue fidelity_nlf(const EncodedCircuit& circuit, const MpsState& target, std::size_t chi_cap);

// -ln|<0...0|U^dag|target>| / n_sites: how well the circuit disentangles.
NlfValue fidelity_nlf_reverse(const EncodedCircuit& circuit, const MpsState& target,
                              std::size_t chi_cap);

}  // namespace mpdc
