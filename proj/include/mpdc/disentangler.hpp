#pragma once

#include <mpdc/mps.hpp>

namespace mpdc {

// One unitary layer: a staircase of n_sites-1 two-site gates (gate n acts on
// sites n and n+1) plus a one-site gate on the last site. In the generating
// direction gate 0 is applied first and the one-site gate last; the layer maps
// |0...0> to the bond-dimension-d state it was built from. Gate matrices are
// stored in the generating direction.
struct DisentanglerLayer {
  std::size_t d = 2;
  std::size_t n_sites = 0;
  std::vector<ComplexTensor> two_site_gates;  // (d^2 x d^2) each
  ComplexTensor final_gate;                   // (d x d)
  void validate() const;
};

// Build the layer whose generated state is psi_tilde (canonical, max bond <=
// d). Constrained columns come from the site tensors, the rest from an
// orthonormal complement.
DisentanglerLayer build_layer(const MpsState& psi_tilde);

struct UnitarityReport {
  std::vector<double> per_gate;  // two-site defects in order, then the final gate
  double global = -1.0;          // dense-operator defect; -1 when not computed
};
// check_global builds the dense layer operator (n_sites <= 10).
UnitarityReport layer_unitarity_defect(const DisentanglerLayer& layer, bool check_global = false);

enum class LayerDirection { Generate, Disentangle };

struct ApplyStats {
  double max_discarded_weight = 0.0;
  double fidelity_estimate = 1.0;
};

// Apply the layer (or its adjoint for Disentangle) to a canonical state with
// bonds capped at chi_cap. Returns a canonical, normalized state.
MpsState apply_layer(const DisentanglerLayer& layer, const MpsState& psi, LayerDirection dir,
                     std::size_t chi_cap, ApplyStats* stats = nullptr);

}  // namespace mpdc
