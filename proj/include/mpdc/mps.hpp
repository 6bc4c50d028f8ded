#pragma once

#include <mpdc/tensor.hpp>

#include <cstdint>

namespace mpdc {

// Negative-logarithmic fidelity per site: -ln(overlap magnitude) / n_sites.
struct NlfValue {
  double value = 0.0;
};

// Open-boundary matrix product state. Site tensors are (phys, left bond,
// right bond) with dummy extent-1 bonds at both ends. `canonical` asserts the
// gauge where tensor 0 carries the norm and every later tensor satisfies
// sum_{s,r} A[s,a,r] conj(A[s,a',r]) = delta(a,a').
struct MpsState {
  std::size_t d = 2;
  std::vector<ComplexTensor> tensors;
  bool canonical = false;

  std::size_t n_sites() const { return tensors.size(); }
  // interior bond b joins sites b and b+1, b in [0, n_sites-2]
  std::size_t bond_dim(std::size_t b) const;
  std::size_t max_bond() const;
  void validate() const;
  double max_canonical_residual() const;
};

MpsState canonicalize(const MpsState& psi);

struct TruncateResult {
  MpsState state;
  double fidelity_estimate = 1.0;  // product of sqrt(1 - discarded weight) per split
};
// Compress every bond to at most chi_max. With `variational` the single sweep
// is refined by alternating overlap-maximizing sweeps against the input.
TruncateResult truncate(const MpsState& psi, std::size_t chi_max, bool variational = false);

Complex inner(const MpsState& a, const MpsState& b);  // <a|b>

// Apply a (d^2 x d^2) unitary to sites (site, site+1); bonds are capped at
// chi_cap. Returns a canonical, normalized state.
MpsState apply_two_site_gate(const MpsState& psi, std::size_t site, const ComplexTensor& gate,
                             std::size_t chi_cap);

ComplexTensor to_statevector(const MpsState& psi);  // n_sites <= 24

double entanglement_entropy(const MpsState& psi, std::size_t bond);
NlfValue global_entanglement_nlf(const MpsState& psi);

MpsState ghz_mps(std::size_t n_sites);
MpsState product_mps(std::size_t d, const std::vector<std::size_t>& levels);
MpsState random_mps(std::size_t n_sites, std::size_t d, std::size_t chi, std::uint64_t seed);

}  // namespace mpdc
