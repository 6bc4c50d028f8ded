#pragma once

#include <mpdc/mps.hpp>

#include <string>

namespace mpdc {

enum class ModelKind { TransverseIsing, Heisenberg, XY };

std::string model_name(ModelKind kind);
ModelKind parse_model(const std::string& name);

// Open spin-1/2 chains with S = sigma/2:
//   ising:      sum Sz Sz - hx sum Sx   (critical at hx = 0.5)
//   heisenberg: sum SxSx + SySy + SzSz
//   xy:         sum SxSx + SySy
struct ModelSpec {
  ModelKind kind = ModelKind::TransverseIsing;
  std::size_t n_sites = 2;
  double hx = 0.0;
  void validate() const;
};

// Matrix product operator; site tensors are (phys out, phys in, bond left,
// bond right) with extent-1 boundary bonds.
struct Mpo {
  std::size_t d = 2;
  std::vector<ComplexTensor> site_ops;
  std::size_t n_sites() const { return site_ops.size(); }
  void validate() const;
};

Mpo build_mpo(const ModelSpec& spec);
ComplexTensor mpo_to_dense(const Mpo& mpo);                  // n_sites <= 10
double mpo_expectation(const Mpo& mpo, const MpsState& psi);

struct DmrgOptions {
  std::size_t chi = 32;
  int max_sweeps = 20;
  double energy_tol = 1e-10;
  std::uint64_t seed = 7;
  int eigensolver_max_iter = 200;
  double eigensolver_tol = 1e-10;
  double cutoff = kDefaultSvdCutoff;
  // grow the bond cap 8,16,32,... across warm-up sweeps; convergence is only
  // declared once the cap has reached chi
  bool bond_ramp = true;
};

struct DmrgResult {
  MpsState state;
  double energy = 0.0;
  bool converged = false;
  int sweeps = 0;
  std::vector<double> sweep_energies;
};

DmrgResult dmrg_ground_state(const ModelSpec& spec, const DmrgOptions& opt = {});

struct ExactResult {
  double energy = 0.0;
  ComplexTensor state;  // (2^n) statevector, unit norm
};

ExactResult exact_ground_state(const ModelSpec& spec);   // n_sites <= 14
ComplexTensor dense_hamiltonian(const ModelSpec& spec);  // n_sites <= 12

}  // namespace mpdc
