#include <mpdc/encoder.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace mpdc {

namespace {

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double nlf_from_overlap(Complex ov, std::size_t n_sites) {
  double a = std::abs(ov);
  a = std::clamp(a, 1e-300, 1.0);
  return std::max(0.0, -std::log(a) / static_cast<double>(n_sites));
}

MpsState vacuum(std::size_t d, std::size_t n_sites) {
  return product_mps(d, std::vector<std::size_t>(n_sites, 0));
}

}  // namespace

void EncodedCircuit::validate() const {
  if (layers.empty()) throw Error("circuit has no layers");
  for (const auto& layer : layers) {
    layer.validate();
    if (layer.d != d || layer.n_sites != n_sites)
      throw Error("circuit layers disagree on d or n_sites");
  }
}

MpsState evolve_circuit(const EncodedCircuit& circuit, std::size_t chi_cap, std::size_t depth) {
  circuit.validate();
  if (chi_cap < circuit.d) throw Error("bond cap below the local dimension");
  const std::size_t total = circuit.n_layers();
  if (depth == SIZE_MAX) depth = total;
  if (depth > total) throw Error("requested depth exceeds the circuit");

  MpsState state = vacuum(circuit.d, circuit.n_sites);
  for (std::size_t i = total - depth; i < total; ++i)
    state = apply_layer(circuit.layers[i], state, LayerDirection::Generate, chi_cap, nullptr);
  return state;
}

NlfValue fidelity_nlf(const EncodedCircuit& circuit, const MpsState& target, std::size_t chi_cap) {
  if (target.n_sites() != circuit.n_sites || target.d != circuit.d)
    throw Error("target does not match the circuit");
  auto state = evolve_circuit(circuit, chi_cap);
  return {nlf_from_overlap(inner(target, state), circuit.n_sites)};
}

NlfValue fidelity_nlf_reverse(const EncodedCircuit& circuit, const MpsState& target,
                              std::size_t chi_cap) {
  circuit.validate();
  if (target.n_sites() != circuit.n_sites || target.d != circuit.d)
    throw Error("target does not match the circuit");
  if (chi_cap < circuit.d) throw Error("bond cap below the local dimension");

  MpsState cur = target;
  for (std::size_t i = circuit.n_layers(); i-- > 0;)
    cur = apply_layer(circuit.layers[i], cur, LayerDirection::Disentangle, chi_cap, nullptr);
  return {nlf_from_overlap(inner(vacuum(circuit.d, circuit.n_sites), cur), circuit.n_sites)};
}

std::pair<EncodedCircuit, EncodeReport> encode(const MpsState& psi, std::size_t n_layers,
                                               std::size_t chi_tilde) {
  psi.validate();
  if (!psi.canonical) throw Error("encode requires a canonical input state");
  if (n_layers == 0) throw Error("need at least one layer");
  if (chi_tilde < psi.d) throw Error("bond cap below the local dimension");

  const std::size_t n = psi.n_sites();
  EncodeReport report;
  report.n_sites = n;
  report.d = psi.d;
  report.n_layers = n_layers;
  report.chi_tilde = chi_tilde;
  report.input_max_bond = psi.max_bond();
  report.nlf.assign(n_layers + 1, 0.0);
  report.max_discarded.assign(n_layers + 1, 0.0);
  report.seconds.assign(n_layers + 1, 0.0);
  report.mps_params_per_site = psi.d * report.input_max_bond * report.input_max_bond;
  report.circuit_params_per_site = n_layers * psi.d * psi.d * psi.d * psi.d;

  auto t0 = std::chrono::steady_clock::now();
  report.nlf[0] = global_entanglement_nlf(psi).value;
  report.seconds[0] = elapsed_since(t0);

  // Peel layers off the state: each pass encodes the bond-d skeleton of
  // what is left and removes it, so the residual grows less entangled.
  std::vector<DisentanglerLayer> built;  // built[k] acts last when generating
  std::vector<double> build_dw(n_layers, 0.0);
  std::vector<double> build_time(n_layers, 0.0);
  MpsState cur = psi;
  for (std::size_t k = 0; k < n_layers; ++k) {
    t0 = std::chrono::steady_clock::now();
    auto layer = build_layer(truncate(cur, psi.d).state);
    ApplyStats stats;
    cur = apply_layer(layer, cur, LayerDirection::Disentangle, chi_tilde, &stats);
    built.push_back(std::move(layer));
    build_dw[k] = stats.max_discarded_weight;
    build_time[k] = elapsed_since(t0);
  }
  report.nlf_reverse = nlf_from_overlap(inner(vacuum(psi.d, n), cur), n);

  EncodedCircuit circuit;
  circuit.d = psi.d;
  circuit.n_sites = n;
  circuit.layers.assign(built.rbegin(), built.rend());

  for (std::size_t t = 1; t <= n_layers; ++t) {
    t0 = std::chrono::steady_clock::now();
    MpsState state = vacuum(psi.d, n);
    double evolve_dw = 0.0;
    for (std::size_t i = n_layers - t; i < n_layers; ++i) {
      ApplyStats stats;
      state = apply_layer(circuit.layers[i], state, LayerDirection::Generate, chi_tilde, &stats);
      evolve_dw = std::max(evolve_dw, stats.max_discarded_weight);
    }
    report.nlf[t] = nlf_from_overlap(inner(psi, state), n);
    report.max_discarded[t] = std::max(build_dw[t - 1], evolve_dw);
    report.seconds[t] = build_time[t - 1] + elapsed_since(t0);
  }

  return {std::move(circuit), std::move(report)};
}

}  // namespace mpdc
