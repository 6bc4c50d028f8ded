#include <mpdc/disentangler.hpp>

#include <algorithm>
#include <cmath>

#include "gauge.hpp"

namespace mpdc {

namespace {

ComplexTensor adjoint(const ComplexTensor& m) { return permute(conjugate(m), {1, 0}); }

// columns of the constrained block at a bulk site: V[(s*d + a), b] = A[s, b, a]
ComplexTensor constrained_columns(const ComplexTensor& a, std::size_t d) {
  const std::size_t chi_l = a.extent(1), chi_r = a.extent(2);
  ComplexTensor v({d * d, chi_l});
  for (std::size_t s = 0; s < d; ++s)
    for (std::size_t b = 0; b < chi_l; ++b)
      for (std::size_t r = 0; r < chi_r; ++r) v.at(s * d + r, b) = a.at(s, b, r);
  return v;
}

// weave constrained columns (at input |b>|0>, i.e. column index b*d) with the
// complement filling every other slot, preserving order
ComplexTensor assemble_gate(const ComplexTensor& v, const ComplexTensor& k, std::size_t d) {
  const std::size_t dim = v.extent(0), chi_l = v.extent(1);
  ComplexTensor u({dim, dim});
  std::size_t next_free = 0;
  for (std::size_t c = 0; c < dim; ++c) {
    const std::size_t b = c / d, t = c % d;
    if (t == 0 && b < chi_l) {
      for (std::size_t i = 0; i < dim; ++i) u.at(i, c) = v.at(i, b);
    } else {
      for (std::size_t i = 0; i < dim; ++i) u.at(i, c) = k.at(i, next_free);
      ++next_free;
    }
  }
  return u;
}

void simulate_gate_rows(ComplexTensor& m, const ComplexTensor& gate, std::size_t first_site,
                        std::size_t n_gate_sites, std::size_t d, std::size_t n) {
  // m <- (gate embedded at first_site.. ) * m, acting on the row index
  const std::size_t dim = m.extent(0);
  const std::size_t block = 1;
  std::size_t right = 1;
  for (std::size_t k = first_site + n_gate_sites; k < n; ++k) right *= d;
  std::size_t g = 1;
  for (std::size_t k = 0; k < n_gate_sites; ++k) g *= d;
  const std::size_t left = dim / (right * g);

  std::vector<Complex> buf(g);
  for (std::size_t col = 0; col < m.extent(1); ++col)
    for (std::size_t lo = 0; lo < left; ++lo)
      for (std::size_t hi = 0; hi < right; ++hi) {
        const std::size_t base = (lo * g) * right + hi;
        for (std::size_t x = 0; x < g; ++x) buf[x] = m.at(base + x * right, col);
        for (std::size_t x = 0; x < g; ++x) {
          Complex acc = 0;
          for (std::size_t y = 0; y < g; ++y) acc += gate.at(x, y) * buf[y];
          m.at(base + x * right, col) = acc;
        }
      }
  (void)block;
}

}  // namespace

void DisentanglerLayer::validate() const {
  if (d < 2) throw Error("DisentanglerLayer: physical dimension must be at least 2");
  if (n_sites < 2) throw Error("DisentanglerLayer: need at least two sites");
  if (two_site_gates.size() != n_sites - 1)
    throw Error("DisentanglerLayer: expected " + std::to_string(n_sites - 1) +
                " two-site gates, have " + std::to_string(two_site_gates.size()));
  for (const auto& g : two_site_gates)
    if (g.rank() != 2 || g.extent(0) != d * d || g.extent(1) != d * d)
      throw Error("DisentanglerLayer: two-site gates must be (d^2 x d^2)");
  if (final_gate.rank() != 2 || final_gate.extent(0) != d || final_gate.extent(1) != d)
    throw Error("DisentanglerLayer: final gate must be (d x d)");
}

DisentanglerLayer build_layer(const MpsState& psi_tilde) {
  psi_tilde.validate();
  if (!psi_tilde.canonical) throw Error("build_layer: expected a canonical state");
  const std::size_t d = psi_tilde.d, n = psi_tilde.n_sites();
  if (psi_tilde.max_bond() > d)
    throw Error("build_layer: bond dimension exceeds d; truncate the state first");

  DisentanglerLayer layer;
  layer.d = d;
  layer.n_sites = n;
  for (std::size_t site = 0; site + 1 < n; ++site) {
    auto v = constrained_columns(psi_tilde.tensors[site], d);
    auto k = orthonormal_complement(v);
    layer.two_site_gates.push_back(assemble_gate(v, k, d));
  }

  const auto& last = psi_tilde.tensors[n - 1];
  const std::size_t chi_l = last.extent(1);
  ComplexTensor v({d, chi_l});
  for (std::size_t s = 0; s < d; ++s)
    for (std::size_t b = 0; b < chi_l; ++b) v.at(s, b) = last.at(s, b, 0);
  auto k = orthonormal_complement(v);
  ComplexTensor g({d, d});
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t i = 0; i < d; ++i)
      g.at(i, c) = c < chi_l ? v.at(i, c) : k.at(i, c - chi_l);
  layer.final_gate = std::move(g);
  return layer;
}

UnitarityReport layer_unitarity_defect(const DisentanglerLayer& layer, bool check_global) {
  layer.validate();
  UnitarityReport rep;
  for (const auto& g : layer.two_site_gates) rep.per_gate.push_back(unitarity_defect(g));
  rep.per_gate.push_back(unitarity_defect(layer.final_gate));

  if (check_global) {
    if (layer.n_sites > 10)
      throw Error("layer_unitarity_defect: dense check limited to 10 sites");
    std::size_t dim = 1;
    for (std::size_t k = 0; k < layer.n_sites; ++k) dim *= layer.d;
    ComplexTensor m = identity_matrix(dim);
    for (std::size_t site = 0; site + 1 < layer.n_sites; ++site)
      simulate_gate_rows(m, layer.two_site_gates[site], site, 2, layer.d, layer.n_sites);
    simulate_gate_rows(m, layer.final_gate, layer.n_sites - 1, 1, layer.d, layer.n_sites);
    rep.global = unitarity_defect(m);
  }
  return rep;
}

MpsState apply_layer(const DisentanglerLayer& layer, const MpsState& psi, LayerDirection dir,
                     std::size_t chi_cap, ApplyStats* stats) {
  layer.validate();
  psi.validate();
  if (layer.n_sites != psi.n_sites() || layer.d != psi.d)
    throw Error("apply_layer: layer and state live on different chains");
  if (chi_cap == 0) throw Error("apply_layer: chi_cap must be at least 1");

  auto chain = detail::GaugeChain::from_canonical(psi);
  const std::size_t n = layer.n_sites;

  if (dir == LayerDirection::Generate) {
    for (std::size_t site = 0; site + 1 < n; ++site)
      chain.apply_gate(site, layer.two_site_gates[site], chi_cap, kDefaultSvdCutoff,
                       detail::CenterAfter::Right);
    chain.apply_one_site(n - 1, layer.final_gate);
    while (chain.center > 0) chain.move_left(detail::kNoCap, kDefaultSvdCutoff);
  } else {
    chain.move_to(n - 1, detail::kNoCap, kDefaultSvdCutoff);
    chain.apply_one_site(n - 1, adjoint(layer.final_gate));
    for (std::size_t site = n - 1; site-- > 0;)
      chain.apply_gate(site, adjoint(layer.two_site_gates[site]), chi_cap, kDefaultSvdCutoff,
                       detail::CenterAfter::Left);
  }

  if (stats) {
    stats->max_discarded_weight = chain.max_dw;
    stats->fidelity_estimate = chain.fid_est;
  }
  return chain.to_canonical_state();
}

}  // namespace mpdc
