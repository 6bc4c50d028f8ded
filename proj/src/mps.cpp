#include <mpdc/mps.hpp>

#include <algorithm>
#include <cmath>

#include "eigen_bridge.hpp"
#include "gauge.hpp"

namespace mpdc {

namespace {

double identity_deviation(const ComplexTensor& m) {
  detail::EMat mat = detail::to_eigen(m);
  mat -= detail::EMat::Identity(mat.rows(), mat.cols());
  if (mat.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<detail::EMat> es(mat, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::size_t capped_power(std::size_t base, std::size_t exp, std::size_t limit) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (v > limit / base) return limit;
    v *= base;
    if (v >= limit) return limit;
  }
  return v;
}

}  // namespace

std::size_t MpsState::bond_dim(std::size_t b) const {
  if (b + 1 >= tensors.size()) throw Error("bond_dim: bond index out of range");
  return tensors[b].extent(2);
}

std::size_t MpsState::max_bond() const {
  std::size_t m = 1;
  for (std::size_t b = 0; b + 1 < tensors.size(); ++b) m = std::max(m, tensors[b].extent(2));
  return m;
}

void MpsState::validate() const {
  if (d < 2) throw Error("MpsState: physical dimension must be at least 2");
  if (tensors.size() < 2) throw Error("MpsState: need at least two sites");
  for (std::size_t n = 0; n < tensors.size(); ++n) {
    const auto& t = tensors[n];
    if (t.rank() != 3) throw Error("MpsState: site tensor must be rank 3");
    if (t.extent(0) != d) throw Error("MpsState: physical extent mismatch at site " +
                                      std::to_string(n));
    if (t.extent(1) == 0 || t.extent(2) == 0)
      throw Error("MpsState: zero bond extent at site " + std::to_string(n));
    if (!t.all_finite()) throw Error("MpsState: non-finite entries at site " + std::to_string(n));
  }
  if (tensors.front().extent(1) != 1 || tensors.back().extent(2) != 1)
    throw Error("MpsState: boundary bonds must have extent 1");
  for (std::size_t n = 0; n + 1 < tensors.size(); ++n)
    if (tensors[n].extent(2) != tensors[n + 1].extent(1))
      throw Error("MpsState: bond mismatch between sites " + std::to_string(n) + " and " +
                  std::to_string(n + 1));
}

double MpsState::max_canonical_residual() const {
  validate();
  double r = std::abs(tensors[0].norm() - 1.0);
  for (std::size_t n = 1; n < tensors.size(); ++n) {
    auto m = contract(tensors[n], conjugate(tensors[n]), {{0, 0}, {2, 2}});
    r = std::max(r, identity_deviation(m));
  }
  return r;
}

// ---------------------------------------------------------------------------
// gauge chain

namespace detail {

GaugeChain GaugeChain::from_canonical(const MpsState& psi) {
  psi.validate();
  if (!psi.canonical) throw Error("expected a canonical state (run canonicalize first)");
  GaugeChain c;
  c.d = psi.d;
  c.ts = psi.tensors;
  c.center = 0;
  return c;
}

namespace {

// scale singular values to unit two-norm; returns the scale
double unit_spectrum(std::vector<double>& s) {
  double sum = 0;
  for (double v : s) sum += v * v;
  const double scale = std::sqrt(sum);
  if (!(scale > 0)) throw Error("gauge move hit a zero-norm split");
  for (double& v : s) v /= scale;
  return scale;
}

}  // namespace

void GaugeChain::move_right(std::size_t cap, double cutoff) {
  if (center + 1 >= ts.size()) throw Error("move_right: already at the last site");
  const auto& a = ts[center];
  const std::size_t s = a.extent(0), l = a.extent(1), r = a.extent(2);
  auto res = truncated_svd(reshape(permute(a, {1, 0, 2}), {l * s, r}), cap, cutoff);
  unit_spectrum(res.singular_values);
  const std::size_t k = res.singular_values.size();

  ts[center] = permute(reshape(std::move(res.left), {l, s, k}), {1, 0, 2});
  ComplexTensor m = std::move(res.right_adjoint);  // (k, r)
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < r; ++j) m.at(i, j) *= res.singular_values[i];
  ts[center + 1] = permute(contract(m, ts[center + 1], {{1, 1}}), {1, 0, 2});
  ++center;
  max_dw = std::max(max_dw, res.discarded_weight);
  fid_est *= std::sqrt(std::max(0.0, 1.0 - res.discarded_weight));
}

void GaugeChain::move_left(std::size_t cap, double cutoff) {
  if (center == 0) throw Error("move_left: already at the first site");
  const auto& a = ts[center];
  const std::size_t s = a.extent(0), l = a.extent(1), r = a.extent(2);
  auto res = truncated_svd(reshape(permute(a, {1, 0, 2}), {l, s * r}), cap, cutoff);
  unit_spectrum(res.singular_values);
  const std::size_t k = res.singular_values.size();

  ts[center] = permute(reshape(std::move(res.right_adjoint), {k, s, r}), {1, 0, 2});
  ComplexTensor m = std::move(res.left);  // (l, k)
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < k; ++j) m.at(i, j) *= res.singular_values[j];
  ts[center - 1] = contract(ts[center - 1], m, {{2, 0}});
  --center;
  max_dw = std::max(max_dw, res.discarded_weight);
  fid_est *= std::sqrt(std::max(0.0, 1.0 - res.discarded_weight));
}

void GaugeChain::move_to(std::size_t target, std::size_t cap, double cutoff) {
  if (target >= ts.size()) throw Error("move_to: site out of range");
  while (center < target) move_right(cap, cutoff);
  while (center > target) move_left(cap, cutoff);
}

void GaugeChain::apply_gate(std::size_t n, const ComplexTensor& gate, std::size_t cap,
                            double cutoff, CenterAfter after) {
  if (n + 1 >= ts.size()) throw Error("apply_gate: site out of range");
  if (center != n && center != n + 1) throw Error("apply_gate: center must sit on the window");
  if (gate.rank() != 2 || gate.extent(0) != d * d || gate.extent(1) != d * d)
    throw Error("apply_gate: expected a (d^2 x d^2) matrix");

  const std::size_t l = ts[n].extent(1), r = ts[n + 1].extent(2);
  auto theta = contract(ts[n], ts[n + 1], {{2, 1}});             // (s, l, t, r)
  auto g4 = reshape(gate, {d, d, d, d});                         // (s', t', s, t)
  auto th = permute(contract(g4, theta, {{2, 0}, {3, 2}}), {2, 0, 1, 3});  // (l, s', t', r)
  auto res = truncated_svd(reshape(std::move(th), {l * d, d * r}), cap, cutoff);
  unit_spectrum(res.singular_values);
  const std::size_t k = res.singular_values.size();

  if (after == CenterAfter::Right) {
    ts[n] = permute(reshape(std::move(res.left), {l, d, k}), {1, 0, 2});
    ComplexTensor m = std::move(res.right_adjoint);  // (k, d*r)
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < d * r; ++j) m.at(i, j) *= res.singular_values[i];
    ts[n + 1] = permute(reshape(std::move(m), {k, d, r}), {1, 0, 2});
    center = n + 1;
  } else {
    ts[n + 1] = permute(reshape(std::move(res.right_adjoint), {k, d, r}), {1, 0, 2});
    ComplexTensor m = std::move(res.left);  // (l*d, k)
    for (std::size_t i = 0; i < l * d; ++i)
      for (std::size_t j = 0; j < k; ++j) m.data()[i * k + j] *= res.singular_values[j];
    ts[n] = permute(reshape(std::move(m), {l, d, k}), {1, 0, 2});
    center = n;
  }
  max_dw = std::max(max_dw, res.discarded_weight);
  fid_est *= std::sqrt(std::max(0.0, 1.0 - res.discarded_weight));
}

void GaugeChain::apply_one_site(std::size_t n, const ComplexTensor& gate) {
  if (n >= ts.size()) throw Error("apply_one_site: site out of range");
  if (gate.rank() != 2 || gate.extent(0) != d || gate.extent(1) != d)
    throw Error("apply_one_site: expected a (d x d) matrix");
  ts[n] = contract(gate, ts[n], {{1, 0}});
}

void GaugeChain::normalize_center() {
  const double nrm = ts[center].norm();
  if (!(nrm > 1e-150)) throw Error("normalize: state has zero norm");
  for (auto& v : ts[center].data()) v /= nrm;
}

MpsState GaugeChain::to_canonical_state() {
  if (center != 0) throw Error("to_canonical_state: center must be at site 0");
  normalize_center();
  MpsState out;
  out.d = d;
  out.tensors = ts;
  out.canonical = true;
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------

MpsState canonicalize(const MpsState& psi) {
  psi.validate();
  auto ts = psi.tensors;
  for (std::size_t n = ts.size() - 1; n > 0; --n) {
    const std::size_t s = ts[n].extent(0), l = ts[n].extent(1), r = ts[n].extent(2);
    auto res = truncated_svd(reshape(permute(ts[n], {1, 0, 2}), {l, s * r}), detail::kNoCap);
    const std::size_t k = res.singular_values.size();
    ts[n] = permute(reshape(std::move(res.right_adjoint), {k, s, r}), {1, 0, 2});
    ComplexTensor m = std::move(res.left);  // (l, k), absorb the spectrum
    for (std::size_t i = 0; i < l; ++i)
      for (std::size_t j = 0; j < k; ++j) m.at(i, j) *= res.singular_values[j];
    ts[n - 1] = contract(ts[n - 1], m, {{2, 0}});
  }
  const double nrm = ts[0].norm();
  if (!(nrm > 1e-150)) throw Error("canonicalize: state has zero norm");
  for (auto& v : ts[0].data()) v /= nrm;

  MpsState out;
  out.d = psi.d;
  out.tensors = std::move(ts);
  out.canonical = true;
  return out;
}

namespace {

// one alternating-sweep pass maximizing |<phi|target>| at fixed bond dimensions
double refine_against(const MpsState& target, detail::GaugeChain& phi, int max_rounds,
                      double tol) {
  const std::size_t n = target.n_sites();
  std::vector<ComplexTensor> lenv(n + 1), renv(n + 1);
  ComplexTensor one({1, 1});
  one.at(0, 0) = 1.0;
  lenv[0] = one;
  renv[n] = one;
  for (std::size_t k = n; k-- > 1;) {
    auto t = contract(target.tensors[k], renv[k + 1], {{2, 1}});  // (s, alpha, b)
    renv[k] = contract(conjugate(phi.ts[k]), t, {{0, 0}, {2, 2}});
  }

  auto local = [&](std::size_t k) {
    auto t = contract(lenv[k], target.tensors[k], {{1, 1}});  // (a, s, beta)
    return permute(contract(t, renv[k + 1], {{2, 1}}), {1, 0, 2});  // (s, a, b)
  };
  auto update_l = [&](std::size_t k) {
    auto t = contract(lenv[k], target.tensors[k], {{1, 1}});  // (a, s, beta)
    lenv[k + 1] = contract(conjugate(phi.ts[k]), t, {{0, 1}, {1, 0}});
  };
  auto update_r = [&](std::size_t k) {
    auto t = contract(target.tensors[k], renv[k + 1], {{2, 1}});
    renv[k] = contract(conjugate(phi.ts[k]), t, {{0, 0}, {2, 2}});
  };

  double overlap = 0, prev = -1;
  for (int round = 0; round < max_rounds; ++round) {
    for (std::size_t k = 0; k < n; ++k) {
      auto e = local(k);
      const double nrm = e.norm();
      if (!(nrm > 1e-150)) throw Error("variational truncation collapsed to zero");
      for (auto& v : e.data()) v /= nrm;
      phi.ts[k] = std::move(e);
      phi.center = k;
      if (k + 1 < n) {
        phi.move_right(detail::kNoCap, kDefaultSvdCutoff);
        update_l(k);
      } else {
        overlap = nrm;
      }
    }
    for (std::size_t k = n; k-- > 0;) {
      auto e = local(k);
      const double nrm = e.norm();
      if (!(nrm > 1e-150)) throw Error("variational truncation collapsed to zero");
      for (auto& v : e.data()) v /= nrm;
      phi.ts[k] = std::move(e);
      phi.center = k;
      if (k > 0) {
        phi.move_left(detail::kNoCap, kDefaultSvdCutoff);
        update_r(k);
      } else {
        overlap = nrm;
      }
    }
    if (prev >= 0 && std::abs(overlap - prev) < tol) break;
    prev = overlap;
  }
  return overlap;
}

}  // namespace

TruncateResult truncate(const MpsState& psi, std::size_t chi_max, bool variational) {
  psi.validate();
  if (!psi.canonical) throw Error("truncate: expected a canonical state");
  if (chi_max == 0) throw Error("truncate: chi_max must be at least 1");
  if (psi.max_bond() <= chi_max) return {psi, 1.0};

  auto chain = detail::GaugeChain::from_canonical(psi);
  for (std::size_t k = 0; k + 1 < chain.ts.size(); ++k)
    chain.move_right(chi_max, kDefaultSvdCutoff);
  while (chain.center > 0) chain.move_left(detail::kNoCap, kDefaultSvdCutoff);

  double fid = chain.fid_est;
  if (variational) fid = refine_against(psi, chain, 5, 1e-10);
  TruncateResult out;
  out.state = chain.to_canonical_state();
  out.fidelity_estimate = fid;
  return out;
}

Complex inner(const MpsState& a, const MpsState& b) {
  a.validate();
  b.validate();
  if (a.d != b.d || a.n_sites() != b.n_sites())
    throw Error("inner: states live on different chains");
  ComplexTensor e({1, 1});
  e.at(0, 0) = 1.0;
  for (std::size_t n = 0; n < a.n_sites(); ++n) {
    auto t = contract(e, b.tensors[n], {{1, 1}});  // (chi_a, s, r)
    e = contract(conjugate(a.tensors[n]), t, {{0, 1}, {1, 0}});
  }
  return e.at(0, 0);
}

MpsState apply_two_site_gate(const MpsState& psi, std::size_t site, const ComplexTensor& gate,
                             std::size_t chi_cap) {
  psi.validate();
  if (!psi.canonical) throw Error("apply_two_site_gate: expected a canonical state");
  if (site + 1 >= psi.n_sites()) throw Error("apply_two_site_gate: site out of range");
  if (chi_cap == 0) throw Error("apply_two_site_gate: chi_cap must be at least 1");
  if (gate.rank() != 2 || gate.extent(0) != psi.d * psi.d || gate.extent(1) != psi.d * psi.d)
    throw Error("apply_two_site_gate: gate must be (d^2 x d^2)");
  if (unitarity_defect(gate) > 1e-8)
    throw Error("apply_two_site_gate: gate is not unitary within 1e-8");

  auto chain = detail::GaugeChain::from_canonical(psi);
  chain.move_to(site, detail::kNoCap, kDefaultSvdCutoff);
  chain.apply_gate(site, gate, chi_cap, kDefaultSvdCutoff, detail::CenterAfter::Left);
  while (chain.center > 0) chain.move_left(detail::kNoCap, kDefaultSvdCutoff);
  return chain.to_canonical_state();
}

ComplexTensor to_statevector(const MpsState& psi) {
  psi.validate();
  double bits = std::log2(double(psi.d)) * double(psi.n_sites());
  if (bits > 24.0 + 1e-9) throw Error("to_statevector: state is too large (limit d^n <= 2^24)");

  ComplexTensor cur({1, 1});
  cur.at(0, 0) = 1.0;
  for (const auto& a : psi.tensors) {
    const std::size_t big = cur.extent(0);
    auto t = contract(cur, a, {{1, 1}});  // (big, s, r)
    cur = reshape(std::move(t), {big * a.extent(0), a.extent(2)});
  }
  const std::size_t dim = cur.extent(0);
  return reshape(std::move(cur), {dim});
}

double entanglement_entropy(const MpsState& psi, std::size_t bond) {
  psi.validate();
  if (!psi.canonical) throw Error("entanglement_entropy: expected a canonical state");
  if (bond + 1 >= psi.n_sites()) throw Error("entanglement_entropy: bond index out of range");

  auto chain = detail::GaugeChain::from_canonical(psi);
  chain.move_to(bond, detail::kNoCap, kDefaultSvdCutoff);
  const auto& a = chain.ts[bond];
  const std::size_t s = a.extent(0), l = a.extent(1), r = a.extent(2);
  auto res = truncated_svd(reshape(permute(a, {1, 0, 2}), {l * s, r}), detail::kNoCap, 0.0);

  double total = 0;
  for (double v : res.singular_values) total += v * v;
  if (!(total > 0)) throw Error("entanglement_entropy: zero-norm state");
  double ent = 0;
  for (double v : res.singular_values) {
    const double p = v * v / total;
    if (p > 1e-300) ent -= p * std::log(p);
  }
  return ent;
}

NlfValue global_entanglement_nlf(const MpsState& psi) {
  auto res = truncate(psi, 1);
  double ov = std::abs(inner(psi, res.state));
  ov = std::clamp(ov, 1e-300, 1.0);
  NlfValue f;
  f.value = std::max(0.0, -std::log(ov) / double(psi.n_sites()));
  return f;
}

MpsState ghz_mps(std::size_t n_sites) {
  if (n_sites < 2) throw Error("ghz_mps: need at least two sites");
  const double r = 1.0 / std::sqrt(2.0);
  MpsState psi;
  psi.d = 2;
  ComplexTensor first({2, 1, 2});
  first.at(0, 0, 0) = r;
  first.at(1, 0, 1) = r;
  psi.tensors.push_back(first);
  ComplexTensor bulk({2, 2, 2});
  bulk.at(0, 0, 0) = 1.0;
  bulk.at(1, 1, 1) = 1.0;
  for (std::size_t n = 1; n + 1 < n_sites; ++n) psi.tensors.push_back(bulk);
  ComplexTensor last({2, 2, 1});
  last.at(0, 0, 0) = 1.0;
  last.at(1, 1, 0) = 1.0;
  psi.tensors.push_back(last);
  psi.canonical = true;
  return psi;
}

MpsState product_mps(std::size_t d, const std::vector<std::size_t>& levels) {
  if (d < 2) throw Error("product_mps: physical dimension must be at least 2");
  if (levels.size() < 2) throw Error("product_mps: need at least two sites");
  MpsState psi;
  psi.d = d;
  for (auto lv : levels) {
    if (lv >= d) throw Error("product_mps: level out of range");
    ComplexTensor t({d, 1, 1});
    t.at(lv, 0, 0) = 1.0;
    psi.tensors.push_back(std::move(t));
  }
  psi.canonical = true;
  return psi;
}

MpsState random_mps(std::size_t n_sites, std::size_t d, std::size_t chi, std::uint64_t seed) {
  if (n_sites < 2) throw Error("random_mps: need at least two sites");
  if (d < 2) throw Error("random_mps: physical dimension must be at least 2");
  if (chi == 0) throw Error("random_mps: chi must be at least 1");
  std::mt19937_64 rng(seed);
  MpsState psi;
  psi.d = d;
  std::vector<std::size_t> bonds(n_sites + 1, 1);
  for (std::size_t k = 1; k < n_sites; ++k)
    bonds[k] = std::min(chi, std::min(capped_power(d, k, chi), capped_power(d, n_sites - k, chi)));
  for (std::size_t n = 0; n < n_sites; ++n)
    psi.tensors.push_back(random_gaussian({d, bonds[n], bonds[n + 1]}, rng));
  return canonicalize(psi);
}

}  // namespace mpdc
