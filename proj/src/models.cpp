#include <mpdc/models.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "dense_detail.hpp"
#include "lanczos.hpp"

namespace mpdc {

namespace {

using Eigen::VectorXcd;
using Eigen::VectorXd;

ComplexTensor update_left_env(const ComplexTensor& lenv, const ComplexTensor& a,
                              const ComplexTensor& w) {
  auto t1 = contract(lenv, a, {{2, 1}});             // (a', m, s, b)
  auto t2 = contract(t1, w, {{1, 2}, {2, 1}});       // (a', b, s', mr)
  return permute(contract(conjugate(a), t2, {{0, 2}, {1, 0}}), {0, 2, 1});  // (b', mr, b)
}

ComplexTensor update_right_env(const ComplexTensor& renv, const ComplexTensor& a,
                               const ComplexTensor& w) {
  auto t1 = contract(a, renv, {{2, 2}});             // (s, a, b', m)
  auto t2 = contract(w, t1, {{1, 0}, {3, 3}});       // (s', ml, a, b')
  return contract(conjugate(a), t2, {{0, 0}, {2, 3}});  // (a', ml, a)
}

ComplexTensor trivial_env() {
  ComplexTensor e({1, 1, 1});
  e.at(0, 0, 0) = 1.0;
  return e;
}

}  // namespace

DmrgResult dmrg_ground_state(const ModelSpec& spec, const DmrgOptions& opt) {
  spec.validate();
  if (opt.chi == 0) throw Error("dmrg: chi must be at least 1");
  if (opt.max_sweeps < 1) throw Error("dmrg: need at least one sweep");

  const auto mpo = build_mpo(spec);
  const std::size_t n = spec.n_sites;
  const std::size_t d = mpo.d;

  const std::size_t chi0 = opt.bond_ramp ? std::min<std::size_t>(opt.chi, 8) : opt.chi;
  MpsState psi = random_mps(n, d, chi0, opt.seed);
  auto ts = psi.tensors;

  std::vector<ComplexTensor> lenv(n + 1), renv(n + 1);
  lenv[0] = trivial_env();
  renv[n] = trivial_env();
  for (std::size_t k = n; k-- > 1;) renv[k] = update_right_env(renv[k + 1], ts[k], mpo.site_ops[k]);

  auto solve_window = [&](std::size_t p, std::size_t cap, bool to_right) {
    const auto& w1 = mpo.site_ops[p];
    const auto& w2 = mpo.site_ops[p + 1];
    const auto& le = lenv[p];
    const auto& re = renv[p + 2];
    const std::size_t l = ts[p].extent(1), r = ts[p + 1].extent(2);

    auto matvec = [&](const VectorXcd& x, VectorXcd& y) {
      ComplexTensor th({l, d, d, r},
                       std::vector<Complex>(x.data(), x.data() + x.size()));
      auto t1 = contract(le, th, {{2, 0}});            // (a', m, s, t, b)
      auto t2 = contract(t1, w1, {{1, 2}, {2, 1}});    // (a', t, b, s', m1)
      auto t3 = contract(t2, w2, {{1, 1}, {4, 2}});    // (a', b, s', t', m2)
      auto t4 = contract(t3, re, {{1, 2}, {4, 1}});    // (a', s', t', b')
      y = Eigen::Map<const VectorXcd>(t4.data().data(), t4.size());
    };

    auto theta0 = permute(contract(ts[p], ts[p + 1], {{2, 1}}), {1, 0, 2, 3});  // (l, s, t, r)
    VectorXcd v0 = Eigen::Map<const VectorXcd>(theta0.data().data(), theta0.size());
    auto eig = detail::lanczos_lowest(matvec, v0, opt.eigensolver_max_iter, opt.eigensolver_tol);

    ComplexTensor theta({l, d, d, r},
                        std::vector<Complex>(eig.vector.data(), eig.vector.data() + eig.vector.size()));
    auto res = truncated_svd(reshape(std::move(theta), {l * d, d * r}), cap, opt.cutoff);
    double ssum = 0;
    for (double s : res.singular_values) ssum += s * s;
    const double scale = std::sqrt(ssum);
    if (!(scale > 0)) throw Error("dmrg: zero-norm split");
    for (double& s : res.singular_values) s /= scale;
    const std::size_t k = res.singular_values.size();

    if (to_right) {
      ts[p] = permute(reshape(std::move(res.left), {l, d, k}), {1, 0, 2});
      ComplexTensor m = std::move(res.right_adjoint);  // (k, d*r)
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < d * r; ++j) m.data()[i * d * r + j] *= res.singular_values[i];
      ts[p + 1] = permute(reshape(std::move(m), {k, d, r}), {1, 0, 2});
      lenv[p + 1] = update_left_env(lenv[p], ts[p], w1);
    } else {
      ts[p + 1] = permute(reshape(std::move(res.right_adjoint), {k, d, r}), {1, 0, 2});
      ComplexTensor m = std::move(res.left);  // (l*d, k)
      for (std::size_t i = 0; i < l * d; ++i)
        for (std::size_t j = 0; j < k; ++j) m.data()[i * k + j] *= res.singular_values[j];
      ts[p] = permute(reshape(std::move(m), {l, d, k}), {1, 0, 2});
      renv[p + 1] = update_right_env(renv[p + 2], ts[p + 1], w2);
    }
    return eig.value;
  };

  DmrgResult out;
  double prev_e = std::numeric_limits<double>::quiet_NaN();
  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    const std::size_t cap =
        opt.bond_ramp ? std::min<std::size_t>(opt.chi, std::size_t(8) << (sweep - 1)) : opt.chi;
    double e_min = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p + 1 < n; ++p)
      e_min = std::min(e_min, solve_window(p, cap, true));
    for (std::size_t p = n - 1; p-- > 0;)
      e_min = std::min(e_min, solve_window(p, cap, false));

    out.sweep_energies.push_back(e_min);
    out.sweeps = sweep;
    if (cap == opt.chi && std::isfinite(prev_e) &&
        std::abs(e_min - prev_e) < opt.energy_tol * (1.0 + std::abs(e_min))) {
      out.converged = true;
      break;
    }
    prev_e = e_min;
  }

  const double nrm = ts[0].norm();
  if (!(nrm > 1e-150)) throw Error("dmrg: state collapsed to zero");
  for (auto& v : ts[0].data()) v /= nrm;

  out.state.d = d;
  out.state.tensors = std::move(ts);
  out.state.canonical = true;
  out.energy = mpo_expectation(mpo, out.state);
  return out;
}

ExactResult exact_ground_state(const ModelSpec& spec) {
  spec.validate();
  if (spec.n_sites > 14) throw Error("exact_ground_state: limited to 14 sites");
  const Eigen::MatrixXd h = detail::dense_hamiltonian_real(spec);
  const Eigen::Index dim = h.rows();

  std::mt19937_64 rng(20240811);
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXd v0(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v0(i) = g(rng);

  auto matvec = [&](const VectorXd& x, VectorXd& y) { y.noalias() = h * x; };
  auto eig = detail::lanczos_lowest(matvec, v0, 600, 1e-11);
  if (!eig.converged) throw Error("exact_ground_state: eigensolver did not converge");

  ExactResult out;
  out.energy = eig.value;
  out.state = ComplexTensor({static_cast<std::size_t>(dim)});
  for (Eigen::Index i = 0; i < dim; ++i) out.state.data()[i] = eig.vector(i);
  return out;
}

}  // namespace mpdc
