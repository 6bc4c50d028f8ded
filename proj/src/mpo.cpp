#include <mpdc/models.hpp>

#include <array>
#include <cmath>

#include "dense_detail.hpp"

namespace mpdc {

namespace {

using Op2 = std::array<std::array<Complex, 2>, 2>;

constexpr Op2 kSx{{{Complex(0, 0), Complex(0.5, 0)}, {Complex(0.5, 0), Complex(0, 0)}}};
constexpr Op2 kSy{{{Complex(0, 0), Complex(0, -0.5)}, {Complex(0, 0.5), Complex(0, 0)}}};
constexpr Op2 kSz{{{Complex(0.5, 0), Complex(0, 0)}, {Complex(0, 0), Complex(-0.5, 0)}}};
constexpr Op2 kId{{{Complex(1, 0), Complex(0, 0)}, {Complex(0, 0), Complex(1, 0)}}};

Op2 scaled(const Op2& op, double f) {
  Op2 out = op;
  for (auto& row : out)
    for (auto& v : row) v *= f;
  return out;
}

void put_block(ComplexTensor& w, std::size_t ml, std::size_t mr, const Op2& op) {
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) w.at(i, j, ml, mr) = op[i][j];
}

// lower-triangular bulk tensor; first site = bottom row, last site = first column
ComplexTensor bulk_tensor(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::TransverseIsing: {
      ComplexTensor w({2, 2, 3, 3});
      put_block(w, 0, 0, kId);
      put_block(w, 1, 0, kSz);
      put_block(w, 2, 0, scaled(kSx, -spec.hx));
      put_block(w, 2, 1, kSz);
      put_block(w, 2, 2, kId);
      return w;
    }
    case ModelKind::Heisenberg: {
      ComplexTensor w({2, 2, 5, 5});
      put_block(w, 0, 0, kId);
      put_block(w, 1, 0, kSx);
      put_block(w, 2, 0, kSy);
      put_block(w, 3, 0, kSz);
      put_block(w, 4, 1, kSx);
      put_block(w, 4, 2, kSy);
      put_block(w, 4, 3, kSz);
      put_block(w, 4, 4, kId);
      return w;
    }
    case ModelKind::XY: {
      ComplexTensor w({2, 2, 4, 4});
      put_block(w, 0, 0, kId);
      put_block(w, 1, 0, kSx);
      put_block(w, 2, 0, kSy);
      put_block(w, 3, 1, kSx);
      put_block(w, 3, 2, kSy);
      put_block(w, 3, 3, kId);
      return w;
    }
  }
  throw Error("build_mpo: unknown model");
}

// shared accumulation of the explicit term sum; add(row, col, value)
template <typename Add>
void accumulate_dense_terms(const ModelSpec& spec, Add&& add) {
  const std::size_t n = spec.n_sites;
  const std::size_t dim = std::size_t(1) << n;
  auto bit = [n](std::size_t x, std::size_t site) { return (x >> (n - 1 - site)) & 1; };
  auto with_bit = [n](std::size_t x, std::size_t site, std::size_t v) {
    const std::size_t mask = std::size_t(1) << (n - 1 - site);
    return (x & ~mask) | (v ? mask : 0);
  };

  std::vector<std::pair<Op2, Op2>> bond_terms;
  switch (spec.kind) {
    case ModelKind::TransverseIsing:
      bond_terms = {{kSz, kSz}};
      break;
    case ModelKind::Heisenberg:
      bond_terms = {{kSx, kSx}, {kSy, kSy}, {kSz, kSz}};
      break;
    case ModelKind::XY:
      bond_terms = {{kSx, kSx}, {kSy, kSy}};
      break;
  }

  for (std::size_t site = 0; site + 1 < n; ++site)
    for (const auto& [op1, op2] : bond_terms)
      for (std::size_t r = 0; r < dim; ++r) {
        const std::size_t a = bit(r, site), b = bit(r, site + 1);
        for (std::size_t a2 = 0; a2 < 2; ++a2)
          for (std::size_t b2 = 0; b2 < 2; ++b2) {
            const Complex v = op1[a][a2] * op2[b][b2];
            if (v == Complex(0, 0)) continue;
            add(r, with_bit(with_bit(r, site, a2), site + 1, b2), v);
          }
      }

  if (spec.kind == ModelKind::TransverseIsing && spec.hx != 0.0)
    for (std::size_t site = 0; site < n; ++site)
      for (std::size_t r = 0; r < dim; ++r) {
        const std::size_t a = bit(r, site);
        for (std::size_t a2 = 0; a2 < 2; ++a2) {
          const Complex v = -spec.hx * kSx[a][a2];
          if (v == Complex(0, 0)) continue;
          add(r, with_bit(r, site, a2), v);
        }
      }
}

}  // namespace

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::TransverseIsing:
      return "ising";
    case ModelKind::Heisenberg:
      return "heisenberg";
    case ModelKind::XY:
      return "xy";
  }
  throw Error("model_name: unknown model");
}

ModelKind parse_model(const std::string& name) {
  if (name == "ising") return ModelKind::TransverseIsing;
  if (name == "heisenberg") return ModelKind::Heisenberg;
  if (name == "xy") return ModelKind::XY;
  throw Error("unknown model '" + name + "' (expected ising, heisenberg or xy)");
}

void ModelSpec::validate() const {
  if (n_sites < 2) throw Error("ModelSpec: need at least two sites");
  if (!std::isfinite(hx)) throw Error("ModelSpec: hx must be finite");
}

void Mpo::validate() const {
  if (site_ops.size() < 2) throw Error("Mpo: need at least two sites");
  for (std::size_t n = 0; n < site_ops.size(); ++n) {
    const auto& w = site_ops[n];
    if (w.rank() != 4) throw Error("Mpo: site tensor must be rank 4");
    if (w.extent(0) != d || w.extent(1) != d) throw Error("Mpo: physical extent mismatch");
  }
  if (site_ops.front().extent(2) != 1 || site_ops.back().extent(3) != 1)
    throw Error("Mpo: boundary bonds must have extent 1");
  for (std::size_t n = 0; n + 1 < site_ops.size(); ++n)
    if (site_ops[n].extent(3) != site_ops[n + 1].extent(2))
      throw Error("Mpo: bond mismatch between sites " + std::to_string(n) + " and " +
                  std::to_string(n + 1));
}

Mpo build_mpo(const ModelSpec& spec) {
  spec.validate();
  const ComplexTensor bulk = bulk_tensor(spec);
  const std::size_t dm = bulk.extent(2);

  ComplexTensor first({2, 2, 1, dm});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t c = 0; c < dm; ++c) first.at(i, j, 0, c) = bulk.at(i, j, dm - 1, c);
  ComplexTensor last({2, 2, dm, 1});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t r = 0; r < dm; ++r) last.at(i, j, r, 0) = bulk.at(i, j, r, 0);

  Mpo mpo;
  mpo.d = 2;
  mpo.site_ops.push_back(std::move(first));
  for (std::size_t n = 1; n + 1 < spec.n_sites; ++n) mpo.site_ops.push_back(bulk);
  mpo.site_ops.push_back(std::move(last));
  return mpo;
}

ComplexTensor mpo_to_dense(const Mpo& mpo) {
  mpo.validate();
  if (mpo.n_sites() > 10) throw Error("mpo_to_dense: limited to 10 sites");
  ComplexTensor cur({1, 1, 1});
  cur.at(0, 0, 0) = 1.0;
  for (const auto& w : mpo.site_ops) {
    const std::size_t big = cur.extent(0);
    auto t = permute(contract(cur, w, {{2, 2}}), {0, 2, 1, 3, 4});  // (O, o, I, i, mr)
    cur = reshape(std::move(t), {big * mpo.d, big * mpo.d, w.extent(3)});
  }
  const std::size_t dim = cur.extent(0);
  return reshape(std::move(cur), {dim, dim});
}

double mpo_expectation(const Mpo& mpo, const MpsState& psi) {
  mpo.validate();
  psi.validate();
  if (!psi.canonical) throw Error("mpo_expectation: expected a canonical state");
  if (mpo.n_sites() != psi.n_sites() || mpo.d != psi.d)
    throw Error("mpo_expectation: operator and state live on different chains");

  ComplexTensor e({1, 1, 1});  // (bra bond, mpo bond, ket bond)
  e.at(0, 0, 0) = 1.0;
  for (std::size_t n = 0; n < psi.n_sites(); ++n) {
    const auto& a = psi.tensors[n];
    auto t1 = contract(e, a, {{2, 1}});                            // (a', m, s, b)
    auto t2 = contract(t1, mpo.site_ops[n], {{1, 2}, {2, 1}});     // (a', b, s', mr)
    e = permute(contract(conjugate(a), t2, {{0, 2}, {1, 0}}), {0, 2, 1});  // (b', mr, b)
  }
  const Complex val = e.at(0, 0, 0);
  if (std::abs(val.imag()) > 1e-8 * (1.0 + std::abs(val.real())))
    throw Error("mpo_expectation: expectation value is not real");
  return val.real();
}

ComplexTensor dense_hamiltonian(const ModelSpec& spec) {
  spec.validate();
  if (spec.n_sites > 12) throw Error("dense_hamiltonian: limited to 12 sites");
  const std::size_t dim = std::size_t(1) << spec.n_sites;
  ComplexTensor h({dim, dim});
  accumulate_dense_terms(spec,
                         [&](std::size_t r, std::size_t c, Complex v) { h.at(r, c) += v; });
  return h;
}

namespace detail {

// real symmetric form of the dense Hamiltonian (all three models are real)
Eigen::MatrixXd dense_hamiltonian_real(const ModelSpec& spec) {
  const std::size_t dim = std::size_t(1) << spec.n_sites;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  accumulate_dense_terms(spec, [&](std::size_t r, std::size_t c, Complex v) {
    if (std::abs(v.imag()) > 1e-14)
      throw Error("dense_hamiltonian_real: encountered a complex term");
    h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += v.real();
  });
  return h;
}

}  // namespace detail

}  // namespace mpdc
