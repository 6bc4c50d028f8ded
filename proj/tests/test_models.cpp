#include <doctest.h>

#include <mpdc/models.hpp>

#include <cmath>

using namespace mpdc;

namespace {

// energies frozen from an independent dense diagonalization (see notes): all
// models are open chains of spin-1/2 operators S = sigma/2
constexpr double kIsingN2 = -0.25;
constexpr double kHeisN2 = -0.75;
constexpr double kXyN2 = -0.5;
constexpr double kHeisN4 = -1.616025403784439;
constexpr double kXyN4 = -1.118033988749895;  // -sqrt(5)/2
constexpr double kIsingN6Hx05 = -1.824057452639685;
constexpr double kHeisN6 = -2.493577133887922;
constexpr double kIsingN10Hx05 = -3.095372499913703;

double max_abs(const ComplexTensor& a, const ComplexTensor& b) {
  REQUIRE(a.shape() == b.shape());
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

ModelSpec spec_of(ModelKind kind, std::size_t n, double hx = 0.0) {
  ModelSpec s;
  s.kind = kind;
  s.n_sites = n;
  s.hx = hx;
  return s;
}

}  // namespace

TEST_CASE("MPO contraction agrees with the explicit dense sum") {
  for (auto kind : {ModelKind::TransverseIsing, ModelKind::Heisenberg, ModelKind::XY}) {
    for (std::size_t n : {std::size_t(2), std::size_t(3), std::size_t(5)}) {
      const double hx = kind == ModelKind::TransverseIsing ? 0.7 : 0.0;
      auto spec = spec_of(kind, n, hx);
      auto dense_from_mpo = mpo_to_dense(build_mpo(spec));
      auto dense = dense_hamiltonian(spec);
      CHECK(max_abs(dense_from_mpo, dense) < 1e-12);
    }
  }
}

TEST_CASE("dense Hamiltonians are hermitian and real") {
  auto h = dense_hamiltonian(spec_of(ModelKind::Heisenberg, 4));
  const std::size_t dim = h.extent(0);
  double dev = 0, im = 0;
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      dev = std::max(dev, std::abs(h.at(r, c) - std::conj(h.at(c, r))));
      im = std::max(im, std::abs(h.at(r, c).imag()));
    }
  CHECK(dev < 1e-12);
  CHECK(im < 1e-12);
}

TEST_CASE("MPO shape invariants") {
  auto mpo = build_mpo(spec_of(ModelKind::Heisenberg, 5));
  mpo.validate();
  CHECK(mpo.n_sites() == 5);
  CHECK(mpo.site_ops.front().extent(2) == 1);
  CHECK(mpo.site_ops.back().extent(3) == 1);
  CHECK(mpo.site_ops[1].extent(2) == 5);  // heisenberg bond dimension
  CHECK(build_mpo(spec_of(ModelKind::TransverseIsing, 4)).site_ops[1].extent(2) == 3);
  CHECK(build_mpo(spec_of(ModelKind::XY, 4)).site_ops[1].extent(2) == 4);
  CHECK_THROWS_AS(build_mpo(spec_of(ModelKind::XY, 1)), Error);
}

TEST_CASE("exact_ground_state reproduces frozen energies") {
  CHECK(exact_ground_state(spec_of(ModelKind::TransverseIsing, 2)).energy ==
        doctest::Approx(kIsingN2).epsilon(1e-10));
  CHECK(exact_ground_state(spec_of(ModelKind::Heisenberg, 2)).energy ==
        doctest::Approx(kHeisN2).epsilon(1e-10));
  CHECK(exact_ground_state(spec_of(ModelKind::XY, 2)).energy ==
        doctest::Approx(kXyN2).epsilon(1e-10));
  CHECK(exact_ground_state(spec_of(ModelKind::Heisenberg, 4)).energy ==
        doctest::Approx(kHeisN4).epsilon(1e-10));
  CHECK(exact_ground_state(spec_of(ModelKind::XY, 4)).energy ==
        doctest::Approx(kXyN4).epsilon(1e-10));
  CHECK(exact_ground_state(spec_of(ModelKind::TransverseIsing, 6, 0.5)).energy ==
        doctest::Approx(kIsingN6Hx05).epsilon(1e-10));
  CHECK(exact_ground_state(spec_of(ModelKind::Heisenberg, 6)).energy ==
        doctest::Approx(kHeisN6).epsilon(1e-10));
  CHECK(exact_ground_state(spec_of(ModelKind::TransverseIsing, 10, 0.5)).energy ==
        doctest::Approx(kIsingN10Hx05).epsilon(1e-10));
}

TEST_CASE("exact_ground_state returns a true eigenpair") {
  auto spec = spec_of(ModelKind::TransverseIsing, 6, 0.5);
  auto res = exact_ground_state(spec);
  auto h = dense_hamiltonian(spec);
  const std::size_t dim = h.extent(0);
  REQUIRE(res.state.size() == dim);

  double nrm2 = 0;
  for (std::size_t i = 0; i < dim; ++i) nrm2 += std::norm(res.state.data()[i]);
  CHECK(std::abs(nrm2 - 1.0) < 1e-10);

  double resid = 0;
  for (std::size_t r = 0; r < dim; ++r) {
    Complex hv = 0;
    for (std::size_t c = 0; c < dim; ++c) hv += h.at(r, c) * res.state.data()[c];
    resid = std::max(resid, std::abs(hv - res.energy * res.state.data()[r]));
  }
  CHECK(resid < 1e-9);

  CHECK_THROWS_AS(exact_ground_state(spec_of(ModelKind::XY, 16)), Error);
}

TEST_CASE("mpo_expectation on GHZ matches the analytic Ising value") {
  // <GHZ| sum SzSz - hx sum Sx |GHZ> = (N-1)/4 for any hx
  auto mpo = build_mpo(spec_of(ModelKind::TransverseIsing, 5, 0.3));
  CHECK(mpo_expectation(mpo, ghz_mps(5)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dmrg solves the two-site problem exactly") {
  DmrgOptions opt;
  opt.chi = 2;
  auto res = dmrg_ground_state(spec_of(ModelKind::TransverseIsing, 2), opt);
  CHECK(res.energy == doctest::Approx(kIsingN2).epsilon(1e-10));
  CHECK(res.converged);
  CHECK(dmrg_ground_state(spec_of(ModelKind::Heisenberg, 2), opt).energy ==
        doctest::Approx(kHeisN2).epsilon(1e-10));
  CHECK(dmrg_ground_state(spec_of(ModelKind::XY, 2), opt).energy ==
        doctest::Approx(kXyN2).epsilon(1e-10));
}

TEST_CASE("dmrg matches frozen energies on small chains") {
  DmrgOptions opt;
  opt.chi = 8;
  CHECK(dmrg_ground_state(spec_of(ModelKind::Heisenberg, 4), opt).energy ==
        doctest::Approx(kHeisN4).epsilon(1e-9));
  CHECK(dmrg_ground_state(spec_of(ModelKind::XY, 4), opt).energy ==
        doctest::Approx(kXyN4).epsilon(1e-9));
  opt.chi = 16;
  auto res = dmrg_ground_state(spec_of(ModelKind::TransverseIsing, 6, 0.5), opt);
  CHECK(res.energy == doctest::Approx(kIsingN6Hx05).epsilon(1e-9));
  CHECK(res.state.canonical);
  CHECK(res.state.max_canonical_residual() < 1e-10);
}

TEST_CASE("dmrg state overlaps the exact ground state") {
  auto spec = spec_of(ModelKind::TransverseIsing, 8, 0.5);
  DmrgOptions opt;
  opt.chi = 16;
  auto res = dmrg_ground_state(spec, opt);
  auto exact = exact_ground_state(spec);
  CHECK(std::abs(res.energy - exact.energy) < 1e-9 * std::abs(exact.energy));

  auto sv = to_statevector(res.state);
  Complex ov = 0;
  for (std::size_t i = 0; i < sv.size(); ++i)
    ov += std::conj(sv.data()[i]) * exact.state.data()[i];
  CHECK(std::abs(ov) >= 1.0 - 1e-8);
}

TEST_CASE("dmrg sweep energies are variational and monotone") {
  auto spec = spec_of(ModelKind::TransverseIsing, 6, 0.5);
  DmrgOptions opt;
  opt.chi = 16;  // large enough that truncation never bites at N=6
  auto res = dmrg_ground_state(spec, opt);
  REQUIRE(!res.sweep_energies.empty());
  for (double e : res.sweep_energies) CHECK(e >= kIsingN6Hx05 - 1e-10);
  for (std::size_t s = 1; s < res.sweep_energies.size(); ++s)
    CHECK(res.sweep_energies[s] <= res.sweep_energies[s - 1] + 1e-12);
  CHECK(res.sweeps == int(res.sweep_energies.size()));
}

TEST_CASE("dmrg is deterministic per seed") {
  auto spec = spec_of(ModelKind::Heisenberg, 6);
  DmrgOptions opt;
  opt.chi = 8;
  auto a = dmrg_ground_state(spec, opt);
  auto b = dmrg_ground_state(spec, opt);
  CHECK(a.energy == b.energy);
  REQUIRE(a.state.tensors.size() == b.state.tensors.size());
  for (std::size_t n = 0; n < a.state.tensors.size(); ++n) {
    REQUIRE(a.state.tensors[n].shape() == b.state.tensors[n].shape());
    for (std::size_t i = 0; i < a.state.tensors[n].size(); ++i)
      CHECK(a.state.tensors[n].data()[i] == b.state.tensors[n].data()[i]);
  }
  CHECK(a.energy == doctest::Approx(kHeisN6).epsilon(1e-9));

  opt.seed = 1234;
  auto c = dmrg_ground_state(spec, opt);
  CHECK(c.energy == doctest::Approx(kHeisN6).epsilon(1e-9));
}

TEST_CASE("model name round trip") {
  CHECK(model_name(ModelKind::TransverseIsing) == "ising");
  CHECK(model_name(ModelKind::Heisenberg) == "heisenberg");
  CHECK(model_name(ModelKind::XY) == "xy");
  CHECK(parse_model("ising") == ModelKind::TransverseIsing);
  CHECK(parse_model("heisenberg") == ModelKind::Heisenberg);
  CHECK(parse_model("xy") == ModelKind::XY);
  CHECK_THROWS_AS(parse_model("sherrington-kirkpatrick"), Error);
}
