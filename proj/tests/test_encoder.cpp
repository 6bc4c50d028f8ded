#include <doctest.h>

#include <mpdc/encoder.hpp>
#include <mpdc/models.hpp>

#include <cmath>

using namespace mpdc;

namespace {

MpsState zeros(std::size_t n) { return product_mps(2, std::vector<std::size_t>(n, 0)); }

}  // namespace

TEST_CASE("GHZ is encoded exactly at depth one") {
  auto psi = ghz_mps(8);
  auto [circ, rep] = encode(psi, 1, 8);
  circ.validate();
  REQUIRE(rep.nlf.size() == 2);
  CHECK(rep.nlf[0] == doctest::Approx(std::log(2.0) / 16.0).epsilon(1e-10));
  CHECK(rep.nlf[1] <= 1e-10);
  CHECK(rep.nlf_reverse <= 1e-10);
  CHECK(rep.input_max_bond == 2);

  auto gen = evolve_circuit(circ, 8);
  CHECK(std::abs(std::abs(inner(psi, gen)) - 1.0) < 1e-12);
}

TEST_CASE("chi=d inputs stay exact at every depth") {
  auto psi = random_mps(10, 2, 2, 77);
  auto [circ, rep] = encode(psi, 3, 16);
  for (std::size_t t = 1; t < rep.nlf.size(); ++t) CHECK(rep.nlf[t] <= 1e-10);
  CHECK(rep.nlf_reverse <= 1e-10);
}

TEST_CASE("the depth-1 sub-circuit regenerates the first truncated state") {
  // pins the layer order: the layer built first is applied last when
  // generating, so the depth-1 suffix is exactly that first layer
  auto psi = random_mps(9, 2, 8, 31);
  auto tilde = truncate(psi, 2).state;
  auto [circ, rep] = encode(psi, 3, 16);
  auto phi1 = evolve_circuit(circ, 16, 1);
  CHECK(std::abs(std::abs(inner(tilde, phi1)) - 1.0) < 1e-10);

  // and the reported depth-1 value is the overlap with the target
  const double want = -std::log(std::abs(inner(psi, phi1))) / 9.0;
  CHECK(rep.nlf[1] == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("per-depth values are depth-budget independent") {
  auto psi = dmrg_ground_state({ModelKind::TransverseIsing, 10, 0.5}).state;
  auto [c1, r1] = encode(psi, 1, 32);
  auto [c3, r3] = encode(psi, 3, 32);
  CHECK(r1.nlf[1] == doctest::Approx(r3.nlf[1]).epsilon(1e-12));
  CHECK(r1.nlf[0] == r3.nlf[0]);

  // matrices of the single layer coincide with the last generation layer
  const auto& a = c1.layers[0].two_site_gates[3];
  const auto& b = c3.layers[2].two_site_gates[3];
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("deeper circuits improve a critical ground state") {
  auto psi = dmrg_ground_state({ModelKind::TransverseIsing, 12, 0.5}).state;
  auto [circ, rep] = encode(psi, 4, 32);
  CHECK(rep.nlf[1] < rep.nlf[0]);                       // one layer beats product states
  for (std::size_t t = 2; t < rep.nlf.size(); ++t)      // safe regime: monotone
    CHECK(rep.nlf[t] <= rep.nlf[t - 1] + 1e-9);
  CHECK(rep.nlf[4] < 0.5 * rep.nlf[0]);
}

TEST_CASE("fidelity helpers agree with the report") {
  auto psi = dmrg_ground_state({ModelKind::TransverseIsing, 8, 0.5}).state;
  auto [circ, rep] = encode(psi, 2, 16);
  CHECK(fidelity_nlf(circ, psi, 16).value == doctest::Approx(rep.nlf[2]).epsilon(1e-12));
  CHECK(fidelity_nlf_reverse(circ, psi, 16).value ==
        doctest::Approx(rep.nlf_reverse).epsilon(1e-12));
}

TEST_CASE("parameter accounting") {
  auto psi = random_mps(8, 2, 4, 5);
  auto [circ, rep] = encode(psi, 2, 8);
  CHECK(rep.mps_params_per_site == 2 * 4 * 4);   // d * chi^2
  CHECK(rep.circuit_params_per_site == 2 * 16);  // n_layers * d^4
  CHECK(rep.n_layers == 2);
  CHECK(rep.chi_tilde == 8);
  REQUIRE(rep.max_discarded.size() == 3);
  CHECK(rep.max_discarded[0] == 0.0);
  REQUIRE(rep.seconds.size() == 3);
}

TEST_CASE("encode is deterministic") {
  auto psi = random_mps(7, 2, 4, 41);
  auto [c1, r1] = encode(psi, 2, 8);
  auto [c2, r2] = encode(psi, 2, 8);
  for (std::size_t t = 0; t < r1.nlf.size(); ++t) CHECK(r1.nlf[t] == r2.nlf[t]);
  for (std::size_t l = 0; l < c1.layers.size(); ++l) {
    for (std::size_t g = 0; g < c1.layers[l].two_site_gates.size(); ++g) {
      const auto& ga = c1.layers[l].two_site_gates[g];
      const auto& gb = c2.layers[l].two_site_gates[g];
      for (std::size_t i = 0; i < ga.size(); ++i) CHECK(ga.data()[i] == gb.data()[i]);
    }
    for (std::size_t i = 0; i < c1.layers[l].final_gate.size(); ++i)
      CHECK(c1.layers[l].final_gate.data()[i] == c2.layers[l].final_gate.data()[i]);
  }
}

TEST_CASE("encode input contract") {
  auto psi = random_mps(6, 2, 4, 51);
  CHECK_THROWS_AS(encode(psi, 0, 8), Error);
  CHECK_THROWS_AS(encode(psi, 2, 1), Error);  // cap below d
  MpsState raw = psi;
  raw.canonical = false;
  CHECK_THROWS_AS(encode(raw, 1, 8), Error);

  auto [circ, rep] = encode(psi, 2, 8);
  CHECK_THROWS_AS(evolve_circuit(circ, 0), Error);
  CHECK_THROWS_AS(evolve_circuit(circ, 8, 3), Error);  // deeper than the circuit
}

TEST_CASE("disentangled residual matches a manual sweep") {
  auto psi = random_mps(8, 2, 8, 61);
  auto [circ, rep] = encode(psi, 2, 16);

  MpsState cur = psi;
  for (std::size_t i = circ.layers.size(); i-- > 0;)
    cur = apply_layer(circ.layers[i], cur, LayerDirection::Disentangle, 16, nullptr);
  const double want = -std::log(std::abs(inner(zeros(8), cur))) / 8.0;
  CHECK(rep.nlf_reverse == doctest::Approx(want).epsilon(1e-10));
}
