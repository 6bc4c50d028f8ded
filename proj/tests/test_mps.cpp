#include <doctest.h>

#include <mpdc/mps.hpp>

#include <cmath>
#include <random>

using namespace mpdc;

namespace {

MpsState raw_random_state(const std::vector<std::size_t>& bonds, std::size_t d,
                          std::uint64_t seed) {
  // bonds has n_sites+1 entries with bonds.front()==bonds.back()==1
  std::mt19937_64 rng(seed);
  MpsState psi;
  psi.d = d;
  for (std::size_t n = 0; n + 1 < bonds.size(); ++n)
    psi.tensors.push_back(random_gaussian({d, bonds[n], bonds[n + 1]}, rng));
  psi.canonical = false;
  return psi;
}

Complex vdot(const ComplexTensor& a, const ComplexTensor& b) {
  REQUIRE(a.size() == b.size());
  Complex s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.data()[i]) * b.data()[i];
  return s;
}

double sv_norm(const ComplexTensor& a) { return std::sqrt(std::abs(vdot(a, a))); }

// dense one/two-site operator embedding for the statevector oracle
ComplexTensor embed_two_site(const ComplexTensor& gate, std::size_t site, std::size_t n) {
  const std::size_t dim = std::size_t(1) << n;
  ComplexTensor op({dim, dim});
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) {
      const std::size_t rs = (r >> (n - site - 2)) & 3, cs = (c >> (n - site - 2)) & 3;
      const std::size_t rrest = r & ~(std::size_t(3) << (n - site - 2));
      const std::size_t crest = c & ~(std::size_t(3) << (n - site - 2));
      if (rrest != crest) continue;
      op.at(r, c) = gate.at(rs, cs);
    }
  return op;
}

ComplexTensor apply_dense(const ComplexTensor& op, const ComplexTensor& v) {
  ComplexTensor out({op.extent(0)});
  for (std::size_t r = 0; r < op.extent(0); ++r) {
    Complex s = 0;
    for (std::size_t c = 0; c < op.extent(1); ++c) s += op.at(r, c) * v.data()[c];
    out.data()[r] = s;
  }
  return out;
}

}  // namespace

TEST_CASE("ghz_mps builds the canonical GHZ state") {
  auto psi = ghz_mps(4);
  psi.validate();
  CHECK(psi.canonical);
  CHECK(psi.max_canonical_residual() < 1e-12);

  auto sv = to_statevector(psi);
  REQUIRE(sv.size() == 16);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(sv.data()[0] - r) < 1e-14);
  CHECK(std::abs(sv.data()[15] - r) < 1e-14);
  double rest = 0;
  for (std::size_t i = 1; i < 15; ++i) rest += std::abs(sv.data()[i]);
  CHECK(rest == 0.0);

  for (std::size_t b = 0; b < 3; ++b)
    CHECK(entanglement_entropy(psi, b) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  CHECK_THROWS_AS(ghz_mps(1), Error);
}

TEST_CASE("canonicalize fixes the gauge and preserves the ray") {
  auto raw = raw_random_state({1, 2, 4, 4, 2, 1}, 2, 7);
  auto sv_raw = to_statevector(raw);
  const double nrm = sv_norm(sv_raw);

  auto psi = canonicalize(raw);
  psi.validate();
  CHECK(psi.canonical);
  CHECK(psi.max_canonical_residual() < 1e-10);
  CHECK(std::abs(inner(psi, psi) - 1.0) < 1e-12);

  auto sv = to_statevector(psi);
  CHECK(std::abs(std::abs(vdot(sv, sv_raw)) / nrm - 1.0) < 1e-10);

  // idempotent up to numerical noise
  auto again = canonicalize(psi);
  CHECK(std::abs(std::abs(inner(again, psi)) - 1.0) < 1e-12);

  MpsState dead = raw;
  for (auto& t : dead.tensors)
    for (auto& v : t.data()) v = 0.0;
  CHECK_THROWS_AS(canonicalize(dead), Error);
}

TEST_CASE("inner agrees with the dense statevector oracle") {
  auto a = canonicalize(raw_random_state({1, 2, 4, 3, 2, 1}, 2, 21));
  auto b = canonicalize(raw_random_state({1, 2, 3, 4, 2, 1}, 2, 22));
  auto ov = inner(a, b);
  auto want = vdot(to_statevector(a), to_statevector(b));
  CHECK(std::abs(ov - want) < 1e-12);

  auto c = ghz_mps(6);
  CHECK_THROWS_AS(inner(a, c), Error);  // incompatible lengths
}

TEST_CASE("truncate reproduces known GHZ values") {
  SUBCASE("GHZ(20) to a product state") {
    auto res = truncate(ghz_mps(20), 1);
    CHECK(res.fidelity_estimate == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    CHECK(res.state.max_bond() == 1);
    CHECK(std::abs(std::abs(inner(res.state, res.state)) - 1.0) < 1e-12);
  }
  SUBCASE("no-op when bonds already fit") {
    auto psi = ghz_mps(8);
    auto res = truncate(psi, 4);
    CHECK(res.fidelity_estimate == 1.0);
    CHECK(std::abs(inner(res.state, psi) - 1.0) < 1e-13);
    REQUIRE(res.state.tensors.size() == psi.tensors.size());
    for (std::size_t n = 0; n < 8; ++n)
      CHECK(res.state.tensors[n].shape() == psi.tensors[n].shape());
  }
  SUBCASE("requires a canonical input") {
    auto raw = raw_random_state({1, 2, 2, 1}, 2, 31);
    CHECK_THROWS_AS(truncate(raw, 1), Error);
    CHECK_THROWS_AS(truncate(ghz_mps(4), 0), Error);
  }
}

TEST_CASE("truncate fidelity estimate is exact for a single truncated bond") {
  auto psi = canonicalize(raw_random_state({1, 2, 4, 2, 2, 2, 2, 2, 1}, 2, 41));
  REQUIRE(psi.bond_dim(1) == 4);  // the only bond above 2
  auto res = truncate(psi, 2);
  auto measured = std::abs(inner(psi, res.state));
  CHECK(res.fidelity_estimate == doctest::Approx(measured).epsilon(1e-10));
  CHECK(res.state.max_bond() <= 2);
}

TEST_CASE("variational truncation does at least as well as the direct sweep") {
  auto psi = canonicalize(raw_random_state({1, 2, 4, 8, 8, 4, 2, 1}, 2, 51));
  auto plain = truncate(psi, 3);
  auto refined = truncate(psi, 3, true);
  const double f_plain = std::abs(inner(psi, plain.state));
  const double f_ref = std::abs(inner(psi, refined.state));
  CHECK(f_ref >= f_plain - 1e-12);
  // for the variational path the estimate is the measured overlap itself
  CHECK(refined.fidelity_estimate == doctest::Approx(f_ref).epsilon(1e-10));
  CHECK(refined.state.max_canonical_residual() < 1e-10);
}

TEST_CASE("apply_two_site_gate matches the dense oracle") {
  // control-Z with a twist: entangling unitary
  ComplexTensor gate({4, 4});
  gate.at(0, 0) = 1;
  gate.at(1, 1) = Complex(0, 1);
  gate.at(2, 3) = 1;
  gate.at(3, 2) = Complex(std::cos(0.3), std::sin(0.3));

  auto psi = canonicalize(raw_random_state({1, 2, 3, 3, 2, 1}, 2, 61));
  for (std::size_t site = 0; site + 1 < 5; ++site) {
    auto out = apply_two_site_gate(psi, site, gate, 16);
    CHECK(out.canonical);
    CHECK(out.max_canonical_residual() < 1e-10);
    auto want = apply_dense(embed_two_site(gate, site, 5), to_statevector(psi));
    auto got = to_statevector(out);
    // same ray: compare overlap, both normalized
    CHECK(std::abs(std::abs(vdot(got, want)) - 1.0) < 1e-11);
  }
}

TEST_CASE("apply_two_site_gate validates its inputs") {
  auto psi = ghz_mps(4);
  ComplexTensor not_unitary({4, 4});
  for (std::size_t i = 0; i < 4; ++i) not_unitary.at(i, i) = 1.1;
  CHECK_THROWS_AS(apply_two_site_gate(psi, 0, not_unitary, 8), Error);
  CHECK_THROWS_AS(apply_two_site_gate(psi, 3, identity_matrix(4), 8), Error);  // site range
  CHECK_THROWS_AS(apply_two_site_gate(psi, 0, identity_matrix(4), 0), Error);  // bad cap
}

TEST_CASE("gate application under a tight bond cap stays normalized") {
  ComplexTensor had2({4, 4});  // H (x) H: spreads a product state without entangling
  const double h = 0.5;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      const int sr = ((r & 1) && (c & 1)) ? -1 : 1;
      const int sl = ((r & 2) && (c & 2)) ? -1 : 1;
      had2.at(r, c) = h * sr * sl;
    }
  REQUIRE(unitarity_defect(had2) < 1e-12);

  // entangler: CZ after H(x)H genuinely entangles, so chi_cap=1 truncates
  ComplexTensor cz = identity_matrix(4);
  cz.at(3, 3) = -1;
  auto theta = contract(cz, had2, {{1, 0}});

  auto psi = product_mps(2, {0, 0, 0, 0});
  auto out = apply_two_site_gate(psi, 1, theta, 1);
  CHECK(out.max_bond() == 1);
  CHECK(std::abs(inner(out, out) - 1.0) < 1e-12);
}

TEST_CASE("to_statevector refuses oversized chains") {
  std::vector<std::size_t> levels(25, 0);
  auto psi = product_mps(2, levels);
  CHECK_THROWS_AS(to_statevector(psi), Error);
}

TEST_CASE("entanglement entropy") {
  auto prod = product_mps(2, {0, 1, 0, 1});
  for (std::size_t b = 0; b < 3; ++b) CHECK(entanglement_entropy(prod, b) < 1e-12);
  CHECK_THROWS_AS(entanglement_entropy(prod, 3), Error);

  // entropy is gauge-measured, not shape-measured: padded bonds do not inflate it
  auto psi = canonicalize(raw_random_state({1, 2, 4, 2, 1}, 2, 71));
  const double s = entanglement_entropy(psi, 1);
  CHECK(s >= 0.0);
  CHECK(s <= std::log(4.0) + 1e-12);
}

TEST_CASE("global entanglement NLF frozen values") {
  CHECK(global_entanglement_nlf(ghz_mps(3)).value ==
        doctest::Approx(0.11552453009332421).epsilon(1e-10));  // ln(2)/6
  CHECK(global_entanglement_nlf(ghz_mps(6)).value ==
        doctest::Approx(std::log(2.0) / 6.0 / 2.0).epsilon(1e-10));  // ln(2)/12
  CHECK(global_entanglement_nlf(product_mps(2, {0, 1, 1, 0})).value ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("random_mps is deterministic per seed") {
  auto a = random_mps(6, 2, 4, 99);
  auto b = random_mps(6, 2, 4, 99);
  auto c = random_mps(6, 2, 4, 100);
  REQUIRE(a.tensors.size() == b.tensors.size());
  for (std::size_t n = 0; n < a.tensors.size(); ++n)
    for (std::size_t i = 0; i < a.tensors[n].size(); ++i)
      CHECK(a.tensors[n].data()[i] == b.tensors[n].data()[i]);
  CHECK(std::abs(inner(a, c)) < 1.0 - 1e-6);
  CHECK(a.canonical);
  CHECK(a.max_bond() == 4);
  CHECK(a.max_canonical_residual() < 1e-10);
}

TEST_CASE("canonical residual flags a broken gauge") {
  auto psi = ghz_mps(5);
  for (auto& v : psi.tensors[2].data()) v *= 1.1;
  CHECK(psi.max_canonical_residual() == doctest::Approx(0.21).epsilon(1e-10));
}

TEST_CASE("validate rejects malformed chains") {
  MpsState bad;
  bad.d = 2;
  bad.tensors.push_back(ComplexTensor({2, 1, 3}));
  bad.tensors.push_back(ComplexTensor({2, 2, 1}));  // bond mismatch 3 vs 2
  CHECK_THROWS_AS(bad.validate(), Error);

  MpsState open_edge;
  open_edge.d = 2;
  open_edge.tensors.push_back(ComplexTensor({2, 2, 2}));  // left boundary must be 1
  open_edge.tensors.push_back(ComplexTensor({2, 2, 1}));
  CHECK_THROWS_AS(open_edge.validate(), Error);
}
