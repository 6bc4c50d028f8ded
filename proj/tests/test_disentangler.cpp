#include <doctest.h>

#include <mpdc/disentangler.hpp>

#include <cmath>

using namespace mpdc;

namespace {

MpsState zeros(std::size_t n) { return product_mps(2, std::vector<std::size_t>(n, 0)); }

}  // namespace

TEST_CASE("a layer built from GHZ generates GHZ exactly") {
  auto psi = ghz_mps(6);
  auto layer = build_layer(psi);
  layer.validate();
  REQUIRE(layer.two_site_gates.size() == 5);

  ApplyStats stats;
  auto gen = apply_layer(layer, zeros(6), LayerDirection::Generate, 8, &stats);
  CHECK(std::abs(std::abs(inner(psi, gen)) - 1.0) < 1e-12);
  CHECK(stats.max_discarded_weight < 1e-20);

  auto dis = apply_layer(layer, psi, LayerDirection::Disentangle, 8, nullptr);
  CHECK(std::abs(std::abs(inner(zeros(6), dis)) - 1.0) < 1e-12);
}

TEST_CASE("chi=d states are encoded exactly by one layer") {
  for (std::uint64_t seed : {3u, 17u, 91u}) {
    auto psi = random_mps(8, 2, 2, seed);
    auto layer = build_layer(psi);

    ApplyStats stats;
    auto gen = apply_layer(layer, zeros(8), LayerDirection::Generate, 4, &stats);
    CHECK(std::abs(std::abs(inner(psi, gen)) - 1.0) < 1e-12);
    // generating onto the vacuum never needs more than bond dimension d
    CHECK(gen.max_bond() <= 2);
    CHECK(stats.fidelity_estimate >= 1.0 - 1e-12);
  }
}

TEST_CASE("built gates are unitary to machine precision") {
  auto layer = build_layer(random_mps(7, 2, 2, 5));
  auto rep = layer_unitarity_defect(layer);
  REQUIRE(rep.per_gate.size() == 7);  // 6 two-site + the final one-site
  for (double dft : rep.per_gate) CHECK(dft <= 1e-12);
  CHECK(rep.global < 0);  // not computed unless requested
}

TEST_CASE("the whole layer is unitary as a dense operator") {
  auto layer = build_layer(random_mps(6, 2, 2, 11));
  auto rep = layer_unitarity_defect(layer, true);
  CHECK(rep.global >= 0);
  CHECK(rep.global <= 1e-11);

  auto big = build_layer(random_mps(11, 2, 2, 12));
  CHECK_THROWS_AS(layer_unitarity_defect(big, true), Error);  // dense check capped at 10 sites
}

TEST_CASE("defect metric reports a scaled gate as |c^2-1|") {
  auto layer = build_layer(random_mps(5, 2, 2, 13));
  for (auto& v : layer.two_site_gates[2].data()) v *= 1.1;
  auto rep = layer_unitarity_defect(layer);
  CHECK(rep.per_gate[2] == doctest::Approx(0.21).epsilon(1e-12));
}

TEST_CASE("build_layer input contract") {
  CHECK_THROWS_AS(build_layer(random_mps(6, 2, 4, 1)), Error);  // bond 4 > d: truncate first
  MpsState raw = ghz_mps(5);
  raw.canonical = false;
  CHECK_THROWS_AS(build_layer(raw), Error);
}

TEST_CASE("disentangling is the adjoint of generating") {
  auto psi = random_mps(7, 2, 4, 23);
  auto layer = build_layer(truncate(psi, 2).state);

  // project U psi onto the vacuum == overlap of psi with the layer's own state
  auto u_psi = apply_layer(layer, psi, LayerDirection::Disentangle, 16, nullptr);
  const double p0 = std::abs(inner(zeros(7), u_psi));
  auto regen = apply_layer(layer, zeros(7), LayerDirection::Generate, 16, nullptr);
  const double want = std::abs(inner(regen, psi));
  CHECK(p0 == doctest::Approx(want).epsilon(1e-10));

  // round trip through the unitary restores the input
  auto back = apply_layer(layer, u_psi, LayerDirection::Generate, 32, nullptr);
  CHECK(std::abs(std::abs(inner(back, psi)) - 1.0) < 1e-10);
}

TEST_CASE("apply_layer records truncation under a tight cap") {
  auto psi = random_mps(6, 2, 4, 29);
  auto layer = build_layer(truncate(psi, 2).state);
  ApplyStats stats;
  auto out = apply_layer(layer, psi, LayerDirection::Disentangle, 1, &stats);
  CHECK(out.max_bond() == 1);
  CHECK(stats.max_discarded_weight > 1e-12);
  CHECK(stats.fidelity_estimate < 1.0);
  CHECK(std::abs(inner(out, out) - 1.0) < 1e-12);
}

TEST_CASE("apply_layer validates shapes") {
  auto layer = build_layer(ghz_mps(5));
  CHECK_THROWS_AS(apply_layer(layer, ghz_mps(6), LayerDirection::Generate, 4, nullptr), Error);
  layer.two_site_gates.pop_back();
  CHECK_THROWS_AS(layer.validate(), Error);
}
