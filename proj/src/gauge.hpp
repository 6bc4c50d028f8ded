#pragma once

// Internal mixed-gauge chain used by truncation, gate application and the
// disentangler sweeps. Sites left of `center` are left-isometric, sites right
// of it are right-isometric; the center tensor carries the (unit) norm.

#include <mpdc/mps.hpp>

#include <limits>

namespace mpdc::detail {

inline constexpr std::size_t kNoCap = std::numeric_limits<std::size_t>::max();

enum class CenterAfter { Left, Right };

struct GaugeChain {
  std::size_t d = 2;
  std::vector<ComplexTensor> ts;
  std::size_t center = 0;
  double max_dw = 0.0;     // largest discarded weight over all splits
  double fid_est = 1.0;    // product of sqrt(1 - dw)

  static GaugeChain from_canonical(const MpsState& psi);

  void move_right(std::size_t cap, double cutoff);
  void move_left(std::size_t cap, double cutoff);
  void move_to(std::size_t target, std::size_t cap, double cutoff);

  // two-site gate (d^2 x d^2) on (n, n+1); center must sit on one of them
  void apply_gate(std::size_t n, const ComplexTensor& gate, std::size_t cap, double cutoff,
                  CenterAfter after);
  // one-site unitary (d x d) on n; preserves the gauge, any center
  void apply_one_site(std::size_t n, const ComplexTensor& gate);

  void normalize_center();
  MpsState to_canonical_state();  // center must be 0
};

}  // namespace mpdc::detail
