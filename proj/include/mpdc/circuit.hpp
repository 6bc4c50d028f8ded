#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <mpdc/encoder.hpp>

namespace mpdc {

enum class GateKind { TwoQubit, OneQubit, MeasureReset, OutputMap };

// One gate of the unrolled circuit, in application order.
struct FlatGate {
  std::size_t layer = 0;  // generation layer, 0-based
  std::size_t site = 0;   // first site the gate touches
  GateKind kind = GateKind::TwoQubit;
  ComplexTensor matrix;  // (d^2, d^2) for TwoQubit, (d, d) for OneQubit
};

std::vector<FlatGate> flatten_gates(const EncodedCircuit& circuit);

// One entry of the wire-reuse program.  Gates carry their matrix; OutputMap
// marks that `wires[0]` now holds the finished output of `site`, and
// MeasureReset returns that wire to |0> so a later site can use it.
struct ScheduledOp {
  GateKind kind = GateKind::TwoQubit;
  std::size_t step = 0;   // pipeline stage; ops execute in stream order
  std::size_t layer = 0;  // generation layer for gates
  std::size_t site = 0;   // first site for gates, finished site for events
  std::array<std::size_t, 2> wires{0, 0};
  ComplexTensor matrix;
};

// Pipelined execution of a staircase circuit on n_layers + 2 wires: layer
// t may start on a site as soon as layer t-1 has moved past it, so a site
// finishes after n_layers gates and its wire can be recycled.
struct QubitSchedule {
  std::size_t d = 2;
  std::size_t n_sites = 0;
  std::size_t n_layers = 0;
  std::size_t n_wires = 0;
  std::vector<ScheduledOp> ops;

  void validate() const;
};

QubitSchedule qubit_efficient_schedule(const EncodedCircuit& circuit);

// Dense reference evolutions of |0...0>, site 0 most significant.  The
// first unrolls the circuit over n_sites qudits (d^n_sites <= 2^20); the
// second executes the wire-reuse program with resets deferred onto fresh
// wires and reassembles site order from the output map.
ComplexTensor circuit_statevector(const EncodedCircuit& circuit);
ComplexTensor simulate_statevector(const QubitSchedule& schedule);

}  // namespace mpdc
