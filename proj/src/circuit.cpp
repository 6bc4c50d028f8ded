#include <mpdc/circuit.hpp>

#include <algorithm>
#include <cmath>

namespace mpdc {

namespace {

constexpr std::size_t kDenseStateLimit = std::size_t{1} << 20;
constexpr std::size_t kVirtualWireLimit = 20;
constexpr std::size_t kVirtualStateLimit = std::size_t{1} << 22;

// d^e, or SIZE_MAX once the value would exceed cap
std::size_t ipow_capped(std::size_t d, std::size_t e, std::size_t cap) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (v > cap / d) return SIZE_MAX;
    v *= d;
  }
  return v;
}

// gate on the digits with place values pa (first site) and pb
void apply_on_digits(std::vector<Complex>& amp, std::size_t d, std::size_t pa, std::size_t pb,
                     const ComplexTensor& g) {
  const std::size_t dd = d * d;
  std::vector<Complex> in(dd), out(dd);
  for (std::size_t k = 0; k < amp.size(); ++k) {
    if ((k / pa) % d != 0 || (k / pb) % d != 0) continue;
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = 0; y < d; ++y) in[x * d + y] = amp[k + x * pa + y * pb];
    for (std::size_t r = 0; r < dd; ++r) {
      Complex acc(0, 0);
      for (std::size_t c = 0; c < dd; ++c) acc += g.at(r, c) * in[c];
      out[r] = acc;
    }
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = 0; y < d; ++y) amp[k + x * pa + y * pb] = out[x * d + y];
  }
}

void apply_on_digit(std::vector<Complex>& amp, std::size_t d, std::size_t p,
                    const ComplexTensor& g) {
  std::vector<Complex> in(d), out(d);
  for (std::size_t k = 0; k < amp.size(); ++k) {
    if ((k / p) % d != 0) continue;
    for (std::size_t x = 0; x < d; ++x) in[x] = amp[k + x * p];
    for (std::size_t r = 0; r < d; ++r) {
      Complex acc(0, 0);
      for (std::size_t c = 0; c < d; ++c) acc += g.at(r, c) * in[c];
      out[r] = acc;
    }
    for (std::size_t x = 0; x < d; ++x) amp[k + x * p] = out[x];
  }
}

}  // namespace

std::vector<FlatGate> flatten_gates(const EncodedCircuit& circuit) {
  circuit.validate();
  std::vector<FlatGate> flat;
  flat.reserve(circuit.n_layers() * circuit.n_sites);
  for (std::size_t t = 0; t < circuit.n_layers(); ++t) {
    const auto& layer = circuit.layers[t];
    for (std::size_t n = 0; n + 1 < circuit.n_sites; ++n)
      flat.push_back({t, n, GateKind::TwoQubit, layer.two_site_gates[n]});
    flat.push_back({t, circuit.n_sites - 1, GateKind::OneQubit, layer.final_gate});
  }
  return flat;
}

void QubitSchedule::validate() const {
  if (d < 2) throw Error("local dimension must be at least 2");
  if (n_sites < 2) throw Error("need at least two sites");
  if (n_wires != n_layers + 2) throw Error("wire count must be n_layers + 2");
  if (ops.empty()) throw Error("schedule has no operations");
  const std::size_t dd = d * d;
  std::size_t prev_step = 0;
  for (const auto& op : ops) {
    if (op.step < prev_step) throw Error("schedule steps run backwards");
    prev_step = op.step;
    if (op.wires[0] >= n_wires || op.wires[1] >= n_wires) throw Error("wire index out of range");
    switch (op.kind) {
      case GateKind::TwoQubit:
        if (op.site + 1 >= n_sites) throw Error("two-qubit gate falls off the chain");
        if (op.wires[0] == op.wires[1]) throw Error("two-qubit gate needs distinct wires");
        if (op.matrix.rank() != 2 || op.matrix.extent(0) != dd || op.matrix.extent(1) != dd)
          throw Error("two-qubit gate matrix has the wrong shape");
        break;
      case GateKind::OneQubit:
        if (op.site >= n_sites) throw Error("gate site out of range");
        if (op.matrix.rank() != 2 || op.matrix.extent(0) != d || op.matrix.extent(1) != d)
          throw Error("one-qubit gate matrix has the wrong shape");
        break;
      case GateKind::OutputMap:
      case GateKind::MeasureReset:
        if (op.site >= n_sites) throw Error("event site out of range");
        break;
    }
  }
}

QubitSchedule qubit_efficient_schedule(const EncodedCircuit& circuit) {
  circuit.validate();
  const std::size_t n = circuit.n_sites;
  const std::size_t depth = circuit.n_layers();
  const std::size_t wires = depth + 2;

  QubitSchedule sched;
  sched.d = circuit.d;
  sched.n_sites = n;
  sched.n_layers = depth;
  sched.n_wires = wires;

  // Pipeline: layer t reaches site n at stage n + t, so the whole
  // staircase advances as a single front that is depth + 2 sites wide.
  std::vector<ScheduledOp> gates;
  for (const auto& g : flatten_gates(circuit)) {
    ScheduledOp op;
    op.kind = g.kind;
    op.layer = g.layer;
    op.site = g.site;
    op.matrix = g.matrix;
    if (g.kind == GateKind::TwoQubit) {
      op.step = g.site + g.layer;
      op.wires = {g.site % wires, (g.site + 1) % wires};
    } else {
      op.step = (n - 1) + g.layer;
      op.wires = {(n - 1) % wires, (n - 1) % wires};
    }
    gates.push_back(std::move(op));
  }
  std::stable_sort(gates.begin(), gates.end(), [](const ScheduledOp& a, const ScheduledOp& b) {
    return a.step != b.step ? a.step < b.step : a.layer < b.layer;
  });

  // a site is finished once the deepest layer has moved past it
  std::vector<std::size_t> last_touch(n, 0);
  for (std::size_t i = 0; i < gates.size(); ++i) {
    last_touch[gates[i].site] = i;
    if (gates[i].kind == GateKind::TwoQubit) last_touch[gates[i].site + 1] = i;
  }
  std::vector<std::vector<std::size_t>> retired(gates.size());
  for (std::size_t s = 0; s < n; ++s) retired[last_touch[s]].push_back(s);

  for (std::size_t i = 0; i < gates.size(); ++i) {
    const std::size_t step = gates[i].step;
    const std::size_t layer = gates[i].layer;
    sched.ops.push_back(std::move(gates[i]));
    for (std::size_t s : retired[i]) {
      const std::size_t w = s % wires;
      sched.ops.push_back({GateKind::OutputMap, step, layer, s, {w, w}, {}});
      sched.ops.push_back({GateKind::MeasureReset, step, layer, s, {w, w}, {}});
    }
  }
  return sched;
}

ComplexTensor circuit_statevector(const EncodedCircuit& circuit) {
  circuit.validate();
  const std::size_t d = circuit.d;
  const std::size_t n = circuit.n_sites;
  const std::size_t total = ipow_capped(d, n, kDenseStateLimit);
  if (total == SIZE_MAX) throw Error("statevector would be too large");

  std::vector<Complex> amp(total, Complex(0, 0));
  amp[0] = Complex(1, 0);
  for (const auto& g : flatten_gates(circuit)) {
    if (g.kind == GateKind::TwoQubit) {
      const std::size_t pb = ipow_capped(d, n - 2 - g.site, total);
      apply_on_digits(amp, d, pb * d, pb, g.matrix);
    } else {
      apply_on_digit(amp, d, ipow_capped(d, n - 1 - g.site, total), g.matrix);
    }
  }
  return ComplexTensor({total}, std::move(amp));
}

ComplexTensor simulate_statevector(const QubitSchedule& schedule) {
  schedule.validate();
  const std::size_t d = schedule.d;
  const std::size_t n = schedule.n_sites;

  std::size_t resets = 0;
  bool has_outputs = false;
  for (const auto& op : schedule.ops) {
    if (op.kind == GateKind::MeasureReset) ++resets;
    if (op.kind == GateKind::OutputMap) has_outputs = true;
  }
  const std::size_t virt = schedule.n_wires + resets;
  const std::size_t total = ipow_capped(d, virt, kVirtualStateLimit);
  if (virt > kVirtualWireLimit || total == SIZE_MAX)
    throw Error("too many virtual wires to simulate");

  // Wire w lives on the digit with place value d^wire_virtual[w]; a reset
  // retires the digit (it keeps the site's output) and hands the wire a
  // fresh one, so measurement is deferred to the very end.
  std::vector<Complex> amp(total, Complex(0, 0));
  amp[0] = Complex(1, 0);
  std::vector<std::size_t> wire_virtual(schedule.n_wires);
  for (std::size_t w = 0; w < schedule.n_wires; ++w) wire_virtual[w] = w;
  std::size_t next_virtual = schedule.n_wires;
  std::vector<std::size_t> site_virtual(n, SIZE_MAX);

  for (const auto& op : schedule.ops) {
    switch (op.kind) {
      case GateKind::TwoQubit: {
        const std::size_t pa = ipow_capped(d, wire_virtual[op.wires[0]], total);
        const std::size_t pb = ipow_capped(d, wire_virtual[op.wires[1]], total);
        apply_on_digits(amp, d, pa, pb, op.matrix);
        break;
      }
      case GateKind::OneQubit:
        apply_on_digit(amp, d, ipow_capped(d, wire_virtual[op.wires[0]], total), op.matrix);
        break;
      case GateKind::OutputMap:
        site_virtual[op.site] = wire_virtual[op.wires[0]];
        break;
      case GateKind::MeasureReset:
        wire_virtual[op.wires[0]] = next_virtual++;
        break;
    }
  }

  if (!has_outputs) {
    if (schedule.n_wires < n) throw Error("schedule has no output map and too few wires");
    for (std::size_t s = 0; s < n; ++s) site_virtual[s] = wire_virtual[s];
  }
  for (std::size_t s = 0; s < n; ++s)
    if (site_virtual[s] == SIZE_MAX) throw Error("schedule never outputs a site");

  // collect site digits in order; every unmapped digit is sliced at |0>
  const std::size_t out_total = ipow_capped(d, n, kDenseStateLimit);
  if (out_total == SIZE_MAX) throw Error("statevector would be too large");
  std::vector<Complex> out(out_total, Complex(0, 0));
  for (std::size_t k = 0; k < out_total; ++k) {
    std::size_t idx = 0, rest = k;
    for (std::size_t s = n; s-- > 0;) {  // site n-1 is the least significant digit of k
      idx += (rest % d) * ipow_capped(d, site_virtual[s], total);
      rest /= d;
    }
    out[k] = amp[idx];
  }
  return ComplexTensor({out_total}, std::move(out));
}

}  // namespace mpdc
