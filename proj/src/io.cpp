#include <mpdc/io.hpp>

#include <mpdc/version.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

namespace mpdc {

namespace {

using nlohmann::json;

constexpr double kLoadUnitarityTol = 1e-10;
constexpr double kLoadCanonicalTol = 1e-6;

std::string kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::TwoQubit: return "g2";
    case GateKind::OneQubit: return "g1";
    case GateKind::OutputMap: return "out";
    case GateKind::MeasureReset: return "reset";
  }
  throw Error("unknown gate kind");
}

GateKind parse_kind(const std::string& name) {
  if (name == "g2") return GateKind::TwoQubit;
  if (name == "g1") return GateKind::OneQubit;
  if (name == "out") return GateKind::OutputMap;
  if (name == "reset") return GateKind::MeasureReset;
  throw Error("unknown gate kind: " + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw Error("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open: " + path.string());
  try {
    json j;
    f >> j;
    return j;
  } catch (const json::exception& e) {
    throw Error("bad json in " + path.string() + ": " + e.what());
  }
}

void check_format(const json& j, const std::filesystem::path& path) {
  if (!j.is_object() || j.value("format_version", -1) != 1)
    throw Error("unsupported format_version in " + path.string());
}

json meta_json(const FileMeta& meta) {
  json m;
  m["tool_version"] = std::string(kToolVersion);
  if (meta.seed) m["seed"] = *meta.seed;
  if (!meta.parameters.empty()) {
    json p = json::object();
    for (const auto& [k, v] : meta.parameters) p[k] = v;
    m["parameters"] = p;
  }
  return m;
}

// parameters come back in key order (json objects are stored sorted)
void meta_from_json(const json& j, FileMeta* meta) {
  if (meta == nullptr || !j.is_object()) return;
  *meta = {};
  if (j.contains("seed")) meta->seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("parameters"))
    for (const auto& [k, v] : j.at("parameters").items())
      meta->parameters.emplace_back(k, v.get<std::string>());
}

std::size_t get_index(const json& j, const char* key, std::size_t min_value) {
  const auto v = j.at(key).get<std::int64_t>();
  if (v < static_cast<std::int64_t>(min_value)) throw Error(std::string(key) + " out of range");
  return static_cast<std::size_t>(v);
}

void put_matrix(json& j, const ComplexTensor& m) {
  std::vector<double> re(m.size()), im(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    re[i] = m.data()[i].real();
    im[i] = m.data()[i].imag();
  }
  j["re"] = re;
  j["im"] = im;
}

ComplexTensor get_matrix(const json& j, std::vector<std::size_t> shape) {
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  std::size_t total = 1;
  for (std::size_t s : shape) total *= s;
  if (re.size() != total || im.size() != total)
    throw Error("matrix data does not match its shape");
  std::vector<Complex> data(total);
  for (std::size_t i = 0; i < total; ++i) data[i] = Complex(re[i], im[i]);
  return ComplexTensor(std::move(shape), std::move(data));
}

void check_unitary(const ComplexTensor& m, const char* what) {
  if (unitarity_defect(m) > kLoadUnitarityTol)
    throw Error(std::string(what) + " in file is not unitary");
}

std::string meta_lines(const FileMeta& meta) {
  std::string out = "# tool_version=" + std::string(kToolVersion) + "\n";
  if (meta.seed) out += "# seed=" + std::to_string(*meta.seed) + "\n";
  for (const auto& [k, v] : meta.parameters) out += "# " + k + "=" + v + "\n";
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void save_mps(const MpsState& psi, const std::filesystem::path& path, const FileMeta& meta) {
  psi.validate();
  json j;
  j["format_version"] = 1;
  j["d"] = psi.d;
  j["n_sites"] = psi.n_sites();
  j["canonical"] = psi.canonical;
  json arr = json::array();
  for (const auto& t : psi.tensors) {
    json tj;
    tj["shape"] = t.shape();
    put_matrix(tj, t);
    arr.push_back(std::move(tj));
  }
  j["tensors"] = std::move(arr);
  j["meta"] = meta_json(meta);
  write_text(path, j.dump() + "\n");
}

MpsState load_mps(const std::filesystem::path& path, FileMeta* meta) {
  const json j = read_json(path);
  check_format(j, path);
  MpsState psi;
  psi.d = get_index(j, "d", 2);
  psi.canonical = j.at("canonical").get<bool>();
  for (const auto& tj : j.at("tensors")) {
    auto shape = tj.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 3) throw Error("site tensors must have rank 3");
    psi.tensors.push_back(get_matrix(tj, std::move(shape)));
  }
  if (psi.n_sites() != get_index(j, "n_sites", 1))
    throw Error("n_sites disagrees with the tensor list in " + path.string());
  psi.validate();
  if (psi.canonical && psi.max_canonical_residual() > kLoadCanonicalTol)
    throw Error("state claims the canonical gauge but is not in it: " + path.string());
  meta_from_json(j.value("meta", json()), meta);
  return psi;
}

void save_circuit(const EncodedCircuit& circuit, const std::filesystem::path& path,
                  const FileMeta& meta) {
  circuit.validate();
  json j;
  j["format_version"] = 1;
  j["d"] = circuit.d;
  j["n_sites"] = circuit.n_sites;
  j["n_layers"] = circuit.n_layers();
  json gates = json::array();
  for (const auto& g : flatten_gates(circuit)) {
    json gj;
    gj["layer"] = g.layer + 1;
    gj["site"] = g.site + 1;
    gj["kind"] = kind_name(g.kind);
    put_matrix(gj, g.matrix);
    gates.push_back(std::move(gj));
  }
  j["gates"] = std::move(gates);
  j["meta"] = meta_json(meta);
  write_text(path, j.dump() + "\n");
}

EncodedCircuit load_circuit(const std::filesystem::path& path, FileMeta* meta) {
  const json j = read_json(path);
  check_format(j, path);
  EncodedCircuit circuit;
  circuit.d = get_index(j, "d", 2);
  circuit.n_sites = get_index(j, "n_sites", 2);
  const std::size_t n_layers = get_index(j, "n_layers", 1);
  const auto& gates = j.at("gates");
  if (gates.size() != n_layers * circuit.n_sites)
    throw Error("wrong gate count in " + path.string());

  const std::size_t dd = circuit.d * circuit.d;
  std::size_t i = 0;
  for (std::size_t t = 0; t < n_layers; ++t) {
    DisentanglerLayer layer;
    layer.d = circuit.d;
    layer.n_sites = circuit.n_sites;
    for (std::size_t n = 0; n + 1 < circuit.n_sites; ++n, ++i) {
      const auto& gj = gates.at(i);
      if (get_index(gj, "layer", 1) != t + 1 || get_index(gj, "site", 1) != n + 1 ||
          parse_kind(gj.at("kind").get<std::string>()) != GateKind::TwoQubit)
        throw Error("gates out of generation order in " + path.string());
      auto m = get_matrix(gj, {dd, dd});
      check_unitary(m, "two-qubit gate");
      layer.two_site_gates.push_back(std::move(m));
    }
    const auto& gj = gates.at(i++);
    if (get_index(gj, "layer", 1) != t + 1 || get_index(gj, "site", 1) != circuit.n_sites ||
        parse_kind(gj.at("kind").get<std::string>()) != GateKind::OneQubit)
      throw Error("gates out of generation order in " + path.string());
    auto m = get_matrix(gj, {circuit.d, circuit.d});
    check_unitary(m, "one-qubit gate");
    layer.final_gate = std::move(m);
    circuit.layers.push_back(std::move(layer));
  }
  circuit.validate();
  meta_from_json(j.value("meta", json()), meta);
  return circuit;
}

void save_schedule(const QubitSchedule& schedule, const std::filesystem::path& path,
                   const FileMeta& meta) {
  schedule.validate();
  json j;
  j["format_version"] = 1;
  j["d"] = schedule.d;
  j["n_sites"] = schedule.n_sites;
  j["n_layers"] = schedule.n_layers;
  j["n_wires"] = schedule.n_wires;
  json ops = json::array();
  for (const auto& op : schedule.ops) {
    json oj;
    oj["kind"] = kind_name(op.kind);
    oj["step"] = op.step + 1;
    oj["layer"] = op.layer + 1;
    oj["site"] = op.site + 1;
    oj["wires"] = {op.wires[0], op.wires[1]};
    if (op.kind == GateKind::TwoQubit || op.kind == GateKind::OneQubit) put_matrix(oj, op.matrix);
    ops.push_back(std::move(oj));
  }
  j["ops"] = std::move(ops);
  j["meta"] = meta_json(meta);
  write_text(path, j.dump() + "\n");
}

QubitSchedule load_schedule(const std::filesystem::path& path, FileMeta* meta) {
  const json j = read_json(path);
  check_format(j, path);
  QubitSchedule sched;
  sched.d = get_index(j, "d", 2);
  sched.n_sites = get_index(j, "n_sites", 2);
  sched.n_layers = get_index(j, "n_layers", 1);
  sched.n_wires = get_index(j, "n_wires", 1);
  const std::size_t dd = sched.d * sched.d;
  for (const auto& oj : j.at("ops")) {
    ScheduledOp op;
    op.kind = parse_kind(oj.at("kind").get<std::string>());
    op.step = get_index(oj, "step", 1) - 1;
    op.layer = get_index(oj, "layer", 1) - 1;
    op.site = get_index(oj, "site", 1) - 1;
    const auto wires = oj.at("wires").get<std::vector<std::size_t>>();
    if (wires.size() != 2) throw Error("ops need two wire labels in " + path.string());
    op.wires = {wires[0], wires[1]};
    if (op.kind == GateKind::TwoQubit) {
      op.matrix = get_matrix(oj, {dd, dd});
      check_unitary(op.matrix, "two-qubit gate");
    } else if (op.kind == GateKind::OneQubit) {
      op.matrix = get_matrix(oj, {sched.d, sched.d});
      check_unitary(op.matrix, "one-qubit gate");
    }
    sched.ops.push_back(std::move(op));
  }
  sched.validate();
  meta_from_json(j.value("meta", json()), meta);
  return sched;
}

void save_report_csv(const EncodeReport& report, const std::filesystem::path& path,
                     const FileMeta& meta) {
  std::string out = meta_lines(meta);
  out += "# n_sites=" + std::to_string(report.n_sites) + "\n";
  out += "# d=" + std::to_string(report.d) + "\n";
  out += "# n_layers=" + std::to_string(report.n_layers) + "\n";
  out += "# chi_tilde=" + std::to_string(report.chi_tilde) + "\n";
  out += "# input_max_bond=" + std::to_string(report.input_max_bond) + "\n";
  out += "# mps_params_per_site=" + std::to_string(report.mps_params_per_site) + "\n";
  out += "# circuit_params_per_site=" + std::to_string(report.circuit_params_per_site) + "\n";
  out += "# nlf_reverse=" + format_double(report.nlf_reverse) + "\n";
  out += "depth,nlf,max_discarded_weight,seconds\n";
  for (std::size_t t = 0; t < report.nlf.size(); ++t) {
    out += std::to_string(t) + "," + format_double(report.nlf[t]) + "," +
           format_double(report.max_discarded[t]) + "," + format_double(report.seconds[t]) + "\n";
  }
  write_text(path, out);
}

void save_table_csv(const std::vector<std::string>& columns,
                    const std::vector<std::vector<double>>& rows,
                    const std::filesystem::path& path, const FileMeta& meta) {
  if (columns.empty()) throw Error("table needs at least one column");
  std::string out = meta_lines(meta);
  for (std::size_t c = 0; c < columns.size(); ++c)
    out += (c == 0 ? "" : ",") + columns[c];
  out += "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size()) throw Error("table row width mismatch");
    for (std::size_t c = 0; c < row.size(); ++c)
      out += (c == 0 ? "" : ",") + format_double(row[c]);
    out += "\n";
  }
  write_text(path, out);
}

void write_qasm_like(const QubitSchedule& schedule, const std::filesystem::path& path,
                     const FileMeta& meta) {
  schedule.validate();

  std::string head = "# meta tool_version=" + std::string(kToolVersion);
  if (meta.seed) head += " seed=" + std::to_string(*meta.seed);
  for (const auto& [k, v] : meta.parameters) head += " " + k + "=" + v;

  std::string out = "MPDQASM 1\n" + head + "\n";
  out += "wires " + std::to_string(schedule.n_wires) + " sites " +
         std::to_string(schedule.n_sites) + " layers " + std::to_string(schedule.n_layers) +
         " d " + std::to_string(schedule.d) + "\n";

  json matrices = json::array();
  for (const auto& op : schedule.ops) {
    switch (op.kind) {
      case GateKind::TwoQubit: {
        out += "g2 " + std::to_string(op.wires[0]) + " " + std::to_string(op.wires[1]) + " m" +
               std::to_string(matrices.size()) + "\n";
        json mj;
        mj["shape"] = op.matrix.shape();
        put_matrix(mj, op.matrix);
        matrices.push_back(std::move(mj));
        break;
      }
      case GateKind::OneQubit: {
        out += "g1 " + std::to_string(op.wires[0]) + " m" + std::to_string(matrices.size()) + "\n";
        json mj;
        mj["shape"] = op.matrix.shape();
        put_matrix(mj, op.matrix);
        matrices.push_back(std::move(mj));
        break;
      }
      case GateKind::OutputMap:
        out += "out " + std::to_string(op.wires[0]) + " s" + std::to_string(op.site + 1) + "\n";
        break;
      case GateKind::MeasureReset:
        out += "reset " + std::to_string(op.wires[0]) + "\n";
        break;
    }
  }
  write_text(path, out);

  json side;
  side["format_version"] = 1;
  side["matrices"] = std::move(matrices);
  const auto sidecar =
      path.parent_path() / (path.stem().string() + ".matrices.json");
  write_text(sidecar, side.dump() + "\n");
}

}  // namespace mpdc
