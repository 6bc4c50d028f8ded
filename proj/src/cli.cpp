#include <mpdc/cli.hpp>

#include <mpdc/io.hpp>
#include <mpdc/models.hpp>
#include <mpdc/version.hpp>

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

namespace mpdc {

namespace {

// Runs fn(0..count-1) on up to `threads` workers.  Results must be written
// to index-addressed slots so the output order never depends on timing.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::size_t pick_cap(std::size_t requested, const MpsState& psi) {
  return requested != 0 ? requested : std::max(psi.d, psi.max_bond());
}

struct GroundstateCmd {
  std::string model = "ising";
  double hx = 0.5;
  std::size_t n = 0;
  std::size_t chi = 32;
  int sweeps = 20;
  double tol = 1e-10;
  std::uint64_t seed = 7;
  std::string out;

  int run(std::ostream& os, std::ostream& err) const {
    ModelSpec spec{parse_model(model), n, hx};
    DmrgOptions opt;
    opt.chi = chi;
    opt.max_sweeps = sweeps;
    opt.energy_tol = tol;
    opt.seed = seed;
    auto res = dmrg_ground_state(spec, opt);

    FileMeta meta;
    meta.seed = seed;
    meta.parameters = {{"model", model}};
    if (spec.kind == ModelKind::TransverseIsing)
      meta.parameters.emplace_back("hx", format_double(hx));
    meta.parameters.emplace_back("n", std::to_string(n));
    meta.parameters.emplace_back("chi", std::to_string(chi));
    meta.parameters.emplace_back("energy", format_double(res.energy));
    meta.parameters.emplace_back("sweeps", std::to_string(res.sweeps));
    meta.parameters.emplace_back("converged", res.converged ? "1" : "0");
    save_mps(res.state, out, meta);

    os << "energy=" << format_double(res.energy) << " sweeps=" << res.sweeps
       << " converged=" << (res.converged ? 1 : 0) << " max_bond=" << res.state.max_bond()
       << "\n";
    if (!res.converged) {
      err << "error: dmrg did not converge within the sweep budget (state written anyway)\n";
      return 1;
    }
    return 0;
  }
};

struct GhzCmd {
  std::size_t n = 0;
  std::string out;

  int run(std::ostream& os) const {
    FileMeta meta;
    meta.parameters = {{"model", "ghz"}, {"n", std::to_string(n)}};
    save_mps(ghz_mps(n), out, meta);
    os << "n=" << n << " max_bond=2\n";
    return 0;
  }
};

struct EncodeCmd {
  std::string in;
  std::size_t layers = 1;
  std::size_t chi_cap = 0;
  std::string out;
  std::string report;

  int run(std::ostream& os, std::ostream& err) const {
    if (out.empty() && report.empty()) {
      err << "error: encode needs --out and/or --report\n";
      return 2;
    }
    FileMeta in_meta;
    auto psi = load_mps(in, &in_meta);
    if (!psi.canonical) psi = canonicalize(psi);
    const std::size_t cap = pick_cap(chi_cap, psi);
    auto [circ, rep] = encode(psi, layers, cap);

    FileMeta meta;
    meta.seed = in_meta.seed;
    meta.parameters = {{"n", std::to_string(rep.n_sites)},
                       {"d", std::to_string(rep.d)},
                       {"layers", std::to_string(layers)},
                       {"chi_cap", std::to_string(cap)},
                       {"input_max_bond", std::to_string(rep.input_max_bond)}};
    if (!out.empty()) save_circuit(circ, out, meta);
    if (!report.empty()) {
      FileMeta report_meta;  // the report carries its own dimensions
      report_meta.seed = meta.seed;
      save_report_csv(rep, report, report_meta);
    }

    os << "nlf=" << format_double(rep.nlf.back())
       << " nlf_reverse=" << format_double(rep.nlf_reverse) << " max_discarded_weight="
       << format_double(*std::max_element(rep.max_discarded.begin(), rep.max_discarded.end()))
       << "\n";
    return 0;
  }
};

struct FidelityCmd {
  std::string circuit;
  std::string state;
  std::size_t chi_cap = 0;

  int run(std::ostream& os) const {
    auto circ = load_circuit(circuit);
    auto psi = load_mps(state);
    if (!psi.canonical) psi = canonicalize(psi);
    const std::size_t cap = pick_cap(chi_cap, psi);
    os << "nlf=" << format_double(fidelity_nlf(circ, psi, cap).value)
       << " nlf_reverse=" << format_double(fidelity_nlf_reverse(circ, psi, cap).value) << "\n";
    return 0;
  }
};

struct ExportCmd {
  std::string circuit;
  std::string format = "qasm";
  std::string out;

  int run(std::ostream& os) const {
    FileMeta meta;
    auto circ = load_circuit(circuit, &meta);
    auto sched = qubit_efficient_schedule(circ);
    if (format == "qasm")
      write_qasm_like(sched, out, meta);
    else
      save_schedule(sched, out, meta);
    os << "wires=" << sched.n_wires << " ops=" << sched.ops.size() << " format=" << format
       << "\n";
    return 0;
  }
};

struct VerifyCmd {
  std::string circuit;
  std::string state;
  std::size_t chi_cap = 0;
  bool statevector = false;

  int run(std::ostream& os) const {
    auto circ = load_circuit(circuit);
    double max_defect = 0.0;
    for (const auto& layer : circ.layers) {
      const auto rep = layer_unitarity_defect(layer);
      for (double v : rep.per_gate) max_defect = std::max(max_defect, v);
    }
    bool ok = max_defect <= 1e-10;
    os << "max_gate_defect=" << format_double(max_defect) << "\n";

    if (!state.empty()) {
      auto psi = load_mps(state);
      if (!psi.canonical) psi = canonicalize(psi);
      const std::size_t cap = pick_cap(chi_cap, psi);
      os << "nlf=" << format_double(fidelity_nlf(circ, psi, cap).value)
         << " nlf_reverse=" << format_double(fidelity_nlf_reverse(circ, psi, cap).value) << "\n";
    }

    if (statevector) {
      const auto dense = circuit_statevector(circ);
      const auto reused = simulate_statevector(qubit_efficient_schedule(circ));
      const auto chain =
          to_statevector(evolve_circuit(circ, std::max<std::size_t>(circ.d, std::size_t{1} << 20)));
      double dev = 0.0;
      for (std::size_t i = 0; i < dense.size(); ++i) {
        dev = std::max(dev, std::abs(dense.data()[i] - reused.data()[i]));
        dev = std::max(dev, std::abs(dense.data()[i] - chain.data()[i]));
      }
      os << "max_sim_deviation=" << format_double(dev) << "\n";
      ok = ok && dev <= 1e-8;
    }
    return ok ? 0 : 1;
  }
};

struct SweepCmd {
  std::string figure;
  std::size_t n = 0;
  std::size_t chi = 0;
  std::size_t layers = 0;
  std::size_t chi_cap = 0;
  double hx = 0.5;
  std::uint64_t seed = 7;
  std::size_t threads = 1;
  std::string out;

  DmrgResult ground(std::size_t sites, double field, std::size_t bond) const {
    ModelSpec spec{ModelKind::TransverseIsing, sites, field};
    DmrgOptions opt;
    opt.chi = bond;
    opt.seed = seed;
    return dmrg_ground_state(spec, opt);
  }

  // field scan at depth one: how much of the state one layer captures
  int fig2(std::ostream& os, std::ostream& err) const {
    const std::size_t sites = n ? n : 48;
    const std::size_t bond = chi ? chi : 64;
    const std::size_t depth = layers ? layers : 1;
    const std::size_t cap = chi_cap ? chi_cap : bond;
    const std::size_t points = 19;  // hx = 0.10, 0.15, ..., 1.00

    std::vector<std::vector<double>> rows(points);
    std::vector<char> converged(points, 1);
    parallel_for(points, threads, [&](std::size_t i) {
      const double field = static_cast<double>(10 + 5 * i) / 100.0;
      auto res = ground(sites, field, bond);
      converged[i] = res.converged ? 1 : 0;
      auto [circ, rep] = encode(res.state, depth, cap);
      rows[i] = {field, rep.nlf[0], rep.nlf[1]};
    });

    FileMeta meta;
    meta.seed = seed;
    meta.parameters = {{"figure", "fig2"},         {"model", "ising"},
                       {"n", std::to_string(sites)}, {"chi", std::to_string(bond)},
                       {"layers", std::to_string(depth)}, {"chi_cap", std::to_string(cap)}};
    save_table_csv({"hx", "f0", "f1"}, rows, out, meta);
    for (std::size_t i = 0; i < points; ++i)
      if (!converged[i])
        err << "warning: dmrg not converged at hx=" << format_double(rows[i][0]) << "\n";
    os << "rows=" << points << " out=" << out << "\n";
    return 0;
  }

  // depth scan of one critical ground state; writes a per-depth report
  int fig3(std::ostream& os, std::ostream& err) const {
    const std::size_t sites = n ? n : 48;
    const std::size_t bond = chi ? chi : 64;
    const std::size_t depth = layers ? layers : 9;
    const std::size_t cap = chi_cap ? chi_cap : bond;

    auto res = ground(sites, hx, bond);
    if (!res.converged) err << "warning: dmrg not converged\n";
    auto [circ, rep] = encode(res.state, depth, cap);

    FileMeta meta;
    meta.seed = seed;
    meta.parameters = {{"figure", "fig3"},           {"model", "ising"},
                       {"hx", format_double(hx)},    {"n", std::to_string(sites)},
                       {"chi", std::to_string(bond)}, {"energy", format_double(res.energy)}};
    save_report_csv(rep, out, meta);
    os << "rows=" << rep.nlf.size() << " out=" << out << "\n";
    return 0;
  }

  // depth scan under tight evolution caps: where each cap starts to fail
  int fig4(std::ostream& os, std::ostream& err) const {
    const std::size_t sites = n ? n : 24;
    const std::size_t bond = chi ? chi : 32;
    const std::size_t depth = layers ? layers : 9;
    const std::vector<std::size_t> caps =
        chi_cap ? std::vector<std::size_t>{chi_cap} : std::vector<std::size_t>{4, 8, 16};

    auto res = ground(sites, hx, bond);
    if (!res.converged) err << "warning: dmrg not converged\n";

    std::vector<std::vector<std::vector<double>>> blocks(caps.size());
    parallel_for(caps.size(), threads, [&](std::size_t c) {
      auto [circ, rep] = encode(res.state, depth, caps[c]);
      for (std::size_t t = 0; t < rep.nlf.size(); ++t)
        blocks[c].push_back({static_cast<double>(caps[c]), static_cast<double>(t), rep.nlf[t]});
    });
    std::vector<std::vector<double>> rows;
    for (const auto& block : blocks) rows.insert(rows.end(), block.begin(), block.end());

    FileMeta meta;
    meta.seed = seed;
    meta.parameters = {{"figure", "fig4"},           {"model", "ising"},
                       {"hx", format_double(hx)},    {"n", std::to_string(sites)},
                       {"chi", std::to_string(bond)}, {"layers", std::to_string(depth)},
                       {"energy", format_double(res.energy)}};
    save_table_csv({"chi_cap", "depth", "nlf"}, rows, out, meta);
    os << "rows=" << rows.size() << " out=" << out << "\n";
    return 0;
  }

  int run(std::ostream& os, std::ostream& err) const {
    if (figure == "fig2") return fig2(os, err);
    if (figure == "fig3") return fig3(os, err);
    return fig4(os, err);
  }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"compiles matrix product states into layered qubit circuits"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  GroundstateCmd gs;
  auto* gs_cmd = app.add_subcommand("groundstate", "variational spin-chain ground state search");
  gs_cmd->add_option("--model", gs.model, "ising, heisenberg, or xy")
      ->check(CLI::IsMember({"ising", "heisenberg", "xy"}));
  gs_cmd->add_option("--hx", gs.hx, "transverse field (ising only)");
  gs_cmd->add_option("--n", gs.n, "number of sites")->required()->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  gs_cmd->add_option("--chi", gs.chi, "bond dimension")->check(CLI::PositiveNumber);
  gs_cmd->add_option("--sweeps", gs.sweeps, "sweep budget")->check(CLI::PositiveNumber);
  gs_cmd->add_option("--tol", gs.tol, "relative energy tolerance");
  gs_cmd->add_option("--seed", gs.seed, "initial state seed");
  gs_cmd->add_option("--out", gs.out, "state file to write")->required();

  GhzCmd ghz;
  auto* ghz_cmd = app.add_subcommand("ghz", "write an n-site GHZ state");
  ghz_cmd->add_option("--n", ghz.n, "number of sites")->required()->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  ghz_cmd->add_option("--out", ghz.out, "state file to write")->required();

  EncodeCmd enc;
  auto* enc_cmd = app.add_subcommand("encode", "compile a state into gate layers");
  enc_cmd->add_option("--in", enc.in, "input state file")->required();
  enc_cmd->add_option("--layers", enc.layers, "circuit depth")->check(CLI::PositiveNumber);
  enc_cmd->add_option("--chi-cap", enc.chi_cap, "bond cap during compilation (0 = input bond)");
  enc_cmd->add_option("--out", enc.out, "circuit file to write");
  enc_cmd->add_option("--report", enc.report, "per-depth csv to write");

  FidelityCmd fid;
  auto* fid_cmd = app.add_subcommand("fidelity", "evaluate a circuit against a state");
  fid_cmd->add_option("--circuit", fid.circuit, "circuit file")->required();
  fid_cmd->add_option("--state", fid.state, "target state file")->required();
  fid_cmd->add_option("--chi-cap", fid.chi_cap, "bond cap during evaluation (0 = state bond)");

  ExportCmd exp;
  auto* exp_cmd = app.add_subcommand("export", "emit the wire-reuse execution program");
  exp_cmd->add_option("--circuit", exp.circuit, "circuit file")->required();
  exp_cmd->add_option("--format", exp.format, "qasm or json")
      ->check(CLI::IsMember({"qasm", "json"}));
  exp_cmd->add_option("--out", exp.out, "program file to write")->required();

  VerifyCmd ver;
  auto* ver_cmd = app.add_subcommand("verify", "check gate unitarity and simulators");
  ver_cmd->add_option("--circuit", ver.circuit, "circuit file")->required();
  ver_cmd->add_option("--state", ver.state, "optional target state file");
  ver_cmd->add_option("--chi-cap", ver.chi_cap, "bond cap during evaluation (0 = state bond)");
  ver_cmd->add_flag("--statevector", ver.statevector,
                    "cross-check dense, wire-reuse, and tensor-network evolutions");

  SweepCmd swp;
  auto* swp_cmd = app.add_subcommand("sweep", "reproduce a benchmark table");
  swp_cmd->add_option("figure", swp.figure, "fig2, fig3, or fig4")
      ->required()
      ->check(CLI::IsMember({"fig2", "fig3", "fig4"}));
  swp_cmd->add_option("--n", swp.n, "number of sites (0 = figure default)");
  swp_cmd->add_option("--chi", swp.chi, "ground-state bond dimension (0 = figure default)");
  swp_cmd->add_option("--layers", swp.layers, "circuit depth (0 = figure default)");
  swp_cmd->add_option("--chi-cap", swp.chi_cap, "compilation bond cap (0 = figure default)");
  swp_cmd->add_option("--hx", swp.hx, "transverse field for fig3/fig4");
  swp_cmd->add_option("--seed", swp.seed, "dmrg seed");
  swp_cmd->add_option("--threads", swp.threads, "worker threads")->check(CLI::PositiveNumber);
  swp_cmd->add_option("--out", swp.out, "csv file to write")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("mpdc");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (gs_cmd->parsed()) return gs.run(out, err);
    if (ghz_cmd->parsed()) return ghz.run(out);
    if (enc_cmd->parsed()) return enc.run(out, err);
    if (fid_cmd->parsed()) return fid.run(out);
    if (exp_cmd->parsed()) return exp.run(out);
    if (ver_cmd->parsed()) return ver.run(out);
    if (swp_cmd->parsed()) return swp.run(out, err);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mpdc
