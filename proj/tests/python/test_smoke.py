import json
import os
import subprocess

import pytest

import mpdc


def test_version_string():
    assert mpdc.__version__.count(".") == 2


def test_ghz_encode_is_exact():
    psi = mpdc.ghz(8)
    assert psi.n_sites == 8
    assert psi.max_bond == 2
    circuit, report = mpdc.encode(psi, 1, 8)
    assert report.nlf[1] <= 1e-10
    assert mpdc.fidelity_nlf(circuit, psi, 8) <= 1e-10
    phi = mpdc.evolve_circuit(circuit, 8)
    assert abs(abs(mpdc.inner(psi, phi)) - 1.0) < 1e-10


def test_ground_state_matches_exact_diagonalization():
    res = mpdc.ground_state("heisenberg", 8, chi=16)
    assert res.converged
    exact = mpdc.exact_ground_energy("heisenberg", 8)
    assert abs(res.energy - exact) < 1e-8 * abs(exact)
    assert abs(mpdc.energy_expectation("heisenberg", 8, 0.0, res.state) - res.energy) < 1e-10


def test_schedule_simulation_matches_dense():
    psi = mpdc.random_state(6, d=2, chi=4, seed=11)
    circuit, _ = mpdc.encode(psi, 2, 8)
    sched = mpdc.qubit_efficient_schedule(circuit)
    assert sched.n_wires == circuit.n_layers + 2
    dense = mpdc.circuit_statevector(circuit)
    reused = mpdc.simulate_statevector(sched)
    assert max(abs(x - y) for x, y in zip(dense, reused)) < 1e-11


def test_truncation_reports_its_fidelity():
    psi = mpdc.random_state(10, d=2, chi=8, seed=5)
    small, estimate = mpdc.truncate(psi, 2)
    assert small.max_bond <= 2
    overlap = abs(mpdc.inner(psi, small))
    assert 0.0 < overlap <= 1.0 + 1e-12
    assert estimate == pytest.approx(overlap, abs=0.05)


def test_state_io_roundtrip(tmp_path):
    psi = mpdc.random_state(5, d=2, chi=4, seed=3)
    path = str(tmp_path / "state.json")
    mpdc.save_state(psi, path)
    back = mpdc.load_state(path)
    assert abs(abs(mpdc.inner(psi, back)) - 1.0) < 1e-12


def test_errors_are_translated():
    psi = mpdc.random_state(5, d=2, chi=4, seed=3)
    with pytest.raises(mpdc.Error):
        mpdc.encode(psi, 0, 8)


def test_cli_binary_pipeline(tmp_path):
    cli = os.environ.get("MPDC_CLI")
    if not cli:
        pytest.skip("MPDC_CLI not set")

    state = tmp_path / "ghz.json"
    run = subprocess.run([cli, "ghz", "--n", "6", "--out", str(state)],
                         capture_output=True, text=True)
    assert run.returncode == 0

    circuit = tmp_path / "circuit.json"
    run = subprocess.run([cli, "encode", "--in", str(state), "--layers", "1",
                          "--out", str(circuit)], capture_output=True, text=True)
    assert run.returncode == 0
    assert run.stdout.startswith("nlf=")

    data = json.loads(circuit.read_text())
    assert data["format_version"] == 1
    assert data["n_layers"] == 1
    assert len(data["gates"]) == 6

    loaded = mpdc.load_circuit(str(circuit))
    assert mpdc.fidelity_nlf(loaded, mpdc.ghz(6), 4) <= 1e-10
