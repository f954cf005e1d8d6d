import json

import numpy as np
import pytest

from echoent.cli import main
from echoent.model import PureDephasingModel, model_to_json, thermal_state

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)


def write_biased_model(path, v1, beta=1.0):
    model = PureDephasingModel(0.0, 0.0, SZ, np.zeros((2, 2), complex), v1)
    path.write_text(json.dumps(model_to_json(model, thermal_state(SZ, beta))))
    return path


# ------------------------------------------------------------------------ scan

def test_scan_fig1(tmp_path):
    code = main(["scan", "--scenario", "fig1", "--points", "801",
                 "--out", str(tmp_path)])
    assert code == 0
    csv = (tmp_path / "scan.csv").read_bytes()
    lines = csv.decode().strip().split("\n")
    assert len(lines) == 802  # header + 801 rows
    summary = json.loads((tmp_path / "scan_summary.json").read_text())
    flagged = [e["tau"] for e in summary["echo_induced"]]
    assert any(abs(t - 1.0) < 1e-12 for t in flagged)
    assert summary["cross_validation"]["disagree"] == 0
    # every emitted row satisfies |W| <= 1 + 1e-9
    for line in lines[1:]:
        vals = line.split(",")
        w_pre = complex(float(vals[1]), float(vals[2]))
        w_echo = complex(float(vals[3]), float(vals[4]))
        assert abs(w_pre) <= 1.0 + 1e-9
        assert abs(w_echo) <= 1.0 + 1e-9


def test_scan_deterministic_bytes(tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for out in (out1, out2):
        assert main(["scan", "--scenario", "random", "--seed", "5",
                     "--points", "31", "--out", str(out)]) == 0
    assert (out1 / "scan.csv").read_bytes() == (out2 / "scan.csv").read_bytes()
    assert (out1 / "scan_summary.json").read_bytes() == \
        (out2 / "scan_summary.json").read_bytes()


def test_scan_snapshot_balanced_state_has_no_flags(tmp_path):
    code = main(["scan", "--scenario", "sec4b", "--c0", "0.5",
                 "--out", str(tmp_path)])
    assert code == 0
    summary = json.loads((tmp_path / "scan_summary.json").read_text())
    assert summary["echo_induced"] == []


def test_scan_malformed_model_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = main(["scan", "--model", str(bad), "--tau-stop", "1.0",
                 "--out", str(tmp_path / "out")])
    assert code == 2
    assert not (tmp_path / "out" / "scan.csv").exists()


def test_scan_rejects_scenario_and_model_together(tmp_path):
    code = main(["scan", "--scenario", "fig1", "--model", "x.json",
                 "--out", str(tmp_path)])
    assert code == 2


def test_scan_model_file(tmp_path):
    path = write_biased_model(tmp_path / "m.json", SX)
    code = main(["scan", "--model", str(path), "--tau-start", "0.0",
                 "--tau-stop", "2.0", "--points", "21", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "scan.csv").read_text().strip().split("\n")
    assert len(lines) == 22


def test_scan_unknown_scenario(tmp_path):
    assert main(["scan", "--scenario", "nope", "--out", str(tmp_path)]) == 2


# -------------------------------------------------------------------- spectral

def test_spectral_static_model_chi_zero(tmp_path):
    path = write_biased_model(tmp_path / "m.json",
                              np.diag([0.8, -0.4]).astype(complex))
    code = main(["spectral", "--model", str(path), "--tau-start", "0.2",
                 "--tau-stop", "2.0", "--points", "7", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "spectral.csv").read_text().strip().split("\n")[1:]
    for row in rows:
        tau, chi, phi, w2re, w2im = map(float, row.split(","))
        assert abs(chi) < 1e-12
        assert abs(phi) < 1e-12
    peaks = json.loads((tmp_path / "spectral_peaks.json").read_text())
    assert all(abs(p[0]) < 1e-9 for p in peaks["peaks"])


def test_spectral_comb_perfect_echo_time(tmp_path):
    tstar = 1.3
    peaks = []
    for k in (1, 2):
        w = 2.0 * np.pi * k / tstar
        peaks += [[w, 1.0 / k], [-w, 1.0 / k]]
    psd = tmp_path / "comb.json"
    psd.write_text(json.dumps({"kind": "comb", "peaks": peaks}))
    code = main(["spectral", "--psd", str(psd), "--tau-start", str(tstar / 2),
                 "--tau-stop", str(2 * tstar), "--points", "4",
                 "--beta", "0.0", "--out", str(tmp_path)])
    assert code == 0
    rows = (tmp_path / "spectral.csv").read_text().strip().split("\n")[1:]
    by_tau = {float(r.split(",")[0]): float(r.split(",")[1]) for r in rows}
    assert any(abs(t - tstar) < 1e-12 and chi < 1e-10
               for t, chi in by_tau.items())
    # beta = 0 forces the phase-shift column to vanish
    assert all(abs(float(r.split(",")[2])) < 1e-12 for r in rows)


def test_spectral_requires_biased_family(tmp_path):
    model = PureDephasingModel(0.0, 0.0, SZ, SX, np.diag([1.0, 0.0]).astype(complex))
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model_to_json(model, thermal_state(SZ, 1.0))))
    code = main(["spectral", "--model", str(path), "--tau-stop", "1.0",
                 "--out", str(tmp_path)])
    assert code == 2


# --------------------------------------------------------------------- witness

def test_witness_certified(tmp_path):
    path = write_biased_model(tmp_path / "m.json", SX)
    code = main(["witness", "--model", str(path), "--out", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "witness.json").read_text())
    assert data["verdict"] == "certified-entangling"
    assert data["phi_max"] > 1e-3


def test_witness_not_certified(tmp_path):
    path = write_biased_model(tmp_path / "m.json",
                              np.diag([0.4, -0.9]).astype(complex))
    code = main(["witness", "--model", str(path), "--out", str(tmp_path)])
    assert code == 0
    data = json.loads((tmp_path / "witness.json").read_text())
    assert data["verdict"] == "not-certified"
    assert data["phi_max"] < 1e-10


def test_witness_hypothesis_violation_exits_4(tmp_path):
    model = PureDephasingModel(0.0, 0.0, SZ, 0.5 * SX, -SX)
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model_to_json(model, thermal_state(SZ, 1.0))))
    code = main(["witness", "--model", str(path), "--out", str(tmp_path)])
    assert code == 4
    assert not (tmp_path / "witness.json").exists()


# ------------------------------------------------------------------- reproduce

def test_reproduce_fig1(tmp_path):
    assert main(["reproduce", "fig1", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "scan.csv").read_text().strip().split("\n")
    assert len(lines) == 802


def test_reproduce_sec4b(tmp_path):
    assert main(["reproduce", "sec4b", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "sec4b_identities.json").read_text())
    assert len(data["table"]) == 5
    by_c0 = {row["c0"]: row for row in data["table"]}
    assert by_c0[0.5]["separable_echo"] is True
    assert by_c0[0.7]["separable_echo"] is False
    assert abs(by_c0[0.7]["W_pre"][0] - 0.4) < 1e-12
    assert abs(by_c0[0.7]["W_echo"][0]) < 1e-12
    echoed = np.array(data["echoed_operator"])
    assert np.allclose(echoed[..., 0], [[0, 1], [-1, 0]], atol=1e-12)
