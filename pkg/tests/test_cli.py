"""End-to-end command behavior: exit codes, PASS lines, artifact bytes."""

import json

import pytest

from gnplab.cli import Status, main

RADIAL_SPEC = {
    "samples": 256,
    "core": {"kind": "disc", "params": {"center": [0.0, 0.0], "radius": 0.5}},
    "profile": {"kind": "constant", "params": {"value": 0.5}},
}


@pytest.fixture
def spec_path(tmp_path):
    p = tmp_path / "radial.json"
    p.write_text(json.dumps(RADIAL_SPEC))
    return p


def _artifacts(out_dir, command):
    csvs = sorted(out_dir.glob(f"{command}_*.csv"))
    jsons = sorted(out_dir.glob(f"{command}_*.json"))
    return csvs, jsons


def test_status_tracks_failures(capsys):
    st = Status()
    st.emit("PASS", "a", "fine")
    assert not st.failed
    st.emit("FAIL", "b", "broken")
    assert st.failed
    out = capsys.readouterr().out
    assert "PASS a: fine" in out and "FAIL b: broken" in out


def test_solve_command(spec_path, tmp_path, capsys):
    out = tmp_path / "art"
    rc = main(["solve", "--domain", str(spec_path), "--grid-h", "0.03125",
               "--out", str(out)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "PASS residual" in stdout
    assert "PASS positivity" in stdout
    csvs, jsons = _artifacts(out, "solve")
    assert len(csvs) == 1 and len(jsons) == 1
    header = csvs[0].read_text().splitlines()[0]
    assert header == "x,y,mask,u,grad_u"


def test_artifacts_are_deterministic(spec_path, tmp_path):
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    for out in (out1, out2):
        rc = main(["solve", "--domain", str(spec_path), "--grid-h", "0.03125",
                   "--out", str(out)])
        assert rc == 0
    (c1,), (j1,) = _artifacts(out1, "solve")
    (c2,), (j2,) = _artifacts(out2, "solve")
    assert c1.name == c2.name            # hash ignores the output location
    assert c1.read_bytes() == c2.read_bytes()
    assert j1.read_bytes() == j2.read_bytes()


def test_levelsets_command(spec_path, tmp_path, capsys):
    out = tmp_path / "art"
    rc = main(["levelsets", "--domain", str(spec_path), "--grid-h", "0.03125",
               "--t", "0.02", "--t", "0.04", "--out", str(out)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "PASS green_t_0.02" in stdout
    assert "PASS area_monotone_t_0.04" in stdout
    csvs, _ = _artifacts(out, "levelsets")
    assert csvs and csvs[0].read_text().startswith("t,area,perimeter")


def test_levelsets_level_out_of_range(spec_path, tmp_path):
    rc = main(["levelsets", "--domain", str(spec_path), "--grid-h", "0.03125",
               "--t", "10.0", "--out", str(tmp_path)])
    assert rc == 2


def test_measures_command(spec_path, tmp_path, capsys):
    rc = main(["measures", "--domain", str(spec_path), "--out", str(tmp_path)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "PASS tau_lower_bound" in stdout
    assert "INFO gamma" in stdout


def test_measures_bad_half_space(spec_path, tmp_path):
    rc = main(["measures", "--domain", str(spec_path), "--half-space", "1,2",
               "--out", str(tmp_path)])
    assert rc == 2


def test_inequalities_command(spec_path, tmp_path, capsys):
    rc = main(["inequalities", "--domain", str(spec_path), "--grid-h",
               "0.03125", "--count", "1", "--out", str(tmp_path)])
    assert rc == 0
    stdout = capsys.readouterr().out
    for name in ("faber_krahn", "upper_bound_u", "payne_rayner"):
        assert f"PASS {name}" in stdout
    rc2 = main(["inequalities", "--domain", str(spec_path), "--family",
                "sine", "--out", str(tmp_path)])
    assert rc2 == 2


def test_bernoulli_command(spec_path, tmp_path, capsys):
    rc = main(["bernoulli", "--domain", str(spec_path), "--grid-h", "0.03125",
               "--t", "0.0", "--t", "0.04", "--out", str(tmp_path)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "PASS coupling_spread_t_0" in stdout


def test_converge_command(spec_path, tmp_path, capsys):
    rc = main(["converge", "--domain", str(spec_path), "--grid-h", "0.03125",
               "--n-list", "8,16,32", "--t", "0.04", "--out", str(tmp_path)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "PASS monotone_sup_tau_diff" in stdout
    csvs, jsons = _artifacts(tmp_path, "converge")
    assert csvs and jsons
    meta = json.loads(jsons[0].read_text())
    assert meta["n_list"] == [8, 16, 32]
    assert all(meta["monotone"].values())


def test_example103_command(tmp_path, capsys):
    rc = main(["example103", "--samples", "192", "--x-max", "6.0",
               "--out", str(tmp_path)])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "INFO star_shaped: fails" in stdout
    assert "INFO gamma_vs_claim" in stdout
    assert "INFO cap_tau_vs_claim" in stdout
    assert "INFO hull" in stdout


def test_config_errors(tmp_path, spec_path):
    assert main(["solve", "--out", str(tmp_path)]) == 2   # no --domain
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "--domain", str(bad), "--out", str(tmp_path)]) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text(json.dumps({"core": {"kind": "blob"},
                                   "profile": {"kind": "constant",
                                               "params": {"value": 1.0}}}))
    assert main(["solve", "--domain", str(unknown), "--out",
                 str(tmp_path)]) == 2
    missing = tmp_path / "nope.json"
    assert main(["solve", "--domain", str(missing), "--out",
                 str(tmp_path)]) == 2
