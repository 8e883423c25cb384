import json
import subprocess
import sys

import numpy as np
import pytest

from krein import io
from krein.cli import EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main
from krein.errors import InvalidSpectrum, InvalidString
from krein.scales import Power, PowerLog, Tabulated
from krein.spectral import spectral_measure
from krein.strings import StieltjesString

THREE = StieltjesString([-3.0, -1.0, -0.2], [0.5, 1.5, 0.7], 0.5)


@pytest.fixture
def single_file(tmp_path):
    p = tmp_path / "single.json"
    p.write_text(json.dumps({"atoms": [{"x": 0.0, "w": 2.0}], "l": 1.0}))
    return str(p)


@pytest.fixture
def three_file(tmp_path):
    p = tmp_path / "three.json"
    io.save_string(THREE, p)
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


# io

def test_string_round_trip(tmp_path):
    p = tmp_path / "s.json"
    io.save_string(THREE, p)
    back = io.load_string(p)
    assert np.array_equal(back.positions, THREE.positions)
    assert np.array_equal(back.masses, THREE.masses)
    assert back.l == THREE.l


def test_infinite_length_serialises_as_string():
    d = io.string_to_dict(StieltjesString([-1.0], [1.0]))
    assert d["l"] == "inf"
    assert io.string_from_dict(d).l == float("inf")


def test_spectrum_round_trip(tmp_path):
    sig = spectral_measure(THREE)
    p = tmp_path / "sig.json"
    io.save_spectrum(sig, p)
    back = io.load_spectrum(p)
    assert np.array_equal(back.xi, sig.xi)
    assert np.array_equal(back.weights, sig.weights)


@pytest.mark.parametrize("doc", [{}, {"atoms": []}, {"atoms": [{"x": 0.0}]},
                                 {"atoms": [{"x": 0.0, "w": 1.0}], "extra": 1}])
def test_bad_string_documents(doc):
    with pytest.raises(InvalidString):
        io.string_from_dict(doc)


def test_bad_spectrum_document():
    with pytest.raises(InvalidSpectrum):
        io.spectrum_from_dict({"atoms": [{"xi": 1.0}]})


def test_malformed_json_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InvalidString):
        io.load_string(p)


@pytest.mark.parametrize("doc,kind", [({"kind": "power", "alpha": 2}, Power),
                                      ({"kind": "powerlog", "alpha": 2, "c": 3}, PowerLog),
                                      ({"kind": "tabulated", "xs": [0, 0.5, 1], "ys": [0, 0.25, 1]}, Tabulated)])
def test_scale_from_dict(doc, kind):
    assert isinstance(io.scale_from_dict(doc), kind)


def test_scale_from_dict_rejects_unknown_kind():
    with pytest.raises(ValueError):
        io.scale_from_dict({"kind": "exp"})


def test_parse_grid():
    assert np.allclose(io.parse_grid("0:1:5"), np.linspace(0, 1, 5))
    assert np.allclose(io.parse_grid("geom:1:100:3"), [1, 10, 100])
    assert np.allclose(io.parse_grid("1, 2,3"), [1, 2, 3])
    with pytest.raises(ValueError):
        io.parse_grid("a:b:c")


def test_format_csv_uses_repr():
    text = io.format_csv(("a", "b"), [(0.1, 3), (np.float64(1 / 3), "x")])
    assert text == "a,b\n0.1,3\n0.3333333333333333,x\n"


# cli

def test_eigs_single_atom(single_file, capsys):
    code, out, err = run(["eigs", "--string", single_file, "--a", "1"], capsys)
    assert code == EXIT_PASS
    assert "mu_1 = 0.5" in err
    assert out.splitlines()[1].split(",")[1] == "0.5"


def test_malformed_json_exits_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("[1, 2")
    code, _, _ = run(["eigs", "--string", str(p), "--a", "1"], capsys)
    assert code == EXIT_INPUT


def test_missing_required_option_exits_2(single_file, capsys):
    code, _, err = run(["phi", "--string", single_file], capsys)
    assert code == EXIT_INPUT
    assert "--lam" in err or "lambda" in err


def test_unknown_subcommand_exits_2(capsys):
    assert run(["nope"], capsys)[0] == EXIT_INPUT


def test_csv_is_byte_identical(three_file, capsys):
    argv = ["green", "--string", three_file, "--lambda", "-1.5"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second and first


def test_out_file(three_file, tmp_path, capsys):
    out = tmp_path / "phi.csv"
    code, stdout, _ = run(["phi", "--string", three_file, "--lambda", "-1", "--grid=-3:0:7",
                           "--out", str(out)], capsys)
    assert code == EXIT_PASS and stdout == ""
    lines = out.read_text().splitlines()
    assert lines[0] == "x,phi,phi_plus" and len(lines) == 8


@pytest.mark.parametrize("argv", [
    ["spectrum"], ["spectrum", "--format", "json"], ["heat"], ["roundtrip"],
])
def test_subcommands_on_string(argv, three_file, capsys):
    code, out, _ = run([*argv, "--string", three_file], capsys)
    assert code == EXIT_PASS
    assert out


@pytest.mark.parametrize("action", ["verify-sandwich", "verify-jensen"])
def test_scale_reports(action, three_file, capsys):
    code, out, err = run(["scale", action, "--string", three_file, "--samples", "2000"], capsys)
    assert code == EXIT_PASS
    assert out == "" and "PASS" in err
    code, out, _ = run(["scale", action, "--string", three_file, "--samples", "2000", "--format", "json"], capsys)
    assert json.loads(out)["passed"] is True


def test_scale_heat_moment_runs(three_file, capsys):
    code, _, err = run(["scale", "verify-heat-moment", "--string", three_file, "--phi", "powerlog:2,3"], capsys)
    assert code in (EXIT_PASS, EXIT_FAIL)
    assert err


def test_scale_constants_json(capsys):
    code, out, _ = run(["scale", "constants", "--phi", "power:2", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == EXIT_PASS
    assert doc["alpha_plus"] == pytest.approx(2.0)
    assert dict((x, v) for x, v in doc["C_plus"])[2.0] == pytest.approx(4.0)


def test_heat_from_spectrum_file(three_file, tmp_path, capsys):
    _, out, _ = run(["spectrum", "--string", three_file, "--format", "json"], capsys)
    p = tmp_path / "sig.json"
    p.write_text(out)
    code, a, _ = run(["heat", "--spectrum", str(p), "--grid", "1,2"], capsys)
    _, b, _ = run(["heat", "--string", three_file, "--grid", "1,2"], capsys)
    assert code == EXIT_PASS
    pa = [float(r.split(",")[1]) for r in a.splitlines()[1:]]
    pb = [float(r.split(",")[1]) for r in b.splitlines()[1:]]
    assert pa == pytest.approx(pb, rel=1e-14)


def test_heat_rejects_nonpositive_times(three_file, capsys):
    assert run(["heat", "--string", three_file, "--grid", "0,1"], capsys)[0] == EXIT_INPUT


def test_roundtrip_from_spectrum(three_file, tmp_path, capsys):
    p = tmp_path / "sig.json"
    io.save_spectrum(spectral_measure(THREE), p)
    code, out, _ = run(["roundtrip", "--spectrum", str(p)], capsys)
    assert code == EXIT_PASS
    assert len(out.splitlines()) == 4


@pytest.mark.parametrize("action", ["verify-mgf", "verify-tilted", "verify-occupation"])
def test_mc_actions(action, single_file, capsys):
    code, _, err = run(["mc", action, "--string", single_file, "--samples", "20000", "--seed", "3"], capsys)
    assert code == EXIT_PASS, err


def test_mc_is_reproducible(single_file, capsys):
    argv = ["mc", "verify-mgf", "--string", single_file, "--samples", "5000", "--seed", "7", "--format", "json"]
    assert run(argv, capsys)[1] == run(argv, capsys)[1]


def test_asymptotics_small(capsys):
    code, out, _ = run(["asymptotics", "--atoms", "100,200", "--tol", "0.1"], capsys)
    assert code in (EXIT_PASS, EXIT_FAIL)
    assert out.splitlines()[0] == "n_atoms,ratio_min,ratio_max,max_dev"


def test_selftest_one_criterion(capsys):
    code, out, _ = run(["selftest", "--only", "1"], capsys)
    assert code == EXIT_PASS
    assert out.split()[:3] == ["criterion", "1", "PASS"]


def _manifest(tmp_path, **over):
    base = StieltjesString([-2.0, -1.0, -0.4], [1.0, 0.5, 2.0], 0.5)
    for i in range(3):
        io.save_string(base, tmp_path / f"s{i}.json")
    doc = {"schema_version": "1", "operation": "converge",
           "inputs": {"strings": [f"s{i}.json" for i in range(3)], "limit": "s0.json"},
           "conditions": ["A", "C"], "phi": {"kind": "power", "alpha": 2}}
    doc.update(over)
    p = tmp_path / "manifest.json"
    p.write_text(json.dumps(doc))
    return str(p)


def test_converge_manifest(tmp_path, capsys):
    code, out, err = run(["converge", _manifest(tmp_path)], capsys)
    assert code == EXIT_PASS
    assert json.loads(out)["passed"] is True
    assert "A: PASS" in err


def test_converge_writes_output(tmp_path, capsys):
    code, out, _ = run(["converge", _manifest(tmp_path, output="report.json")], capsys)
    assert code == EXIT_PASS and out == ""
    assert json.loads((tmp_path / "report.json").read_text())["schema_version"] == "1"


@pytest.mark.parametrize("over", [{"extra": 1}, {"conditions": ["Q"]}, {"operation": "invert"},
                                  {"schema_version": "2"}])
def test_manifest_validation(tmp_path, capsys, over):
    assert run(["converge", _manifest(tmp_path, **over)], capsys)[0] == EXIT_INPUT


def test_manifest_missing_phi(tmp_path, capsys):
    p = _manifest(tmp_path)
    doc = json.loads(open(p).read())
    del doc["phi"]
    open(p, "w").write(json.dumps(doc))
    assert run(["converge", p], capsys)[0] == EXIT_INPUT


def test_module_entry_point(single_file):
    proc = subprocess.run([sys.executable, "-m", "krein", "eigs", "--string", single_file, "--a", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "mu_1 = 0.5" in proc.stderr
