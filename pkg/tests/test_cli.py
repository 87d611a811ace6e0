import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from canonoid import cli
from canonoid.jacobi import closed_form_eps0


def _strict(text):
    def bad(c):
        raise ValueError(f"non-standard constant {c}")

    return json.loads(text, parse_constant=bad)


def run(tmp_path, *args, name="out"):
    path = tmp_path / name
    status = cli.main([*args, "--out", str(path)])
    return status, path.read_bytes() if path.exists() else None


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)


QUICK = [
    ["recursion"],
    ["eigenfunction"],
    ["eigenfunction", "--rep", "z"],
    ["eigenfunction", "--rep", "z", "--angle", "0.6"],
    ["algebra-check", "--cutoff", "30"],
    ["heisenberg", "--cutoff", "30"],
    ["squeeze", "--kt", "0.01", "0.02"],
    ["classical"],
    ["ermakov"],
    ["moment-check"],
]


@pytest.mark.parametrize("args", QUICK, ids=lambda a: " ".join(a))
def test_commands_pass_and_emit_strict_json(tmp_path, args):
    status, data = run(tmp_path, *args)
    assert status == 0
    payload = _strict(data.decode())
    assert isinstance(payload, dict)


@pytest.mark.parametrize("args", [["recursion", "--n-max", "50"], ["classical"], ["squeeze", "--kt", "0.05"]])
def test_byte_identical_reruns(tmp_path, args):
    _, a = run(tmp_path, *args, name="a")
    _, b = run(tmp_path, *args, name="b")
    assert a == b
    _, c = run(tmp_path, *args, "--format", "csv", name="c")
    _, d = run(tmp_path, *args, "--format", "csv", name="d")
    assert c == d


def test_spectrum_report(tmp_path):
    status, data = run(tmp_path, "spectrum", "--eps-ref", "0", "--interval", "-10", "10", "--n-max", "2000", "--tol", "1e-10")
    assert status == 0
    rep = _strict(data.decode())
    assert {"eigenvalues", "eps_ref", "n_max", "tol", "diagnostics", "checks"} <= set(rep)
    ev = np.array(rep["eigenvalues"])
    assert np.max(np.abs(np.sort(-ev) - ev)) < 1e-8
    assert all(rep["checks"].values())


def test_recursion_csv_matches_closed_form(tmp_path):
    status, data = run(tmp_path, "recursion", "--eps", "0", "--n-max", "1000", "--format", "csv")
    assert status == 0
    lines = data.decode().splitlines()
    assert lines[0].startswith("# columns: n, f_n, closed_form, recursion_residual.")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert len(rows) == 1001
    ref = closed_form_eps0(1000).values
    for r in rows:
        n = int(r["n"])
        if n % 2 == 0:
            assert abs(float(r["f_n"]) - ref[n]) <= 1e-10 * abs(ref[n])
        else:
            assert float(r["f_n"]) == 0.0


@pytest.mark.parametrize("cmd", ["spectrum", "recursion", "eigenfunction", "squeeze", "classical", "ermakov"])
def test_csv_header_documents_columns(tmp_path, cmd):
    extra = ["--kt", "0.01"] if cmd == "squeeze" else []
    status, data = run(tmp_path, cmd, *extra, "--format", "csv")
    assert status == 0
    first, second = data.decode().splitlines()[:2]
    assert first.startswith("# columns: ")
    cols = first[len("# columns: "):].split(".")[0].split(", ")
    assert second.split(",") == cols


def test_floats_have_17_significant_digits():
    assert cli.encode_json(0.1) == "0.10000000000000001"
    assert cli.encode_json({"b": 1, "a": [math.nan, 2.5]}) == '{"a": [null, 2.5], "b": 1}'
    assert _strict(cli.encode_json(1 - 2j)) == {"re": 1.0, "im": -2.0}
    assert cli.encode_json(np.float64(1 / 3)) == "0.33333333333333331"
    assert float(cli.encode_json(1 / 3)) == 1 / 3
    with pytest.raises(TypeError):
        cli.encode_json(object())


def test_seed_environment_override(tmp_path, monkeypatch):
    _, base = run(tmp_path, "classical", name="base")
    _, seeded = run(tmp_path, "classical", "--seed", "7", name="seeded")
    assert base != seeded
    monkeypatch.setenv(cli.SEED_ENV, "7")
    _, env = run(tmp_path, "classical", name="env")
    assert env == seeded
    assert _strict(env.decode())["seed"] == 7


def test_bad_seed_environment_is_config_error(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.SEED_ENV, "seven")
    status, data = run(tmp_path, "recursion")
    assert status == 2 and data is None
    assert cli.SEED_ENV in capsys.readouterr().err


@pytest.mark.parametrize(
    "args",
    [
        ["spectrum", "--tol", "1e-12"],
        ["spectrum", "--interval", "3", "1"],
        ["spectrum", "--n-max", "100"],
        ["recursion", "--f0", "0"],
        ["eigenfunction", "--grid", "0.0", "3"],
        ["algebra-check", "--margin", "1"],
        ["squeeze", "--kt", "0.5"],
        ["classical", "--variant", "3"],
        ["classical", "--lambda", "-1"],
        ["ermakov", "--sigma0", "-1"],
        ["moment-check", "--moments", "1", "0"],
        ["algebra-check", "--format", "csv"],
        ["heisenberg", "--format", "csv"],
    ],
    ids=lambda a: " ".join(a),
)
def test_invalid_configuration_exits_2(tmp_path, args, capsys):
    status, data = run(tmp_path, *args)
    assert status == 2 and data is None
    assert "invalid configuration" in capsys.readouterr().err


def test_io_error_exits_2_with_path(tmp_path, capsys):
    target = tmp_path / "missing" / "r.json"
    assert cli.main(["recursion", "--n-max", "10", "--out", str(target)]) == 2
    assert str(target) in capsys.readouterr().err


def test_failed_check_exits_1_and_still_writes(tmp_path):
    status, data = run(tmp_path, "moment-check", "--moments", "1", "0", "1", "0", "0.5")
    assert status == 1
    rep = _strict(data.decode())
    assert rep["psd"] is False and rep["min_eigenvalue"] < 0
    status, data = run(tmp_path, "eigenfunction", "--tol", "1e-30", name="f")
    assert status == 1 and _strict(data.decode())["checks"]["ode_residual"] is False


def test_stdout_default(capsys):
    assert cli.main(["recursion", "--n-max", "4"]) == 0
    rep = _strict(capsys.readouterr().out)
    assert rep["values"][:3] == pytest.approx([1.0, 0.0, -2**-1.5], rel=1e-15)


def test_console_script_entry_point(tmp_path):
    out = tmp_path / "m.json"
    proc = subprocess.run(
        [sys.executable, "-m", "canonoid.cli", "moment-check", "--gaussian", "3", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert _strict(out.read_text())["moments"] == [1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0]
