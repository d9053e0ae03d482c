import json
import subprocess
import sys
from pathlib import Path

import pytest

from cartanred.cli import EXIT_FAIL, EXIT_INPUT, EXIT_MISMATCH, EXIT_PASS, exit_code, main
from cartanred.report import Report

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "args, code",
    [
        (["verify", "--input", "so3_volume.json", "--suite", "cartan"], EXIT_PASS),
        (["verify", "--input", "so3_volume.json", "--suite", "gerstenhaber"], EXIT_PASS),
        (["verify", "--input", "so3_volume.json", "--suite", "linfty"], EXIT_PASS),
        (["verify", "--input", "abelian3.json", "--suite", "cartan"], EXIT_PASS),
        (["verify", "--input", "abelian3.json", "--suite", "constraint"], EXIT_PASS),
        (["verify", "--input", "gl2_borel.json", "--suite", "constraint"], EXIT_PASS),
        (["verify", "--input", "gl2_borel.json", "--suite", "reduction"], EXIT_PASS),
        (["verify", "--input", "gl2_broken_ideal.json", "--suite", "constraint"], EXIT_FAIL),
        (["verify", "--input", "gl2_broken_ideal.json", "--suite", "reduction"], EXIT_FAIL),
        (["verify", "--input", "r3_flipped.json", "--suite", "linfty"], EXIT_FAIL),
        (["verify", "--input", "r5_flipped.json", "--suite", "reduction", "--degree-bound", "1"], EXIT_FAIL),
        (["verify", "--input", "broken_jacobi.json", "--suite", "cartan"], EXIT_INPUT),
        (["reduce", "--input", "r5.json"], EXIT_PASS),
        (["reduce", "--input", "plane.json"], EXIT_PASS),
        (["reduce", "--input", "plane_bad_symmetry.json"], EXIT_INPUT),
        (["ham0", "--input", "so3_volume.json"], EXIT_PASS),
    ],
)
def test_commands(args, code, capsys):
    args = [str(INSTANCES / a) if a.endswith(".json") else a for a in args]
    got, out, err = run(args, capsys)
    assert got == code, out + err


def test_fixtures_exit_codes(capsys):
    assert run(["fixture", "r3-volume"], capsys)[0] == EXIT_PASS
    assert run(["fixture", "so3-volume"], capsys)[0] == EXIT_PASS
    assert run(["fixture", "symplectic-imq"], capsys)[0] == EXIT_PASS
    assert run(["fixture", "constraint-manifold"], capsys)[0] == EXIT_PASS
    code, out, _ = run(["fixture", "r5-residue", "--format", "json"], capsys)
    data = json.loads(out)
    assert "infeasibility_certificate" in data
    # the literal downstairs pair is not Hamiltonian, so the fixture reports a failure
    assert code == EXIT_FAIL


def test_exit_code_mismatch():
    rep = Report("x")
    rep.add("ok", True)
    assert exit_code(rep, expect_infeasible=True) == EXIT_MISMATCH
    rep.infeasible = {"rows": []}
    assert exit_code(rep, expect_infeasible=True) == EXIT_PASS


def test_json_byte_stable(capsys):
    args = ["reduce", "--input", str(INSTANCES / "r5.json"), "--format", "json", "--degree-bound", "1"]
    _, a, _ = run(args, capsys)
    _, b, _ = run(args, capsys)
    assert a == b
    assert "time" not in json.loads(a)


def test_schema_diagnostics(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "schema_version": 1,\n  "backend": {\n    "type": "lie",\n    "dim": "three"\n  }\n}\n')
    code, _, err = run(["verify", "--input", str(bad), "--suite", "cartan"], capsys)
    assert code == EXIT_INPUT
    assert ":5: backend.dim:" in err


def test_invalid_json_line(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1,\n "backend": {"type": "lie",}\n}')
    code, _, err = run(["ham0", "--input", str(bad)], capsys)
    assert code == EXIT_INPUT
    assert "bad.json:2:" in err


def test_missing_omega(capsys):
    code, _, err = run(["ham0", "--input", str(INSTANCES / "abelian3.json")], capsys)
    assert code == EXIT_INPUT and "omega" in err


def test_bad_arguments(capsys):
    assert main(["verify", "--suite", "nope"]) == EXIT_INPUT


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "cartanred", "fixture", "so3-volume"], capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.startswith("suite so3-volume: PASS")
