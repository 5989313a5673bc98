"""Tests for the CLI: subcommands, exit codes, pipes, and byte stability."""

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from ratdist.cli import run
from ratdist.planeset import Configuration, LatticePoint

F = Fraction


def invoke(argv, stdin_text=None):
    """Run the CLI in-process via run(); stdin via monkeyed sys.stdin."""
    proc = subprocess.run(
        [sys.executable, "-m", "ratdist.cli", *argv],
        input=stdin_text,
        capture_output=True,
        text=True,
    )
    try:
        payload = json.loads(proc.stdout)
    except json.JSONDecodeError:
        payload = None
    return proc.returncode, payload, proc


def config_json(k, pts, provenance=""):
    return json.dumps(
        Configuration(k, tuple(LatticePoint(F(x), F(y)) for x, y in pts), provenance).to_dict()
    )


TRIANGLE = config_json(1, [(0, 0), (3, 0), (0, 4)])
SQUARE = config_json(1, [(0, 0), (1, 0), (0, 1), (1, 1)])


def test_certify_m4():
    code, result, _ = invoke(["certify", "--m", "4"])
    assert code == 0
    assert result["status"] == "ok"
    assert result["payload"]["lhs"] == "16"
    assert result["payload"]["rhs"] == "8"
    assert result["payload"]["verdict"] is True


def test_certify_m3_violation():
    code, result, _ = invoke(["certify", "--m", "3"])
    assert code == 1
    assert result["status"] == "violation"
    assert result["payload"]["reason"] == "not ample"


def test_certify_from_configuration():
    rect = config_json(1, [(0, 0), (3, 0), (0, 4), (3, 4)])
    code, result, _ = invoke(["certify", "--base", "0,1,2,3", "-"], stdin_text=rect)
    assert code == 0 and result["payload"]["m"] == 4


def test_verify_square_violation():
    code, result, _ = invoke(["verify"], stdin_text=SQUARE)
    assert code == 1
    assert result["status"] == "violation"
    pairs = result["payload"]["failing_pairs"]
    assert {"i": 1, "j": 2, "squared": "2"} in pairs


def test_verify_triangle_ok():
    code, result, _ = invoke(["verify"], stdin_text=TRIANGLE)
    assert code == 0
    assert result["payload"]["distances"][1][2] == "5"


def test_generate_circle_pipe_audit():
    code, result, proc = invoke(["generate", "circle", "--n", "4"])
    assert code == 0
    code2, result2, _ = invoke(["audit"], stdin_text=proc.stdout)
    assert code2 == 1
    assert result2["payload"]["max_concyclic"] == 4
    assert result2["payload"]["strong_ok"] is False


def test_generate_line_pipe_verify_and_normalize():
    code, _, proc = invoke(["generate", "line", "--n", "4"])
    assert code == 0
    code2, _, proc2 = invoke(["verify"], stdin_text=proc.stdout)
    assert code2 == 0
    code3, result3, _ = invoke(["normalize"], stdin_text=proc.stdout)
    assert code3 == 0
    assert result3["payload"]["points"][1] == {"x": "1", "yc": "0"}


def test_invert_pipe_composition():
    code, result, proc = invoke(["invert", "--center", "0"], stdin_text=TRIANGLE)
    assert code == 0
    assert result["payload"]["points"][1] == {"x": "1/3", "yc": "0"}
    code2, _, _ = invoke(["verify"], stdin_text=proc.stdout)
    assert code2 == 0


def test_invert_usage_error():
    code, result, _ = invoke(["invert", "--center", "9"], stdin_text=TRIANGLE)
    assert code == 2 and result["status"] == "error"


def test_lift_ok_and_violation():
    rect = config_json(1, [(0, 0), (3, 0), (0, 4), (3, 4)])
    code, result, _ = invoke(["lift", "--base", "0,1,2,3", "-"], stdin_text=rect)
    assert code == 0
    assert result["payload"]["lifted"][0]["coords"] == ["0", "0", "1", "0", "3", "4", "5"]

    with_bad = config_json(1, [(0, 0), (3, 0), (0, 4), (3, 4), (1, 0)])
    code2, result2, _ = invoke(["lift", "--base", "0,1,2,3", "-"], stdin_text=with_bad)
    assert code2 == 1
    assert result2["payload"]["failures"][0]["index"] == 4
    assert result2["payload"]["failures"][0]["base_index"] == 3


def test_lift_needs_four_base_points():
    code, result, _ = invoke(["lift", "--base", "0,1,2", "-"], stdin_text=TRIANGLE)
    assert code == 2 and "ample" in result["diagnostics"][0]["message"]


def test_cover_line(tmp_path):
    curve = {"degree": 1, "monomials": [{"i": 0, "j": 1, "k": 0, "c": "1"}]}
    curve_file = tmp_path / "curve.json"
    curve_file.write_text(json.dumps(curve))
    cands = config_json(1, [(0, 1), (0, -1), (0, 2), (1, 1), (2, 5)])
    code, result, _ = invoke(["cover", "--curve", str(curve_file), "-"], stdin_text=cands)
    assert code == 0
    assert result["payload"]["cover"]["r"] == 6
    assert result["payload"]["cover"]["genus"] == 2
    assert result["payload"]["selection"]["transverse_points"] == 6


def test_cover_threshold_violation(tmp_path):
    curve = {"degree": 1, "monomials": [{"i": 0, "j": 1, "k": 0, "c": "1"}]}
    curve_file = tmp_path / "curve.json"
    curve_file.write_text(json.dumps(curve))
    cands = config_json(1, [(0, 1), (0, -1), (0, 2), (1, 1)])
    code, result, _ = invoke(["cover", "--curve", str(curve_file), "-"], stdin_text=cands)
    assert code == 1 and result["status"] == "violation"


def test_cover_conic_usage_error(tmp_path):
    conic = {
        "degree": 2,
        "monomials": [
            {"i": 2, "j": 0, "k": 0, "c": "1"},
            {"i": 0, "j": 2, "k": 0, "c": "1"},
            {"i": 0, "j": 0, "k": 2, "c": "-1"},
        ],
    }
    curve_file = tmp_path / "conic.json"
    curve_file.write_text(json.dumps(conic))
    cands = config_json(1, [(0, 1), (0, -1), (0, 2), (1, 1), (2, 5)])
    code, result, _ = invoke(["cover", "--curve", str(curve_file), "-"], stdin_text=cands)
    assert code == 2
    assert "inversion" in result["diagnostics"][0]["message"]


def test_search_spec_file(tmp_path):
    spec = {
        "k": 1,
        "numerator_bound": 2,
        "denominator_bound": 1,
        "target_size": 3,
        "require": "any",
    }
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(json.dumps(spec))
    code, result, _ = invoke(["search", "--spec", str(spec_file)])
    assert code == 0
    assert result["payload"]["frontier"] == []
    assert len(result["payload"]["found"]) > 0

    # resume from a partial checkpoint gives the same final found set
    code2, partial, _ = invoke(["search", "--spec", str(spec_file), "--max-cells", "6"])
    assert code2 == 0 and partial["payload"]["frontier"]
    resume_file = tmp_path / "cp.json"
    resume_file.write_text(json.dumps(partial["payload"]))
    code3, resumed, _ = invoke(["search", "--resume", str(resume_file)])
    assert code3 == 0
    assert resumed["payload"]["found"] == result["payload"]["found"]


def test_search_progress_stderr(tmp_path):
    spec_file = tmp_path / "spec.json"
    spec_file.write_text(
        json.dumps({"k": 1, "numerator_bound": 1, "denominator_bound": 1, "target_size": 3})
    )
    code, _, proc = invoke(["search", "--spec", str(spec_file), "--progress"])
    assert code == 0
    events = [json.loads(line) for line in proc.stderr.splitlines() if line.strip()]
    assert events and all("event" in e for e in events)
    # stdout stays a single parseable CommandResult
    json.loads(proc.stdout)


def test_malformed_json_is_usage_error():
    code, result, _ = invoke(["verify"], stdin_text="{not json")
    assert code == 2
    assert result["status"] == "error"
    assert "malformed JSON" in result["diagnostics"][0]["message"]


def test_unknown_command_is_usage_error():
    code, result, _ = invoke(["frobnicate"])
    assert code == 2 and result["status"] == "error"


def test_missing_schema_key_is_usage_error():
    code, result, _ = invoke(["verify"], stdin_text=json.dumps({"k": 1}))
    assert code == 2
    assert "invalid configuration" in result["diagnostics"][0]["message"]


def test_byte_stable_output():
    _, _, proc1 = invoke(["certify", "--m", "4"])
    _, _, proc2 = invoke(["certify", "--m", "4"])
    assert proc1.stdout == proc2.stdout
    _, _, p3 = invoke(["audit"], stdin_text=SQUARE)
    _, _, p4 = invoke(["audit"], stdin_text=SQUARE)
    assert p3.stdout == p4.stdout


def test_run_in_process_matches_subprocess():
    result, code = run(["certify", "--m", "5"])
    assert code == 0
    assert result["payload"]["lhs"] == "128" and result["payload"]["rhs"] == "64"
