"""Command-line front end: schema, outputs, exit codes, canonical JSON."""

import json

from padiczeta.cli import run

BASE = {"p": "3", "f": "1", "modulus": ["0", "1"], "precision": "9",
        "matrix": [["1"]], "linear": ["0"], "constant": "0"}


def _run(capsys, command, payload, *extra):
    code = run([command, "--inline", json.dumps(payload), *extra])
    out = capsys.readouterr().out
    return code, out


def test_zeta_text(capsys):
    code, out = _run(capsys, "zeta", BASE)
    assert code == 0
    assert out.splitlines()[0] == "(2/3) / (1 - (1/3)*t^2)"


def test_zeta_json_roundtrip_is_byte_identical(capsys):
    code, out = _run(capsys, "zeta", BASE, "--format", "json", "--K", "4")
    assert code == 0
    doc = json.loads(out)
    assert json.dumps(doc, sort_keys=True, separators=(",", ":")) == out.strip()
    assert doc["series"] == ["2/3", "0", "2/9", "0"]
    assert doc["dispatch"] == "homogeneous"


def test_classify(capsys):
    payload = {"p": "2", "precision": "8",
               "matrix": [["1", "0", "0"], ["0", "3", "0"], ["0", "0", "5"]]}
    code, out = _run(capsys, "classify", payload)
    assert code == 0
    assert out.strip() == "Sq(1) + Hyp"


def test_reduce(capsys):
    payload = {"p": "2", "precision": "9", "matrix": [["1"]], "linear": ["1"]}
    code, out = _run(capsys, "reduce", payload)
    assert code == 0
    assert out.splitlines()[0] == "pi^1*x"


def test_poles_and_poincare(capsys):
    code, out = _run(capsys, "poles", BASE, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["denominator_shape"] == "(1 - t^2/q^1)"
    assert "classified_denominator" in doc
    code, out = _run(capsys, "poincare", BASE, "--K", "3")
    assert code == 0
    assert "series: 1" in out


def test_gf(capsys):
    code, out = _run(capsys, "gf", BASE, "--K", "2", "--modular-level", "1")
    assert code == 0
    assert "z^" in out and "-- level 1" in out


def test_verify_pass(capsys):
    code, out = _run(capsys, "verify", BASE, "--K", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "PASS" and doc["first_mismatch"] is None
    assert doc["oracle_prefix"][0] == "2/3"


def test_verify_f2_payload(capsys):
    payload = {"p": "2", "f": "2", "modulus": ["1", "1", "1"], "precision": "7",
               "matrix": [[["1", "0"]]], "linear": [["0", "0"]], "constant": ["0", "0"]}
    code, out = _run(capsys, "verify", payload, "--K", "5")
    assert code == 0
    assert json.loads(out)["status"] == "PASS"


def test_domain_error_exit_code(capsys):
    bad = dict(BASE, p="4")
    code, out = _run(capsys, "zeta", bad)
    assert code == 1
    assert "error" in json.loads(out)


def test_parse_error_exit_code(capsys):
    code = run(["zeta", "--inline", "{not json"])
    out = capsys.readouterr().out
    assert code == 1 and "error" in json.loads(out)


def test_unsupported_reduction_exit_code(capsys):
    payload = {"p": "2", "f": "2", "modulus": ["1", "1", "1"], "precision": "8",
               "matrix": [[["1", "0"]]], "linear": [["1", "0"]]}
    code, out = _run(capsys, "zeta", payload)
    assert code == 1
    assert "shared" in json.loads(out)["error"]


def test_series_guard(capsys):
    code, out = _run(capsys, "zeta", BASE, "--K", "65")
    assert code == 1


def test_precision_override_flag(capsys):
    code, out = _run(capsys, "zeta", dict(BASE, precision="3"), "--precision", "9")
    assert code == 0 and out.splitlines()[0] == "(2/3) / (1 - (1/3)*t^2)"
