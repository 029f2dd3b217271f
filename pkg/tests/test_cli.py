"""Command-line pipeline: round trips, determinism and exit codes."""

import json

import numpy as np
import pytest

from hybrid_orbit.cli import main
from hybrid_orbit.fixtures import CATALOG, paper_fixture
from hybrid_orbit.jsonio import dump_json, matrix_to_obj


FAST = ["--base-step", "5e-3"]


def run(argv):
    return main([str(a) for a in argv])


@pytest.mark.parametrize("system", CATALOG)
def test_analyze_synthesize_certify_round_trip(system, tmp_path):
    jacs = tmp_path / "jacs.json"
    gains = tmp_path / "gains.json"
    cert = tmp_path / "cert.json"
    assert run(["analyze", "--system", system, "-o", jacs] + FAST) == 0
    code = run(["synthesize", "-i", jacs, "--method", "scale", "-o", gains])
    assert code in (0, 1)
    assert run(["certify", "-i", gains, "-o", cert]) == code

    doc = json.loads(jacs.read_text())
    assert {p["phase"] for p in doc["phases"]} == set(range(1, len(doc["phases"]) + 1))
    report = json.loads(gains.read_text())["report"]
    assert report["verdict"] in ("stable", "unstable")


def test_synthesize_methods_and_flags(tmp_path):
    jacs = tmp_path / "jacs.json"
    out = tmp_path / "out.json"
    assert run(["analyze", "--system", "stable-2", "-o", jacs] + FAST) == 0

    assert run(["synthesize", "-i", jacs, "--method", "symmetric", "-o", out]) == 0
    assert json.loads(out.read_text())["report"]["product_radius"] < 1e-6

    assert run(["synthesize", "-i", jacs, "--method", "scale", "--eta", "0.9", "-o", out]) == 0
    doc = json.loads(out.read_text())
    assert doc["method"] == "scale_factor"
    assert all(r < 1e-6 for r in doc["residuals"])
    assert doc["report"]["theorem4"]["passed"]  # eta < 1 restores a strict margin

    assert run(["synthesize", "-i", jacs, "--method", "dlqr", "--q", "10", "-o", out]) == 0
    assert json.loads(out.read_text())["q_scalings"] == [1.0, 1.0]


def test_synthesize_rejects_mismatched_flags(tmp_path):
    jacs = tmp_path / "jacs.json"
    assert run(["analyze", "--system", "stable-2", "-o", jacs] + FAST) == 0
    out = tmp_path / "out.json"
    assert run(["synthesize", "-i", jacs, "--method", "scale", "--q", "2", "-o", out]) == 2
    assert run(["synthesize", "-i", jacs, "--method", "dlqr", "--eta", "0.5", "-o", out]) == 2


def test_synthesize_reference_jacobians_file(tmp_path):
    fx = paper_fixture()
    jacs = tmp_path / "reference_jacs.json"
    dump_json(
        {
            "phases": [
                {"A": matrix_to_obj(fx.A1), "F": matrix_to_obj(fx.F1)},
                {"A": matrix_to_obj(fx.A2), "F": matrix_to_obj(fx.F2)},
            ]
        },
        jacs,
    )
    out = tmp_path / "gains.json"
    assert run(["synthesize", "-i", jacs, "--method", "scale", "-o", out]) == 0
    report = json.loads(out.read_text())["report"]
    assert report["product_radius"] == pytest.approx(0.0173, abs=1e-3)
    assert report["verdict"] == "stable"


def test_certify_reference_pair_is_unstable(tmp_path):
    fx = paper_fixture()
    designed = tmp_path / "designed.json"
    dump_json({"designed": [matrix_to_obj(fx.remark1_A1d), matrix_to_obj(fx.remark1_A2d)]}, designed)
    out = tmp_path / "cert.json"
    assert run(["certify", "-i", designed, "-o", out]) == 1
    doc = json.loads(out.read_text())
    assert doc["verdict"] == "unstable"
    assert doc["product_radius"] == pytest.approx(1.0453, abs=1e-4)
    assert not doc["theorem3"]["passed"]


def test_malformed_inputs_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    out = tmp_path / "out.json"
    assert run(["synthesize", "-i", bad, "--method", "scale", "-o", out]) == 2
    missing_field = tmp_path / "missing.json"
    missing_field.write_text(json.dumps({"phases": [{"A": {"rows": 1}}]}))
    assert run(["synthesize", "-i", missing_field, "--method", "scale", "-o", out]) == 2
    assert run(["analyze", "--system", "not-a-system", "-o", out]) == 2
    assert run(["certify", "-i", tmp_path / "absent.json", "-o", out]) == 2


def test_numerical_failure_exits_three(tmp_path):
    # an uncontrollable phase: F = 0 with an expanding A
    jacs = tmp_path / "jacs.json"
    dump_json(
        {
            "phases": [
                {
                    "A": matrix_to_obj(2.0 * np.eye(2)),
                    "F": matrix_to_obj(np.zeros((2, 3))),
                }
            ]
        },
        jacs,
    )
    out = tmp_path / "out.json"
    assert run(["synthesize", "-i", jacs, "--method", "dlqr", "-o", out]) == 3


def test_outputs_are_byte_identical(tmp_path):
    jacs = tmp_path / "jacs.json"
    assert run(["analyze", "--system", "stable-2", "-o", jacs] + FAST) == 0
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    run(["synthesize", "-i", jacs, "--method", "dlqr", "-o", first])
    run(["synthesize", "-i", jacs, "--method", "dlqr", "-o", second])
    assert first.read_bytes() == second.read_bytes()

    sim1 = tmp_path / "a.csv"
    sim2 = tmp_path / "b.csv"
    args = ["simulate", "--system", "stable-2", "--method", "scale",
            "--cycles", 3, "--seed", 7] + FAST
    assert run(args + ["-o", sim1]) == 0
    assert run(args + ["-o", sim2]) == 0
    assert sim1.read_bytes() == sim2.read_bytes()


def test_simulate_zero_perturbation_stays_put(tmp_path):
    out = tmp_path / "sim.csv"
    assert run(["simulate", "--system", "stable-3", "--cycles", 3,
                "--perturb", "0", "-o", out] + FAST) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("cycle,err_norm,x1")
    assert len(lines) == 5  # header + initial + 3 cycles
    for line in lines[1:]:
        assert float(line.split(",")[1]) < 1e-7


def test_simulate_seed_changes_direction(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    base = ["simulate", "--system", "stable-2", "--cycles", 1, "--perturb", "1e-2"] + FAST
    assert run(base + ["--seed", 1, "-o", a]) == 0
    assert run(base + ["--seed", 2, "-o", b]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_verify_paper_exit_and_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert run(["verify-paper", "-o", out]) == 0
    printed = capsys.readouterr().out
    assert "compose_return_jacobian" in printed
    doc = json.loads(out.read_text())
    assert doc["passed"] is True
    assert len(doc["checks"]) == 11
