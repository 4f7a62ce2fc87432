"""End-to-end command-line contract: exit codes, report determinism, formats."""

import json

import numpy as np
import pytest

from robustcut.cli import (EXIT_CERT_FAIL, EXIT_NO_CONVERGE, EXIT_OK,
                           EXIT_PARSE, main)
from robustcut.instances import load_instance
from robustcut.uncertainty import load_spec, worst_case_weights


def run(*argv):
    return main(list(argv))


@pytest.fixture()
def cycle5(tmp_path):
    path = tmp_path / "c5.json"
    assert run("gen", "--kind", "cycle", "--n", "5", "--out", str(path)) == EXIT_OK
    return str(path)


@pytest.fixture()
def triangle_file(tmp_path):
    path = tmp_path / "k3.json"
    assert run("gen", "--kind", "complete", "--n", "3", "--out", str(path)) == EXIT_OK
    return str(path)


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def test_gen_deterministic_bytes(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    for path in (a, b):
        assert run("gen", "--kind", "gnp", "--n", "6", "--p", "0.6",
                   "--seed", "3", "--out", str(path)) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    inst = load_instance(str(a))
    assert inst.n == 6 and inst.m >= 1


def test_gen_needs_kind_or_spec(capsys):
    assert run("gen") == EXIT_PARSE
    assert "error:" in capsys.readouterr().err


def test_gen_box_spec_bounds(tmp_path, cycle5):
    spec_path = tmp_path / "box.json"
    assert run("gen", "--spec", "box", "--width", "0.2",
               "--instance", cycle5, "--out", str(spec_path)) == EXIT_OK
    spec = load_spec(str(spec_path))
    inst = load_instance(cycle5)
    coef = np.ones(inst.m)
    w, v = worst_case_weights(spec, coef)
    assert np.allclose(w, 0.8 * inst.nominal_weights(), atol=1e-9)
    assert v == pytest.approx(0.8 * float(np.sum(inst.nominal_weights())))
    # polyhedron rows encode the stated corners: w >= 0.8 w0 and -w >= -1.2 w0
    m = inst.m
    assert np.allclose(spec.A[:m], np.eye(m)) and np.allclose(spec.A[m:], -np.eye(m))
    assert np.allclose(spec.b[:m], 0.8 * inst.nominal_weights(), atol=1e-9)
    assert np.allclose(spec.b[m:], -1.2 * inst.nominal_weights(), atol=1e-9)


def test_gen_spec_requires_instance(capsys):
    assert run("gen", "--spec", "box") == EXIT_PARSE
    assert "requires --instance" in capsys.readouterr().err


def test_gen_all_spec_kinds_load(tmp_path, cycle5):
    for kind, extra in (("singleton", []),
                        ("ellipsoid", ["--spread", "0.4"]),
                        ("wasserstein", ["--scenarios", "3", "--radius", "0.3"])):
        path = tmp_path / f"{kind}.json"
        assert run("gen", "--spec", kind, "--instance", cycle5,
                   "--out", str(path), "--seed", "4", *extra) == EXIT_OK
        assert load_spec(str(path)).kind  # parses and validates


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def test_solve_deterministic_report(tmp_path, cycle5):
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    for out in (r1, r2):
        assert run("solve", "--instance", cycle5, "--seed", "1",
                   "--out", str(out)) == EXIT_OK
    assert r1.read_bytes() == r2.read_bytes()
    rep = json.loads(r1.read_text())
    assert rep["command"] == "solve"
    assert rep["solver"]["converged"] is True
    assert rep["solver"]["value"] == pytest.approx(4.522542485937369, abs=1e-3)
    assert len(rep["rounding"]["cut"]) == 5
    assert set(rep["rounding"]["cut"]) <= {-1, 1}
    assert rep["instance_digest"] and rep["spec_digest"] is None


def test_solve_report_to_stdout(capsys, cycle5):
    assert run("solve", "--instance", cycle5, "--seed", "2") == EXIT_OK
    out, err = capsys.readouterr()
    rep = json.loads(out)
    assert rep["command"] == "solve"
    assert "[time]" in err and "[time]" not in out


def test_solve_missing_instance(capsys, tmp_path):
    assert run("solve", "--instance", str(tmp_path / "nope.json")) == EXIT_PARSE
    assert "error:" in capsys.readouterr().err


def test_unknown_flag(capsys, cycle5):
    assert run("solve", "--instance", cycle5, "--bogus") == EXIT_PARSE
    assert run("nonsense") == EXIT_PARSE


def test_solve_non_convergence(tmp_path, cycle5):
    spec_path = tmp_path / "ell.json"
    assert run("gen", "--spec", "ellipsoid", "--instance", cycle5,
               "--out", str(spec_path), "--seed", "1") == EXIT_OK
    out = tmp_path / "partial.json"
    code = run("solve", "--instance", cycle5, "--spec", str(spec_path),
               "--max-iter", "1", "--restarts", "1", "--out", str(out))
    assert code == EXIT_NO_CONVERGE
    rep = json.loads(out.read_text())
    assert rep["solver"]["converged"] is False
    assert "rounding" not in rep  # partial report stops at the solver stage


def test_solve_csv(tmp_path, cycle5):
    csv_path = tmp_path / "terms.csv"
    assert run("solve", "--instance", cycle5, "--csv", str(csv_path),
               "--out", str(tmp_path / "r.json")) == EXIT_OK
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "term,spec,worst_weight,relaxed_coef,rounded_coef"
    assert len(lines) == 6  # header + one row per edge
    first = lines[1].split(",")
    assert first[0] == "0" and "-" in first[1]
    float(first[2]); float(first[3]); float(first[4])


def test_solve_edge_list_input(tmp_path):
    path = tmp_path / "k3.txt"
    path.write_text("# triangle\n1 2 1.0\n1 3 1.0\n2 3 1.0\n")
    out = tmp_path / "r.json"
    assert run("solve", "--instance", str(path), "--out", str(out)) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["n"] == 3 and rep["m"] == 3


def test_solve_with_wasserstein_spec(tmp_path, triangle_file):
    spec_path = tmp_path / "w.json"
    assert run("gen", "--spec", "wasserstein", "--instance", triangle_file,
               "--scenarios", "2", "--radius", "0.2", "--seed", "5",
               "--out", str(spec_path)) == EXIT_OK
    out = tmp_path / "r.json"
    assert run("solve", "--instance", triangle_file, "--spec", str(spec_path),
               "--out", str(out)) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["spec_digest"]
    assert rep["solver"]["converged"] is True


def test_solve_allequal_end_to_end(tmp_path):
    inst_path = tmp_path / "ae.json"
    assert run("gen", "--kind", "allequal", "--n", "5", "--k", "3", "--m", "6",
               "--seed", "2", "--out", str(inst_path)) == EXIT_OK
    out = tmp_path / "r.json"
    assert run("solve", "--instance", str(inst_path), "--out", str(out)) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["kind"] == "allequal"
    assert set(rep["rounding"]["seed_vector"]) <= {-1, 1}
    assert set(rep["rounding"]["cut"]) <= {-1, 1}


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_ok(tmp_path, triangle_file):
    out = tmp_path / "v.json"
    assert run("verify", "--instance", triangle_file, "--seed", "3",
               "--out", str(out)) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["certification"]["ok"] is True
    names = [c["name"] for c in rep["certification"]["checks"]]
    assert "relaxation_bound" in names and "saddle_consistency" in names
    assert all(c["passed"] for c in rep["certification"]["checks"])
    assert "appendix" in rep  # plain max-cut gets the ratio diagnostics


def test_verify_corrupted_value_fails(tmp_path, triangle_file):
    out = tmp_path / "v.json"
    code = run("verify", "--instance", triangle_file, "--seed", "3",
               "--corrupt-value", "0.5", "--out", str(out))
    assert code == EXIT_CERT_FAIL
    rep = json.loads(out.read_text())
    assert rep["certification"]["ok"] is False


def test_verify_with_box_spec(tmp_path, triangle_file):
    spec_path = tmp_path / "box.json"
    assert run("gen", "--spec", "box", "--width", "0.1",
               "--instance", triangle_file, "--out", str(spec_path)) == EXIT_OK
    assert run("verify", "--instance", triangle_file, "--spec", str(spec_path),
               "--seed", "1", "--out", str(tmp_path / "v.json")) == EXIT_OK


# ---------------------------------------------------------------------------
# round / bench
# ---------------------------------------------------------------------------

def test_round_command(tmp_path, cycle5):
    out = tmp_path / "r.json"
    assert run("round", "--instance", cycle5, "--trials", "5", "--seed", "2",
               "--out", str(out)) == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["command"] == "round"
    assert len(rep["per_trial"]) == 5
    assert rep["best"] == max(rep["per_trial"])
    assert rep["mean"] == pytest.approx(float(np.mean(rep["per_trial"])))


def test_bench_command(capsys, tmp_path):
    out = tmp_path / "b.json"
    assert run("bench", "--sizes", "5,6", "--seed", "1",
               "--out", str(out)) == EXIT_OK
    rep = json.loads(out.read_text())
    assert [row["n"] for row in rep["rows"]] == [5, 6]
    assert all(row["converged"] for row in rep["rows"])
    err = capsys.readouterr().err
    assert "[time]" in err  # wall-clock only ever goes to stderr
    assert "[time]" not in out.read_text()
