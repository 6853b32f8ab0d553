import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from ccspin import __version__, cli
from ccspin.dynamics import StepFailure


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def body(out):
    return json.loads(out)["body"]


def test_cc_find_json(capsys):
    code, out, _ = run(["cc", "find", "--masses", "1,1,1", "--start", "lagrange-perturbed", "--seed", "4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["header"]["version"] == __version__
    assert doc["header"]["run_config"]["masses"] == "1,1,1"
    assert doc["body"]["report"]["lambda_unit"] == pytest.approx(3.0, abs=1e-9)


def test_seed_names_start_shape(capsys):
    code, out, _ = run(["cc", "find", "--masses", "1,1,1", "--seed", "lagrange-perturbed"], capsys)
    assert code == 0 and body(out)["cc"]["residual"] <= 1e-10


def test_deterministic_body(capsys):
    argv = ["--seed", "7", "cc", "classify", "--masses", "1,2,3", "--start", "random"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert body(a) == body(b)


def test_csv_17_digits_and_header(capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, _, _ = run(["--format", "csv", "--out", str(out), "catalog", "rhombic", "--zeta", "1.8,3.6",
                      "--n", "5"], capsys)
    assert code == 0
    text = out.read_text()
    lines = text.splitlines()
    assert lines[0] == f"# version: {__version__}"
    assert lines[1].startswith("# run_config: ") and json.loads(lines[1][len("# run_config: "):])["n"] == 5
    rows = list(csv.reader(io.StringIO("\n".join(l for l in lines if not l.startswith("#")))))
    assert rows[0][0] == "zeta" and len(rows) == 6
    assert float(rows[1][0]) == 1.8
    # 17 significant digits: the cell parses back to the same double
    lam = rows[2][2]
    assert lam == format(float(lam), ".17g")


def test_fmt_float_round_trips():
    for x in (np.pi, 1e-300, -2.5e17, 1 / 3):
        assert float(cli.fmt_float(x)) == x
    assert cli.dumps({"a": float("nan")}) .replace(" ", "").replace("\n", "") == '{"a":null}'


def test_usage_errors(capsys):
    assert run(["cc", "find", "--masses", "1,x,1"], capsys)[0] == 64
    assert run(["cc", "find", "--masses", "1,-1,1"], capsys)[0] == 64
    assert run(["cc", "find", "--start", "pentagram"], capsys)[0] == 64
    assert run(["nonsense"], capsys)[0] == 64
    assert run(["--threads", "0", "cc", "find", "--masses", "1,1,1"], capsys)[0] == 64
    assert run(["--tol", "-1", "cc", "find", "--masses", "1,1,1"], capsys)[0] == 64
    assert run(["collide", "asymptotics", "--masses", "1,1,1", "--t0", "1e-3", "--t1", "1"], capsys)[0] == 64
    assert run(["catalog", "rhombic", "--zeta", "3,2"], capsys)[0] == 64


def test_non_convergence_exit_code(capsys):
    code, out, _ = run(["cc", "find", "--masses", "1,2,3", "--start", "random", "--seed", "1",
                        "--max-iter", "0"], capsys)
    assert code == 2
    assert "error" in body(out)


def test_integration_failure_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise StepFailure("step size underflow")

    monkeypatch.setattr(cli, "make_collision_orbit", boom)
    code, out, _ = run(["collide", "simulate", "--masses", "1,2,3", "--start", "lagrange"], capsys)
    assert code == 3 and body(out)["partial"]["status"] == "failed"


def test_spin_check_degenerate(capsys):
    code, out, _ = run(["spin", "check", "--preset", "equilateral-degenerate"], capsys)
    b = body(out)
    assert code == 0 and b["verdict"]["case"] == "DegTwo" and b["no_spin"] is True


def test_flags_after_subcommand(capsys):
    code, out, _ = run(["cc", "classify", "--masses", "1,1,1", "--start", "lagrange", "--format", "csv"], capsys)
    assert code == 0 and out.startswith("# version")


def test_collide_and_planar(capsys, tmp_path):
    traj = tmp_path / "t.csv"
    code, out, _ = run(["collide", "simulate", "--masses", "1,2,3", "--start", "lagrange", "--mix", "1,1",
                        "--zmax", "0.05", "--theta-limit", "--trajectory-out", str(traj)], capsys)
    b = body(out)
    assert code == 0 and b["theta_limit"]["tail_model"] == "exponential"
    assert traj.read_text().startswith("# version")
    code, out, _ = run(["planar", "analyze", "--preset", "equilateral-degenerate", "--simulate"], capsys)
    b = body(out)
    assert code == 0 and len(b["simulations"]) == 3
    assert max(abs(s["Psi_at_fit"]) for s in b["simulations"]) < 1e-6


def test_resonance_and_catalogs(capsys):
    code, out, _ = run(["resonance", "scan", "--eigs", "1,2", "--max-order", "3"], capsys)
    assert code == 0 and body(out)["resonances"][0]["alpha"] == [2, 0]
    code, out, _ = run(["catalog", "equilateral", "--m4", "0.5,1.0"], capsys)
    assert code == 0 and body(out)["m4_star"] == pytest.approx(body(out)["m4_star_closed_form"], abs=1e-12)
    code, out, _ = run(["--threads", "2", "catalog", "kite", "--n", "20"], capsys)
    assert code == 0 and body(out)["simultaneous_cells"] == []
    code, out, _ = run(["collide", "asymptotics", "--masses", "1,1,1", "--start", "lagrange"], capsys)
    assert code == 0 and body(out)["fits"]["I"]["slope"] == pytest.approx(4 / 3, abs=5e-3)


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "ccspin", "cc", "find", "--masses", "1,1"],
                       capture_output=True, text=True, timeout=60)
    assert p.returncode in (0, 2, 64)
    p = subprocess.run([sys.executable, "-m", "ccspin", "--bogus"], capture_output=True, text=True, timeout=60)
    assert p.returncode == 64
