import subprocess
import sys

import pytest

from rkocp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_schemes_list(capsys):
    code, out = run(capsys, "schemes-list")
    assert code == 0
    assert len(out.strip().splitlines()) == 15


def test_schemes_show(capsys):
    code, out = run(capsys, "schemes-show", "gauss-4")
    assert code == 0
    assert "(3-2*sqrt{3})/12" in out and "-0.038675134594812" in out


def test_schemes_adjoint(capsys):
    code, out = run(capsys, "schemes-adjoint", "lobatto-iiia-4")
    assert code == 0
    assert out.splitlines()[0] == "# adjoint(lobatto-iiia-4) = lobatto-iiib-4"


def test_conditions_check_sdirk(capsys):
    code, out = run(capsys, "conditions-check", "sdirk-4")
    assert code == 0
    assert "control_order=2" in out
    assert "A3 = 18367/58800" in out


def test_conditions_check_float(capsys):
    code, out = run(capsys, "conditions-check", "gauss-6", "--float", "--tol", "1e-12")
    assert code == 0 and "control_order=6" in out


def test_assumptions(capsys):
    assert run(capsys, "assumptions", "gauss-6") == (0, "gauss-6: (6, 3, 3)\n")


def test_theorems_verify(capsys):
    code, out = run(capsys, "theorems-verify")
    assert code == 0
    assert any(line.split()[:5] == ["sdirk-4", "4", "D1", "False", "False"] for line in out.splitlines())


def test_solve_with_csv(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    code, out = run(capsys, "solve", "--scheme", "gauss-4", "--steps", "8", "--csv", str(path))
    assert code == 0 and "terminal" in out
    lines = path.read_text().splitlines()
    assert lines[0] == "t,component,y,p" and len(lines) == 1 + 9 * 2


def test_solve_fem(capsys):
    code, out = run(capsys, "solve", "--scheme", "radau-iia-3", "--backend", "fem", "--fem-degree", "2",
                    "--fem-cells", "6", "--steps", "6")
    assert code == 0 and "fem[P2,6]" in out


def test_converge(capsys, tmp_path):
    out_path = tmp_path / "c.csv"
    code, out = run(capsys, "converge", "--scheme", "stormer-verlet", "--n-list", "10,20,40", "--out", str(out_path))
    assert code == 0 and "median rate" in out
    assert out_path.exists() and (tmp_path / "c.rates").exists()


def test_deterministic_output(capsys):
    first = run(capsys, "schemes-show", "lobatto-iiic-6")
    second = run(capsys, "schemes-show", "lobatto-iiic-6")
    assert first == second


def test_unknown_scheme_exit_code(capsys):
    assert main(["schemes-show", "rk4"]) == 2


@pytest.mark.parametrize("argv", [["frobnicate"], ["schemes-list", "--bogus"], []])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rkocp", "assumptions", "gauss-4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "gauss-4: (4, 2, 2)"
