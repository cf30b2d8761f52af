import json
import subprocess
import sys
from fractions import Fraction

import pytest

from crsphere.cli import main
from crsphere.scalars import PiSquaredValue, Scalar

R_FORMULA = Scalar.parse("2*(1+t^2)/(1-t^2)")
QP_FORMULA = Scalar.parse("4*(1-14*t^2+t^4)/(1-t^2)^2")


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_invariants_symbolic(capsys):
    code, out = run_json(capsys, "invariants", "--family", "rossi", "--t", "symbolic")
    assert code == 0 and out["seed"] == 0
    assert Scalar.parse(out["invariants"]["R"]) == R_FORMULA
    assert Scalar.parse(out["invariants"]["Q'"]) == QP_FORMULA
    assert out["flags"] == {"torsion_free": False, "R_constant": True, "q_flat": True}


def test_invariants_rational(capsys):
    _, out = run_json(capsys, "invariants", "--family", "rossi", "--t", "1/2")
    assert Scalar.parse(out["invariants"]["R"]) == Scalar.const(Fraction(10, 3))
    assert Scalar.parse(out["invariants"]["Q'"]) == Scalar.const(QP_FORMULA.eval(Fraction(1, 2)))


def test_invariants_round(capsys):
    _, out = run_json(capsys, "invariants", "--family", "round")
    inv = out["invariants"]
    assert (inv["R"], inv["Q'"], inv["A11"]) == ("2", "4", "0")


def test_json_roundtrip(capsys):
    _, out = run_json(capsys, "invariants", "--family", "rossi", "--t", "symbolic")
    for v in out["invariants"].values():
        assert str(Scalar.parse(v)) == v
    _, out = run_json(capsys, "total", "--family", "rossi", "--t", "symbolic")
    v = out["invariants"]["total_q_prime"]
    assert str(PiSquaredValue.parse(v)) == v


def test_total_round(capsys):
    _, out = run_json(capsys, "total", "--family", "round")
    assert out["invariants"]["total_q_prime"] == "16 * pi^2"
    assert out["flags"]["cover_degree_bound"] == 1 and out["flags"]["gap_over_8pi2"]


def test_total_rossi_tenth(capsys):
    _, out = run_json(capsys, "total", "--family", "rossi", "--t", "1/10")
    tot = PiSquaredValue.parse(out["invariants"]["total_q_prime"])
    assert tot.coeff == Scalar.const((4 * QP_FORMULA).eval(Fraction(1, 10)))
    assert tot.coeff < Scalar.const(16)


def test_verify_exit_codes(capsys):
    code, out = run_json(capsys, "verify", "--law", "yamabe", "--family", "rossi", "--t", "symbolic")
    assert code == 0 and out["reports"][0]["mode"] == "exact" and out["reports"][0]["passed"]
    code, out = run_json(capsys, "verify", "--law", "qprime", "--family", "rossi", "--t", "1/4", "--tol", "0")
    assert code == 1 and not out["flags"]["all_passed"]


def test_verify_stable_with_seed(capsys):
    argv = ("verify", "--law", "q", "qprime", "--family", "rossi", "--t", "1/4", "--seed", "7")
    a, b = run(capsys, *argv), run(capsys, *argv)
    assert a == b


def test_usage_errors(capsys):
    assert main(["invariants", "--family", "rossi", "--t", "0.5"]) == 2
    assert main(["invariants", "--family", "rossi", "--t", "3/2"]) == 2
    assert main(["verify", "--law", "q", "--family", "rossi", "--t", "symbolic"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["invariants", "--family", "torus"])
    assert exc.value.code == 2


def test_sweep_even(capsys):
    code, out = run_json(capsys, "sweep", "--family", "rossi", "--t-min", "-9/10", "--t-max", "9/10",
                         "--steps", "19")
    rows = out["rows"]
    assert code == 0 and len(rows) == 19
    qp = {Fraction(r["t"]): r["Q'"] for r in rows}
    assert all(qp[t] == qp[-t] for t in qp)


def test_sweep_csv(capsys):
    _, out = run(capsys, "sweep", "--family", "rossi", "--t-min", "0", "--t-max", "1/2", "--steps", "3",
                 "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0].startswith("t,R,Q'") and len(lines) == 4


def test_spectrum_round(capsys):
    code, out = run_json(capsys, "spectrum", "--operator", "paneitz", "--family", "round", "--degree", "1")
    rep = out["reports"][0]
    assert code == 0 and all(abs(x) < 1e-12 for x in rep["eigenvalues"])


def test_spectrum_assertion_exit(capsys):
    code, out = run_json(capsys, "spectrum", "--family", "rossi", "--t", "1/2", "--degree", "2",
                         "--assert-nonnegative")
    assert code == 1 and out["reports"][0]["certificate"] == "-16/3 * pi^2"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "crsphere", "total", "--format", "text"],
                         capture_output=True, text=True, check=True)
    assert "total_q_prime: 16 * pi^2" in res.stdout
