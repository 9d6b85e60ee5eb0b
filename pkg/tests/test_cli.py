import json
import subprocess
import sys
from pathlib import Path

import pytest

from modrecon.cli import main
from modrecon.poly import Ring, MonomialOrdering

GOLDEN = Path(__file__).parent / "golden"
DATA = Path(__file__).parents[1] / "src" / "modrecon" / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def golden(name):
    return (GOLDEN / name).read_text()


def test_crt_golden(capsys):
    assert run(capsys, "crt", GOLDEN / "bad_primes.res") == (0, golden("crt_bad_primes.out"), "")


def test_crt_single_line_and_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO("3 7\n"))
    assert run(capsys, "crt", "-")[:2] == (0, "3 7\n")


def test_crt_not_coprime(capsys):
    code, out, err = run(capsys, "crt", GOLDEN / "not_coprime.res")
    assert code == 2 and out == ""
    assert "not coprime" in err


def test_crt_json(capsys):
    code, out, _ = run(capsys, "crt", "--json", GOLDEN / "bad_primes.res")
    assert json.loads(out) == {"format": 1, "value": "22684", "modulus": "38885"}


def test_lift_golden_with_trace(capsys):
    code, out, err = run(capsys, "lift", "--errtol", "-v", 38885, 464)
    assert code == 0
    assert out == golden("lift_464.out") == "13/12 cofactor 7 bad-factors [7]\n"
    assert err == golden("lift_464.err")


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["--farey", 38885, 16524], "NONE\n"),
        (["--errtol", 26, 5], "NONE\n"),
        (["--lifter", "farey", 38885, 22684], "13/12\n"),
        ([38885, 22684], "13/12 cofactor 1 bad-factors []\n"),
    ],
)
def test_lift_examples(capsys, argv, expected):
    assert run(capsys, "lift", *argv)[:2] == (0, expected)


def test_lift_bad_arguments(capsys):
    assert run(capsys, "lift", 5, 9)[0] == 2
    assert run(capsys, "lift", 1, 0)[0] == 2


def test_lift_json(capsys):
    _, out, _ = run(capsys, "lift", "--json", 38885, 464)
    assert json.loads(out) == {"format": 1, "value": "13/12", "cofactor": 7, "bad_factors": [7], "unfactored": 1}


def test_reconstruct(capsys):
    f = GOLDEN / "corrupted_seven.res"
    assert run(capsys, "reconstruct", f, "--expect", "13/12")[:2] == (0, "13/12\n")
    assert run(capsys, "reconstruct", f, "--height", 13, "--bad-budget", 7)[:2] == (0, "13/12\n")
    code, out, err = run(capsys, "reconstruct", "--farey", f, "--expect", "13/12")
    assert (code, out) == (1, "NONE\n") and "no accepted lift" in err


def test_gb_golden(capsys):
    assert run(capsys, "gb", GOLDEN / "small.ideal")[:2] == (0, golden("gb_small.out"))
    code, out, _ = run(capsys, "gb", "--json", GOLDEN / "small.ideal")
    assert json.loads(out) == json.loads(golden("gb_small.json"))


def test_gb_arnold_cleared(capsys):
    code, out, _ = run(capsys, "gb", "--clear", DATA / "arnold_jacobian.ideal")
    assert code == 0 and out == golden("gb_arnold.out")
    basis = out.split("# report")[0].split()
    assert basis[0].startswith("40754032969602177507873137664624218564815033875*x^4")
    assert out.splitlines()[2].startswith("264627*y^39")


def test_gb_output_parses_back(capsys):
    ring = Ring(("x", "y"), MonomialOrdering("lex"))
    _, out, _ = run(capsys, "gb", GOLDEN / "small.ideal")
    polys = out.split("# report")[0].split("\n")
    assert [str(ring.parse(p)) for p in polys if p] == ["x - y", "y^2 - 1"]


def test_gb_empty_ideal(capsys):
    assert run(capsys, "gb", GOLDEN / "empty.ideal")[:2] == (0, "")


def test_gb_exhaustion_exit_code(capsys):
    code, out, err = run(capsys, "gb", "--max-rounds", 0, GOLDEN / "small.ideal")
    assert code == 1 and "no verified basis" in err


def test_missing_file(capsys):
    assert run(capsys, "crt", GOLDEN / "nope.res")[0] == 2


@pytest.mark.parametrize("name", ["farey-26", "bad-primes-38885", "arnold-unlucky", "type5-sextic"])
def test_demos_pass(capsys, name):
    code, out, _ = run(capsys, "demo", name)
    assert code == 0
    assert out.rstrip().endswith(f"{name}: PASS")
    # deterministic and idempotent
    assert run(capsys, "demo", name)[1] == out


def test_unknown_demo(capsys):
    assert run(capsys, "demo", "nope")[0] == 2


def test_help_documents_defaults(capsys):
    with pytest.raises(SystemExit):
        main(["gb", "--help"])
    out = capsys.readouterr().out
    assert "default: 0" in out and "default: 4" in out and "default: 16" in out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "modrecon.cli", "lift", "--farey", "26", "9"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1/3\n"
