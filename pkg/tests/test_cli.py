import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from dynzsig import cli
from dynzsig.dynseq import GrowthCheck

SCHEMA = json.loads((Path(__file__).resolve().parents[1] / "docs" / "report.schema.json").read_text())

COMMANDS = {
    "zsig": ["zsig", "--map", "(z^2+z)", "--alpha", "1", "--gamma", "0", "-N", "10"],
    "rank": ["rank", "--map", "(z^2+z)", "--alpha", "1", "-p", "43", "-N", "6"],
    "height": ["height", "--map", "(z^2+z)", "--point", "1", "--tol", "1e-6"],
    "growth": ["growth", "--map", "(z^2+z)", "--alpha", "1/2", "-N", "8"],
    "modp": ["modp", "--map", "(z^2+1)", "--alpha", "0", "-p", "5"],
    "conj weak": ["conj", "weak", "--map", "(z^2+1)", "--alpha", "0", "-N", "6"],
    "conj strong": ["conj", "strong", "--map", "(z^2+1)", "--alpha", "0", "-M", "4", "-N", "4"],
    "density": ["density", "--map", "(z^2+1)", "--alpha", "0", "--pmax", "200"],
    "verify growth": ["verify", "growth", "--map", "(z^2+z)", "--alpha", "1", "--gamma", "0", "-N", "8",
                      "--pmax", "10000"],
    "verify disjoint": ["verify", "disjoint", "--map", "z^2-1", "--alpha", "1/3", "-N", "8"],
    "verify tailcycle": ["verify", "tailcycle", "--map", "z^2+1", "--alpha", "0", "-M", "4", "-N", "4"],
}


def invoke(argv):
    """Run the CLI in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    old = sys.stderr
    sys.stderr = err
    try:
        try:
            cfg, args = cli.parse_args(argv)
        except SystemExit as exc:
            return exc.code, out.getvalue(), err.getvalue()
        code = cli.run(cfg, args, out)
    finally:
        sys.stderr = old
    return code, out.getvalue(), err.getvalue()


def test_parse_args_examples():
    cfg, args = cli.parse_args(COMMANDS["zsig"])
    assert cfg.command == "zsig" and args.N == 10 and cfg.seed == 0
    cfg, args = cli.parse_args(COMMANDS["height"])
    assert cfg.command == "height" and args.tol == 1e-6


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_every_command_validates_against_schema(name):
    code, out, _ = invoke(COMMANDS[name])
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["command"] == name
    assert doc["seed"] == 0 and doc["version"]


def test_zsig_on_the_empty_example():
    code, out, _ = invoke(COMMANDS["zsig"])
    assert code == 0
    assert json.loads(out)["result"]["zsigmondy_set"] == []


def test_verify_growth_example_passes():
    code, out, _ = invoke(COMMANDS["verify growth"])
    assert code == 0 and json.loads(out)["result"]["passed"] is True


def test_strong_grid_report():
    doc = json.loads(invoke(COMMANDS["conj strong"])[1])
    assert len(doc["result"]["cells"]) == 5 * 4


def test_zero_denominator_exits_2():
    code, out, err = invoke(["zsig", "--map", "(z^2+z)/(0)", "--alpha", "1"])
    assert code == 2 and out == ""
    assert "--map" in err and "ZeroDenominator" in err


@pytest.mark.parametrize(
    "argv,flag",
    [
        (["zsig", "--map", "z^2/(1+z)", "--alpha", "2/3"], "--gamma"),
        (["zsig", "--map", "z^2-1", "--alpha", "0"], "--alpha"),
        (["zsig", "--map", "z^2+z", "--alpha", "1", "-N", "0"], "-N"),
        (["zsig", "--map", "z^2+z", "--alpha", "one"], "--alpha"),
        (["rank", "--map", "z^2+z", "--alpha", "1", "-p", "9"], "-p"),
        (["modp", "--map", "z^2/(2*z+3)", "--alpha", "1", "-p", "3"], "-p"),
        (["height", "--map", "z^2", "--point", "2", "--tol", "-1"], "--tol"),
        (["height", "--map", "z^2+", "--point", "2"], "--map"),
        (["verify", "disjoint", "--map", "z^2+z", "--alpha", "1"], "--gamma"),
        (["height", "--map", "z^2", "--point", "2", "--format", "csv"], "--format"),
    ],
)
def test_input_errors_exit_2_and_name_the_flag(argv, flag):
    code, out, err = invoke(argv)
    assert code == 2 and out == ""
    assert f"argument {flag}" in err


def test_failed_verification_exits_1(monkeypatch):
    real = cli.verify_growth_law

    def tampered(*a, **k):
        rep = real(*a, **k)
        c = rep.checks[0]
        rep.checks[0] = GrowthCheck(c.p, c.residue, c.n, c.kind, c.observed, c.observed + 1)
        return rep

    monkeypatch.setattr(cli, "verify_growth_law", tampered)
    code, out, _ = invoke(COMMANDS["verify growth"])
    assert code == 1
    assert json.loads(out)["result"]["kind"] == "growth_law"


@pytest.mark.parametrize("name", sorted(COMMANDS))
def test_output_is_byte_identical(name):
    assert invoke(COMMANDS[name])[1] == invoke(COMMANDS[name])[1]


def test_seed_is_echoed():
    doc = json.loads(invoke(COMMANDS["zsig"] + ["--seed", "5"])[1])
    assert doc["seed"] == 5 and doc["config"]["N"] == 10


def test_full_integers_flag():
    plain = json.loads(invoke(COMMANDS["zsig"])[1])["result"]["terms"][4]
    full = json.loads(invoke(COMMANDS["zsig"] + ["--full-integers"])[1])["result"]["terms"][4]
    assert "A" not in plain and full["A"] == "1806" and plain["digits_A"] == 4


@pytest.mark.parametrize(
    "name,header",
    [
        ("zsig", "n,digits_A,has_primitive,witness_primes"),
        ("rank", "n,ord_p"),
        ("growth", "n,digits_A,log_A_over_dn,hhat,err"),
        ("modp", "i,residue"),
        ("conj strong", "m,n,digits_A,has_primitive"),
        ("density", "p,rho,sigma,divides_some_term"),
        ("verify tailcycle", "p,rho,sigma,cells_checked,mismatches,infinity_cells"),
    ],
)
def test_csv_headers(name, header):
    code, out, _ = invoke(COMMANDS[name] + ["--format", "csv"])
    assert code == 0
    assert out.splitlines()[0] == header


def test_factor_budget_from_environment(monkeypatch):
    monkeypatch.setenv("DYNZSIG_FACTOR_BUDGET", "50,0")
    doc = json.loads(invoke(COMMANDS["zsig"])[1])
    assert doc["result"]["zsigmondy_set"] == []


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dynzsig.cli"] + COMMANDS["modp"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["trajectory"] == [0, 1, 2]
