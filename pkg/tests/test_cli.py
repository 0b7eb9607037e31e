import json

import pytest

from fracorlicz.cli import main
from fracorlicz.config import MissingSection, ParseError, ValidationError, parse_config

MINIMAL = """
[young]
family = power
p = 2

[domain]
omega = 0, 1
h = 0.0625
collar_R = 0.25

[fractional]
s = 0.3

[problem]
bc = dirichlet
mu = 1
"""


def run(tmp_path, sub, text=MINIMAL, *extra):
    cfg = tmp_path / "run.ini"
    cfg.write_text(text)
    return main([sub, "--config", str(cfg), "--out", str(tmp_path / "out"), *extra])


def table(path):
    lines = path.read_text().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    body = [l.split(",") for l in lines if not l.startswith("#")]
    return comments, body[0], body[1:]


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.fractional["s"] == 0.3 and cfg.bc_list == ["dirichlet"]
    assert cfg.solver["tol"] == 1e-6          # default resolved
    assert "solver" not in cfg.present


def test_validation_and_parse_errors():
    with pytest.raises(ValidationError, match=r"s must lie in \(0,1\)"):
        parse_config("[fractional]\ns = 1.5\n")
    with pytest.raises(ParseError) as exc:
        parse_config("[young]\nfamily = power\ngamma = 3\n")
    assert exc.value.line == 3 and exc.value.field == "gamma"
    with pytest.raises(ParseError):
        parse_config("[nowhere]\nx = 1\n")
    with pytest.raises(ParseError):
        parse_config("p = 2\n")
    with pytest.raises(ParseError):
        parse_config("[domain]\nh = abc\n")


def test_missing_section():
    with pytest.raises(MissingSection):
        parse_config(MINIMAL).require("nonlinearities")


def test_exit_codes(tmp_path):
    assert run(tmp_path, "multiplicity") == 2
    assert run(tmp_path, "eigen", "[fractional]\ns = 1.5\n") == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense", "--config", "x"])
    assert exc.value.code == 2


def test_verify_calculus(tmp_path):
    assert run(tmp_path, "verify-calculus") == 0
    comments, header, rows = table(tmp_path / "out" / "verify_calculus.csv")
    assert comments[0].startswith("# config_sha256=")
    assert header == ["check", "checked", "violations", "worst"]
    assert all(r[2] == "0" for r in rows)


def test_eigen_all_four_and_reproducible(tmp_path):
    text = MINIMAL.replace("bc = dirichlet", "bc = all")
    assert run(tmp_path, "eigen", text, "--seed", "3") == 0
    _, header, rows = table(tmp_path / "out" / "eigen.csv")
    assert len(rows) == 4 and header[:3] == ["bc", "mu", "Lambda"]
    first = (tmp_path / "out" / "eigen.csv").read_bytes()
    assert run(tmp_path, "eigen", text, "--seed", "3") == 0
    assert (tmp_path / "out" / "eigen.csv").read_bytes() == first
    assert (tmp_path / "out" / "ordering.csv").exists()


def test_failure_manifest(tmp_path):
    # one iteration cannot converge, so the run reports a failed check
    text = MINIMAL + "\n[solver]\nmax_iter = 1\nn_starts = 1\ntol = 1e-12\n"
    assert run(tmp_path, "eigen", text) == 1
    manifest = json.loads((tmp_path / "out" / "failures.json").read_text())
    assert manifest["subcommand"] == "eigen" and manifest["failures"]


@pytest.mark.parametrize("sub", ["check-young", "verify-operator", "perimeter", "sweep-mu"])
def test_other_subcommands(tmp_path, sub):
    assert run(tmp_path, sub) == 0


def test_multiplicity_json_lines(tmp_path):
    text = MINIMAL + """
[nonlinearities]
f = piecewise_power
lam_count = 1
lam_span = 3, 3

[solver]
crit_starts = 4

[output]
format = json-lines
"""
    assert run(tmp_path, "multiplicity", text) == 0
    lines = (tmp_path / "out" / "multiplicity.jsonl").read_text().splitlines()
    head = json.loads(lines[0])
    assert "config_sha256" in head
    summary = [json.loads(l) for l in lines[1:] if json.loads(l)["kind"] == "summary"]
    assert len(summary) == 1 and summary[0]["count"] >= 1


def test_override_changes_hash():
    from fracorlicz.config import with_overrides
    a = parse_config(MINIMAL)
    h0 = a.sha256()
    assert with_overrides(a, h=0.03125).sha256() != h0
