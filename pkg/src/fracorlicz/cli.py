"""Command-line entry point: ``fracorlicz SUBCOMMAND --config run.ini``.

Exit status 0 when every check of the run passed, 1 on a failed check (a
``failures.json`` manifest is written next to the outputs), 2 on usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .config import MissingSection, ParseError, RunConfig, ValidationError, parse_config, with_overrides
from .eigen import BoundaryCondition, SolverOptions, mu_sweep, solve_min, verify_order
from .grid import build_grid
from .modulars import sandwich_check
from .multiplicity import check_class_A, check_hypotheses, estimate_ricceri, multiplicity_sweep
from .nonlinearities import make_nonlinearity
from .operator import divergence_defect, ibp_defect, interior_cancellation, perimeter
from .young import check_structure, inequality_battery, make_young

SUBCOMMANDS = ("check-young", "verify-calculus", "verify-operator", "eigen", "sweep-mu",
               "multiplicity", "perimeter")


# ---------------------------------------------------------------------------
# builders


def build_young(cfg: RunConfig):
    y = cfg.young
    fam = y["family"]
    if fam in ("power", "power_log"):
        return make_young(fam, p=y["p"])
    if fam == "sum_of_powers":
        return make_young(fam, exponents=y["exponents"])
    return make_young(fam, a=y["a"], b=y["b"])


def build_domain(cfg: RunConfig, h=None):
    return build_grid(cfg.omega, cfg.domain["h"] if h is None else h,
                      cfg.domain["collar_R"], cfg.fractional["s"])


def build_nonlinearity(cfg: RunConfig, which: str):
    nl = cfg.nonlinearities
    nl_id = nl[which]
    if nl_id == "sine_young":
        return make_nonlinearity(nl_id, M=nl[f"{which}_p"])
    if nl_id == "piecewise_power":
        return make_nonlinearity(nl_id, alpha=nl[f"{which}_alpha"], beta=nl[f"{which}_beta"],
                                 literal=nl["f_literal"] if which == "f" else False)
    return make_nonlinearity(nl_id, p=nl[f"{which}_p"], q=nl[f"{which}_q"])


def solver_options(cfg: RunConfig) -> SolverOptions:
    so = cfg.solver
    return SolverOptions(tol=so["tol"], max_iter=so["max_iter"], n_starts=so["n_starts"], seed=so["seed"])


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if v is None else str(v)


class Artifacts:
    """Serialized writer; every table starts with the config hash and echoed settings."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.dir = Path(cfg.output["dir"])
        self.fmt = cfg.output["format"]
        self.written = []

    def _header(self):
        lines = [f"config_sha256={self.cfg.sha256()}"]
        for section, values in self.cfg.resolved().items():
            for key, val in values.items():
                if isinstance(val, tuple):
                    val = ",".join(_fmt(x) for x in val)
                lines.append(f"{section}.{key}={_fmt(val)}")
        return lines

    def table(self, name: str, rows: list, columns: list = None):
        self.dir.mkdir(parents=True, exist_ok=True)
        if columns is None:
            columns = []
            for r in rows:
                columns += [k for k in r if k not in columns]
        if self.fmt == "csv":
            path = self.dir / f"{name}.csv"
            with open(path, "w", newline="") as fh:
                for line in self._header():
                    fh.write(f"# {line}\n")
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(columns)
                for r in rows:
                    writer.writerow([_fmt(r.get(c)) for c in columns])
        else:
            path = self.dir / f"{name}.jsonl"
            with open(path, "w") as fh:
                fh.write(json.dumps({"config_sha256": self.cfg.sha256(),
                                     "config": self.cfg.resolved(), "columns": columns},
                                    sort_keys=True, default=list) + "\n")
                for r in rows:
                    fh.write(json.dumps({c: _jsonable(r.get(c)) for c in columns}, sort_keys=True) + "\n")
        self.written.append(path)
        return path


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    return v


# ---------------------------------------------------------------------------
# subcommands (each returns a list of failure dicts)


def cmd_check_young(cfg, art):
    cfg.require("young")
    Y = build_young(cfg)
    rec = check_structure(Y, cfg.domain["dim"], cfg.fractional["s"]).as_record()
    art.table("check_young", [{"family": Y.family, **rec}])
    fails = []
    if not rec["g1_holds"]:
        fails.append({"check": "g1", "detail": "index bounds violated on the sample grid"})
    if not np.isfinite(rec["delta2_constant"]):
        fails.append({"check": "delta2", "detail": "doubling constant is not finite"})
    return fails


def cmd_verify_calculus(cfg, art):
    cfg.require("young")
    Y = build_young(cfg)
    rng = np.random.default_rng(cfg.solver["seed"])
    battery = inequality_battery(Y, rng, n_samples=10_000)
    rows = [{"check": k, **v} for k, v in battery.items()]
    if "domain" in cfg.present:
        sw = sandwich_check(Y, build_domain(cfg), rng, n_samples=cfg.solver["samples"])
        for k, v in sw.items():
            rows.append({"check": f"sandwich_{k}", "checked": v["checked"], "violations": v["violations"],
                         "worst": v["roundtrip_worst"]})
    art.table("verify_calculus", rows, ["check", "checked", "violations", "worst"])
    fails = [{"check": r["check"], "detail": f"{r['violations']} violations"}
             for r in rows if r["violations"]]
    fails += [{"check": r["check"], "detail": f"roundtrip error {r['worst']:.3g}"}
              for r in rows if r["check"].startswith("sandwich") and r["worst"] > 1e-8]
    return fails


def cmd_verify_operator(cfg, art):
    cfg.require("young", "domain", "fractional")
    Y, d = build_young(cfg), build_domain(cfg)
    rng = np.random.default_rng(cfg.solver["seed"])
    tol = min(cfg.solver["tol"], 1e-12)
    div, ibp, canc = [], [], []
    for _ in range(cfg.solver["samples"]):
        u = d.zeros() + rng.normal(size=d.n_nodes)
        v = d.zeros() + rng.normal(size=d.n_nodes)
        div.append(divergence_defect(Y, u))
        ibp.append(ibp_defect(Y, u, v))
        canc.append(abs(interior_cancellation(Y, u)))
    rows = [{"check": "divergence", "samples": len(div), "worst": max(div), "tol": tol},
            {"check": "integration_by_parts", "samples": len(ibp), "worst": max(ibp), "tol": tol},
            {"check": "interior_cancellation", "samples": len(canc), "worst": max(canc), "tol": 0.0}]
    for r in rows:
        r["pass"] = r["worst"] <= r["tol"]
    art.table("verify_operator", rows, ["check", "samples", "worst", "tol", "pass"])
    return [{"check": r["check"], "detail": f"worst {r['worst']:.3g} > {r['tol']:.3g}"}
            for r in rows if not r["pass"]]


def _node_columns(d):
    cols = {"x": d.nodes[:, 0]} if d.dim == 1 else {"x": d.nodes[:, 0], "y": d.nodes[:, 1]}
    cols["region"] = np.where(d.interior, "interior", "exterior")
    return cols


def cmd_eigen(cfg, art):
    cfg.require("young", "domain", "fractional", "problem")
    Y, d = build_young(cfg), build_domain(cfg)
    opts = solver_options(cfg)
    results, fails = {}, []
    for kind in cfg.bc_list:
        bc = BoundaryCondition(kind, cfg.beta if kind == "robin" else None)
        results[kind] = r = solve_min(Y, bc, cfg.problem["mu"], d, opts)
        if not r.converged:
            fails.append({"check": f"converged_{kind}", "detail": f"residual {r.stationarity_residual:.3g}"})
    rows = [{**r.row(), "converged": r.converged, "start": r.start} for r in results.values()]
    art.table("eigen", rows, ["bc", "mu", "Lambda", "lambda", "residual", "iters", "converged", "start"])
    report = verify_order(results, Y, rtol=1e-4, raise_on_failure=False)
    art.table("ordering", [{"relation": k, "margin": v} for k, v in report.margins.items()],
              ["relation", "margin"])
    fails += [{"check": "ordering", "detail": f} for f in report.failures]
    nodes = _node_columns(d)
    for kind, r in results.items():
        nodes[f"u_{kind}"] = r.u.values
    keys = list(nodes)
    art.table("eigen_nodes", [{k: nodes[k][i] for k in keys} for i in range(d.n_nodes)], keys)
    return fails


def cmd_sweep_mu(cfg, art):
    cfg.require("young", "domain", "fractional", "problem")
    Y, d = build_young(cfg), build_domain(cfg)
    opts = solver_options(cfg)
    rows, summaries, fails = [], [], []
    for kind in cfg.bc_list:
        bc = BoundaryCondition(kind, cfg.beta if kind == "robin" else None)
        rs, summ = mu_sweep(Y, bc, cfg.problem["mu_list"], d, opts)
        rows += rs
        summaries.append({"bc": kind, **summ})
        if summ["min_Lambda"] < 1 - 1e-12:
            fails.append({"check": f"Lambda_ge_1_{kind}", "detail": f"min Lambda {summ['min_Lambda']:.10g}"})
        if Y.p_minus == Y.p_plus and summ["relative_spread"] > 1e-4:
            fails.append({"check": f"mu_invariance_{kind}", "detail": f"spread {summ['relative_spread']:.3g}"})
    art.table("sweep_mu", rows, ["bc", "mu", "Lambda", "lambda", "residual", "iters", "converged",
                                 "Lambda_minus_1"])
    art.table("sweep_mu_summary", summaries)
    return fails


def cmd_multiplicity(cfg, art):
    cfg.require("young", "domain", "fractional", "nonlinearities")
    Y, d = build_young(cfg), build_domain(cfg)
    f_nl, h_nl = build_nonlinearity(cfg, "f"), build_nonlinearity(cfg, "h")
    nl, so = cfg.nonlinearities, cfg.solver
    beta = cfg.beta
    cls = check_class_A(f_nl, Y, d.dim, cfg.fractional["s"])
    est = estimate_ricceri(Y, f_nl, d, beta, seed=so["seed"])
    art.table("ricceri", [{"quantity": "alpha_hat", "value": est.alpha_hat, "label": est.label},
                          {"quantity": "beta_hat", "value": est.beta_hat, "label": est.label},
                          {"quantity": "delta_hat", "value": est.delta_hat, "label": est.label},
                          {"quantity": "class_A_certified", "value": cls.certified, "label": "report"}],
              ["quantity", "value", "label"])
    if nl["lam"]:
        lams = list(nl["lam"])
    else:
        lo, hi = nl["lam_span"]
        lams = list(np.geomspace(lo * est.delta_hat, hi * est.delta_hat, nl["lam_count"]))
    points, summary = multiplicity_sweep(Y, f_nl, d, beta, lams, nl["mu_coeff"], h_nl,
                                         so["crit_starts"], so["separation"], so["seed"], so["crit_tol"])
    rows = [{"kind": "point", **p} for p in points] + [{"kind": "summary", **s} for s in summary]
    art.table("multiplicity", rows, ["kind", "lambda", "mu", "psi", "residual", "x_norm", "origin",
                                     "morse_index", "count", "count_nonzero", "max_x_norm"])
    return [{"check": "residual", "detail": f"point at lambda={p['lambda']:.6g} has residual {p['residual']:.3g}"}
            for p in points if not p["residual"] < so["crit_tol"]]


def cmd_perimeter(cfg, art):
    cfg.require("young", "domain", "fractional")
    Y = build_young(cfg)
    h0 = cfg.domain["h"]
    rows = []
    for k in range(3):
        d = build_domain(cfg, h0 / 2 ** k)
        val, tail = perimeter(Y, d)
        rows.append({"h": d.h, "perimeter": val, "tail_bound": tail})
    for a, b, c in zip(rows, rows[1:], rows[2:]):
        e1, e2 = abs(b["perimeter"] - a["perimeter"]), abs(c["perimeter"] - b["perimeter"])
        c["order_estimate"] = float(np.log2(e1 / e2)) if e2 > 0 else np.inf
    art.table("perimeter", rows, ["h", "perimeter", "tail_bound", "order_estimate"])
    return [{"check": "perimeter_finite", "detail": f"h={r['h']}"} for r in rows
            if not (np.isfinite(r["perimeter"]) and r["perimeter"] > 0)]


HANDLERS = {"check-young": cmd_check_young, "verify-calculus": cmd_verify_calculus,
            "verify-operator": cmd_verify_operator, "eigen": cmd_eigen, "sweep-mu": cmd_sweep_mu,
            "multiplicity": cmd_multiplicity, "perimeter": cmd_perimeter}


def dispatch(cfg: RunConfig, subcommand: str) -> tuple:
    """Run one subcommand; returns ``(exit_status, written_paths, failures)``."""
    art = Artifacts(cfg)
    fails = HANDLERS[subcommand](cfg, art)
    if fails:
        art.dir.mkdir(parents=True, exist_ok=True)
        manifest = art.dir / "failures.json"
        manifest.write_text(json.dumps({"subcommand": subcommand, "config_sha256": cfg.sha256(),
                                        "failures": fails}, indent=2, sort_keys=True) + "\n")
        art.written.append(manifest)
    return (1 if fails else 0), art.written, fails


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracorlicz", description=__doc__.splitlines()[0])
    ap.add_argument("subcommand", choices=SUBCOMMANDS)
    ap.add_argument("--config", required=True, help="INI-style run configuration")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--h", type=float, help="mesh size")
    ap.add_argument("--collar", type=float, help="collar width R")
    ap.add_argument("--tol", type=float, help="solver tolerance")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        text = Path(args.config).read_text(encoding="utf-8")
        cfg = with_overrides(parse_config(text), args.seed, args.out, args.h, args.collar, args.tol)
        status, paths, fails = dispatch(cfg, args.subcommand)
    except (ParseError, ValidationError, MissingSection, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:       # geometry and parameter errors raised by the builders
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    for f in fails:
        print(f"FAIL {f['check']}: {f['detail']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
