"""Sectioned key-value run configuration (INI syntax) with strict validation."""
from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Optional


class ParseError(ValueError):
    def __init__(self, msg, line: Optional[int] = None, field_: Optional[str] = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + msg)
        self.line, self.field = line, field_


class ValidationError(ValueError):
    pass


class MissingSection(KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing section"


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# section -> key -> (converter, default)
SCHEMA = {
    "young": {"family": (str, "power"), "p": (float, 2.0), "exponents": (_floats, ()),
              "a": (float, 2.0), "b": (float, 3.0)},
    "domain": {"omega": (_floats, (0.0, 1.0)), "h": (float, 1 / 32), "collar_R": (float, 0.25),
               "dim": (int, 1)},
    "fractional": {"s": (float, 0.3)},
    "problem": {"bc": (str, "all"), "beta": (_floats, (1.0,)), "mu": (float, 1.0),
                "mu_list": (_floats, (1e-2, 1e-1, 1.0, 1e1, 1e2))},
    "nonlinearities": {"f": (str, "piecewise_power"), "f_p": (float, 3.0), "f_q": (float, 4.0),
                       "f_alpha": (float, 1.5), "f_beta": (float, 4.0), "f_literal": (_bool, False),
                       "h": (str, "zero"), "h_p": (float, 3.0), "h_q": (float, 4.0),
                       "h_alpha": (float, 1.5), "h_beta": (float, 4.0),
                       "lam": (_floats, ()), "lam_span": (_floats, (1.1, 10.0)),
                       "lam_count": (int, 8), "mu_coeff": (float, 0.0)},
    "solver": {"tol": (float, 1e-6), "max_iter": (int, 50_000), "n_starts": (int, 8),
               "seed": (int, 0), "separation": (float, 1e-3), "crit_tol": (float, 1e-8),
               "crit_starts": (int, 16), "samples": (int, 100)},
    "output": {"dir": (str, "out"), "format": (str, "csv")},
}

BC_CHOICES = ("dirichlet", "neumann", "regional_neumann", "robin")
FAMILIES = ("power", "power_log", "sum_of_powers", "piecewise_power")
NL_CHOICES = ("sine_power", "sine_young", "concave_convex", "piecewise_power", "zero")


@dataclass
class RunConfig:
    young: dict
    domain: dict
    fractional: dict
    problem: dict
    nonlinearities: dict
    solver: dict
    output: dict
    present: frozenset = field(default_factory=frozenset)

    def resolved(self) -> dict:
        d = asdict(self)
        d.pop("present")
        return d

    def sha256(self) -> str:
        blob = json.dumps(self.resolved(), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()

    def require(self, *sections):
        for name in sections:
            if name not in self.present:
                raise MissingSection(f"section [{name}] is required for this subcommand")

    @property
    def omega(self):
        o = self.domain["omega"]
        return o if self.domain["dim"] == 1 else (o[:2], o[2:])

    @property
    def bc_list(self):
        bc = self.problem["bc"]
        if bc == "all":
            return list(BC_CHOICES)
        return [b.strip() for b in bc.split(",") if b.strip()]

    @property
    def beta(self):
        b = self.problem["beta"]
        return b[0] if len(b) == 1 else list(b)


def _line_of(text: str, section: str, key: Optional[str] = None) -> Optional[int]:
    current = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if key is None and current == section:
                return no
        elif key is not None and current == section:
            name = line.split("=", 1)[0].split(":", 1)[0].strip()
            if name == key:
                return no
    return None


def parse_config(text: str) -> RunConfig:
    """Parse and validate; every key not given takes its schema default.

    >>> cfg = parse_config("[young]\\nfamily = power\\np = 2\\n[fractional]\\ns = 0.3\\n")
    >>> cfg.fractional["s"], cfg.domain["omega"]
    (0.3, (0.0, 1.0))
    """
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__")
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("key outside any section", exc.lineno) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        raise ParseError(str(exc).split(":")[-1].strip(), getattr(exc, "lineno", None)) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("malformed line", line) from None

    values = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ParseError(f"unknown section [{section}]", _line_of(text, section), section)
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ParseError(f"unknown key {key!r} in [{section}]",
                                 _line_of(text, section, key), key)
            conv = SCHEMA[section][key][0]
            try:
                values[(section, key)] = conv(raw)
            except ValueError:
                raise ParseError(f"bad value {raw!r} for {key}",
                                 _line_of(text, section, key), key) from None

    sections = {}
    for section, keys in SCHEMA.items():
        sections[section] = {k: values.get((section, k), default) for k, (_, default) in keys.items()}
    cfg = RunConfig(**sections, present=frozenset(cp.sections()))
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> RunConfig:
    y, dm, fr, pr, nl, so, out = (cfg.young, cfg.domain, cfg.fractional, cfg.problem,
                                  cfg.nonlinearities, cfg.solver, cfg.output)
    if y["family"] not in FAMILIES:
        raise ValidationError(f"young family must be one of {FAMILIES}")
    if y["family"] in ("power", "power_log") and not y["p"] > 1:
        raise ValidationError("p must exceed 1")
    if y["family"] == "sum_of_powers" and (not y["exponents"] or min(y["exponents"]) <= 1):
        raise ValidationError("sum_of_powers needs exponents > 1")
    if y["family"] == "piecewise_power" and not 1 < y["a"] <= y["b"]:
        raise ValidationError("piecewise_power needs 1 < a <= b")
    if not 0 < fr["s"] < 1:
        raise ValidationError("s must lie in (0,1)")
    if dm["dim"] not in (1, 2):
        raise ValidationError("dim must be 1 or 2")
    if len(dm["omega"]) != 2 * dm["dim"]:
        raise ValidationError("omega needs 2*dim bounds")
    if not dm["h"] > 0 or not dm["collar_R"] > 0:
        raise ValidationError("h and collar_R must be positive")
    for bc in cfg.bc_list:
        if bc not in BC_CHOICES:
            raise ValidationError(f"bc must be one of {BC_CHOICES} or 'all'")
    if not pr["beta"] or min(pr["beta"]) <= 0:
        raise ValidationError("beta must be strictly positive")
    if not pr["mu"] > 0 or not pr["mu_list"] or min(pr["mu_list"]) <= 0:
        raise ValidationError("mu must be positive")
    for key in ("f", "h"):
        if nl[key] not in NL_CHOICES:
            raise ValidationError(f"{key} must be one of {NL_CHOICES}")
    if nl["lam"] and min(nl["lam"]) <= 0:
        raise ValidationError("lam must be positive")
    if len(nl["lam_span"]) != 2 or not 0 < nl["lam_span"][0] <= nl["lam_span"][1]:
        raise ValidationError("lam_span needs two increasing positive factors")
    if nl["lam_count"] < 1 or nl["mu_coeff"] < 0:
        raise ValidationError("lam_count >= 1 and mu_coeff >= 0 required")
    if not so["tol"] > 0 or not so["crit_tol"] > 0 or not so["separation"] > 0:
        raise ValidationError("tolerances and separation must be positive")
    if so["n_starts"] < 1 or so["crit_starts"] < 1 or so["max_iter"] < 1 or so["samples"] < 1:
        raise ValidationError("counts must be positive")
    if out["format"] not in ("csv", "json-lines"):
        raise ValidationError("format must be csv or json-lines")
    return cfg


def with_overrides(cfg: RunConfig, seed=None, out=None, h=None, collar=None, tol=None) -> RunConfig:
    """Apply command-line overrides and revalidate."""
    if seed is not None:
        cfg.solver["seed"] = int(seed)
    if out is not None:
        cfg.output["dir"] = str(out)
    if h is not None:
        cfg.domain["h"] = float(h)
    if collar is not None:
        cfg.domain["collar_R"] = float(collar)
    if tol is not None:
        cfg.solver["tol"] = float(tol)
    return validate(cfg)
