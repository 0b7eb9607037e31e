"""Lambda as a function of the level mu (constant for powers, bounded below by 1)."""
import argparse
from dataclasses import dataclass

import numpy as np

from _common import write_rows, young_from_tag
from fracorlicz.eigen import BoundaryCondition, SolverOptions, mu_sweep
from fracorlicz.grid import build_grid


@dataclass
class SweepConfig:
    family: str = "power_log:2"
    bc: str = "dirichlet"
    s: float = 0.3
    h: float = 1 / 32
    collar_R: float = 0.25
    mu_min: float = 1e-3
    mu_max: float = 1e3
    n_mu: int = 13
    seed: int = 0


def run(cfg: SweepConfig):
    Y = young_from_tag(cfg.family)
    d = build_grid((0, 1), cfg.h, cfg.collar_R, cfg.s)
    bc = BoundaryCondition(cfg.bc, 1.0 if cfg.bc == "robin" else None)
    rows, summary = mu_sweep(Y, bc, np.geomspace(cfg.mu_min, cfg.mu_max, cfg.n_mu), d,
                             SolverOptions(tol=1e-8, n_starts=4, seed=cfg.seed))
    print(f"# {summary}")
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default=SweepConfig.family)
    ap.add_argument("--bc", default=SweepConfig.bc)
    ap.add_argument("--s", type=float, default=SweepConfig.s)
    ap.add_argument("--out")
    a = ap.parse_args()
    write_rows(run(SweepConfig(family=a.family, bc=a.bc, s=a.s)), a.out)
