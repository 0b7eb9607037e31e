"""Empirical convergence orders of modulars, perimeter and Lambda_D under h -> h/2 -> h/4."""
import argparse
from dataclasses import dataclass

import numpy as np

from _common import write_rows, young_from_tag
from fracorlicz.eigen import BoundaryCondition, SolverOptions, solve_min
from fracorlicz.grid import build_grid
from fracorlicz.modulars import modular_G, modular_sG
from fracorlicz.operator import perimeter


@dataclass
class RefinementConfig:
    family: str = "power:2"
    s_values: tuple = (0.1, 0.2, 0.3)
    h0: float = 1 / 16
    levels: int = 4
    collar_R: float = 0.25


def profile(x):
    return np.where((x > 0) & (x < 1), x ** 2 * (1 - x) ** 2 * np.exp(x), 0.0)


def run(cfg: RefinementConfig):
    Y = young_from_tag(cfg.family)
    rows = []
    for s in cfg.s_values:
        vals = []
        for k in range(cfg.levels):
            d = build_grid((0, 1), cfg.h0 / 2 ** k, cfg.collar_R, s)
            u = d.function(profile)
            vals.append({"s": s, "h": d.h, "modular_G": modular_G(Y, u),
                         "modular_sG": modular_sG(Y, u, "star"), "perimeter": perimeter(Y, d)[0],
                         "Lambda_D": solve_min(Y, BoundaryCondition("dirichlet"), 1.0, d,
                                               SolverOptions(tol=1e-9, n_starts=2)).capital_lambda})
        for k in range(2, len(vals)):
            for q in ("modular_G", "modular_sG", "perimeter", "Lambda_D"):
                e1 = abs(vals[k - 1][q] - vals[k - 2][q])
                e2 = abs(vals[k][q] - vals[k - 1][q])
                vals[k][f"order_{q}"] = float(np.log2(e1 / e2)) if e2 > 0 else float("inf")
        rows += vals
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--family", default=RefinementConfig.family)
    ap.add_argument("--levels", type=int, default=RefinementConfig.levels)
    ap.add_argument("--out")
    a = ap.parse_args()
    write_rows(run(RefinementConfig(family=a.family, levels=a.levels)), a.out)
