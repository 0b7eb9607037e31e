"""Critical-point counts of Psi = J - lam F over a lambda sweep above delta_hat."""
import argparse
from dataclasses import dataclass

import numpy as np

from _common import write_rows, young_from_tag
from fracorlicz.grid import build_grid
from fracorlicz.multiplicity import estimate_ricceri, multiplicity_sweep
from fracorlicz.nonlinearities import piecewise_power


@dataclass
class MultiplicityConfig:
    family: str = "power:2"
    alpha: float = 1.5
    beta_exp: float = 4.0
    s: float = 0.3
    h: float = 1 / 64
    collar_R: float = 0.25
    lam_lo: float = 1.1
    lam_hi: float = 10.0
    n_lam: int = 8
    n_starts: int = 16
    separation: float = 1e-3
    seed: int = 0


def run(cfg: MultiplicityConfig):
    Y = young_from_tag(cfg.family)
    d = build_grid((0, 1), cfg.h, cfg.collar_R, cfg.s)
    nl = piecewise_power(cfg.alpha, cfg.beta_exp)
    est = estimate_ricceri(Y, nl, d, 1.0, seed=cfg.seed)
    print(f"# alpha_hat={est.alpha_hat:.3e} beta_hat={est.beta_hat:.6f} "
          f"delta_hat={est.delta_hat:.6f} (heuristic estimates)")
    lams = np.geomspace(cfg.lam_lo * est.delta_hat, cfg.lam_hi * est.delta_hat, cfg.n_lam)
    _, summary = multiplicity_sweep(Y, nl, d, 1.0, lams, 0.0, None, cfg.n_starts,
                                    cfg.separation, cfg.seed)
    return summary


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-lam", type=int, default=MultiplicityConfig.n_lam)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    a = ap.parse_args()
    write_rows(run(MultiplicityConfig(n_lam=a.n_lam, seed=a.seed)), a.out)
