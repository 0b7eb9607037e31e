"""Lambda for all four boundary conditions across families and s; checks the chain."""
import argparse
from dataclasses import dataclass

from _common import write_rows, young_from_tag
from fracorlicz.eigen import ORDER, BoundaryCondition, SolverOptions, solve_min, verify_order
from fracorlicz.grid import build_grid


@dataclass
class OrderingConfig:
    families: tuple = ("power:2", "power_log:2", "sum_of_powers:2,3")
    s_values: tuple = (0.2, 0.4, 0.6)
    h: float = 1 / 32
    collar_R: float = 0.25
    beta: float = 1.0
    mu: float = 1.0
    n_starts: int = 8
    seed: int = 0


def run(cfg: OrderingConfig):
    rows = []
    opts = SolverOptions(tol=1e-8, n_starts=cfg.n_starts, seed=cfg.seed)
    for tag in cfg.families:
        Y = young_from_tag(tag)
        for s in cfg.s_values:
            d = build_grid((0, 1), cfg.h, cfg.collar_R, s)
            res = {k: solve_min(Y, BoundaryCondition(k, cfg.beta if k == "robin" else None), cfg.mu, d, opts)
                   for k in ORDER}
            rep = verify_order(res, Y, raise_on_failure=False)
            rows.append({"family": tag, "s": s, **{f"Lambda_{k}": res[k].capital_lambda for k in ORDER},
                         "chain_ok": rep.ok})
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--h", type=float, default=OrderingConfig.h)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    a = ap.parse_args()
    write_rows(run(OrderingConfig(h=a.h, seed=a.seed)), a.out)
