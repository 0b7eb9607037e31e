"""Shared helpers for the experiment scripts."""
import csv
import sys

from fracorlicz.young import make_young


def young_from_tag(tag: str):
    """'power:2', 'power_log:2', 'sum_of_powers:2,4' or 'piecewise_power:2,3'."""
    family, _, args = tag.partition(":")
    vals = [float(x) for x in args.split(",")] if args else []
    if family in ("power", "power_log"):
        return make_young(family, p=vals[0] if vals else 2.0)
    if family == "sum_of_powers":
        return make_young(family, exponents=vals)
    return make_young(family, a=vals[0], b=vals[1])


def write_rows(rows, path=None):
    cols = []
    for r in rows:
        cols += [k for k in r if k not in cols]
    fh = open(path, "w", newline="") if path else sys.stdout
    w = csv.DictWriter(fh, cols, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if path:
        fh.close()
