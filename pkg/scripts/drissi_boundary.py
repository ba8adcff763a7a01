"""Locate the smallest nu with no Heinz-over-log-mean violation on ratio grids of decreasing spacing.

The true boundary is (sqrt3 - 1)/(2 sqrt3).  Just below it, H_nu exceeds L only
for ratios a/b close to 1, so a grid sees the boundary only as finely as its spacing allows.
"""
import argparse

from heinzlab.means import DRISSI_INTERVAL
from heinzlab.suite import drissi_grid, scan_drissi


def edge(grid, lo=0.0, hi=0.25, iters=60):
    # bisect on "violation found"; violations exist for every nu below the edge
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if scan_drissi(mid, grid) is None:
            hi = mid
        else:
            lo = mid
    return hi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--steps", type=float, nargs="+", default=[1.0, 0.5, 0.25, 0.1, 0.05])
    ap.add_argument("--reach", type=float, default=20.0, help="ratios span 2^[-reach, reach]")
    args = ap.parse_args()
    exact = DRISSI_INTERVAL[0]
    print(f"exact lower endpoint {exact:.15f}")
    print(f"default grid ({drissi_grid().size} ratios): edge {edge(drissi_grid()):.12f}")
    for step in args.steps:
        n = int(round(args.reach / step))
        grid = [2.0 ** (i * step) for i in range(-n, n + 1)]
        e = edge(grid)
        print(f"log2 step {step:<5g} ({len(grid):4d} ratios): edge {e:.12f}  gap {exact - e:.3e}")


if __name__ == "__main__":
    main()
