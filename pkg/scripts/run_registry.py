"""Run every registry check over seeded instances and print per-check margin statistics."""
import argparse
import time

import numpy as np

from heinzlab.suite import REGISTRY, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=63, help="per (check, order)")
    ap.add_argument("--orders", type=int, nargs="+", default=list(range(1, 9)))
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--cond-cap", type=float, default=1e4)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    print(f"{'check':12s} {'instances':>9s} {'failed':>6s} {'min rel margin':>15s} {'median':>10s} {'seconds':>8s}")
    for cid, check in REGISTRY.items():
        t0 = time.perf_counter()
        margins, failed, count = [], 0, 0
        for chain in run_suite([cid], args.orders, args.instances, args.seed, args.cond_cap, jobs=args.jobs):
            count += 1
            failed += not chain.ok
            margins.extend(r.margin / max(1.0, abs(r.rhs)) for r in chain.reports)
        m = np.array(margins)
        tag = "" if check.asserted else "  (not asserted)"
        print(f"{cid:12s} {count:9d} {failed:6d} {m.min():15.3e} {np.median(m):10.3e} "
              f"{time.perf_counter() - t0:8.1f}{tag}")


if __name__ == "__main__":
    main()
