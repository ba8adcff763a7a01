"""Midpoint/trapezoid ladder errors for f_x(t) = (x^t + x^(1-t))/2 against the closed-form mean."""
import argparse

from heinzlab.means import Phi_m_scalar, f_x_scalar, fx_mean, phi_n_scalar


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--xs", type=float, nargs="+", default=[1e-3, 0.1, 10.0, 1e3])
    ap.add_argument("--interval", type=float, nargs=2, default=[0.0, 1.0])
    ap.add_argument("--depth", type=int, default=12)
    args = ap.parse_args()
    a, b = args.interval

    for x in args.xs:
        exact = float(fx_mean(x, a, b))
        f = lambda t: float(f_x_scalar(x, t))  # noqa: E731
        print(f"\nx = {x:g}, mean over [{a:g}, {b:g}] = {exact:.15g}")
        print(f"{'k':>3s} {'mid err':>10s} {'trap err':>10s} {'trap/mid':>9s} {'rel trap err':>13s}")
        prev = None
        for k in range(1, args.depth + 1):
            lo = exact - float(phi_n_scalar(f, a, b, k))
            hi = float(Phi_m_scalar(f, a, b, k)) - exact
            ratio = hi / lo if lo else float("nan")
            shrink = f"  x{prev / hi:.2f}" if prev else ""
            print(f"{k:3d} {lo:10.3e} {hi:10.3e} {ratio:9.3f} {hi / abs(exact):13.3e}{shrink}")
            prev = hi


if __name__ == "__main__":
    main()
