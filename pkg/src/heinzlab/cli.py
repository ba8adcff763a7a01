"""``heinzlab verify | chain | scan``.

Exit codes: 0 all checks behave as expected, 1 some check failed, 2 usage or
hypothesis error, 3 numerical failure (the failing seed is printed).

Settings resolve as flags > ``--config`` file > ``HEINZLAB_SEED`` (seed only) > defaults.
The config file is plain ``key = value`` lines; ``#`` starts a comment and keys
match the long flag names (``cond-cap`` or ``cond_cap``)::

    suite = CHAIN-3.1, INEQ-1.3
    orders = 1-8
    instances = 63
    seed = 42
    norms = trace, op
    param = nu=0.3; n=4
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import HeinzLabError, HypothesisViolation, NumericalError, ValidationError
from .linalg import HermitianPD
from .means import DRISSI_INTERVAL, Phi_m_scalar, f_x_scalar, fx_mean, phi_n_scalar
from .norms import parse_norm
from .suite import (REGISTRY, ChainReport, InequalityReport, Instance, InstanceSpec, X_KINDS,
                    apply_overrides, drissi_grid, get_check, run_check, run_suite, sample_params, scan_drissi)

FIELDS = ("id", "stage", "params", "norm", "lhs", "rhs", "margin", "pass", "tol_used", "instance", "expect")


@dataclass
class RunConfig:
    suite: tuple = ("all",)
    orders: tuple = tuple(range(1, 9))
    instances: int = 63          # per (id, order): 8 orders x 63 = 504 per id
    seed: int = 0
    cond_cap: float = 1e4
    norms: tuple = ()
    tol: float = 1e-9
    out: str = "-"
    format: str = "jsonl"
    params: dict = field(default_factory=dict)
    jobs: int = 1

    def __post_init__(self):
        if self.instances < 1:
            raise ValidationError(f"instances must be positive, got {self.instances}")
        if not self.orders or min(self.orders) < 1:
            raise ValidationError(f"orders must be positive integers, got {self.orders}")
        if self.format not in ("jsonl", "csv"):
            raise ValidationError(f"format must be jsonl or csv, got {self.format!r}")
        if not self.tol >= 0:
            raise ValidationError(f"tol must be >= 0, got {self.tol}")
        if self.jobs < 1:
            raise ValidationError(f"jobs must be positive, got {self.jobs}")
        for cid in self.check_ids:
            get_check(cid)

    @property
    def check_ids(self) -> list[str]:
        if tuple(self.suite) == ("all",):
            return list(REGISTRY)
        return list(self.suite)


# --------------------------------------------------------------- parsing

def parse_orders(text: str) -> tuple[int, ...]:
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        lo, sep, hi = part.partition("-")
        try:
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
        except ValueError:
            raise ValidationError(f"bad order spec {part!r}") from None
    if not out:
        raise ValidationError("no orders given")
    return tuple(out)


def _listify(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(text)
    return tuple(t.strip() for t in str(text).split(",") if t.strip())


def _scalar(text: str):
    try:
        v = int(text)
        return v
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_params(items) -> dict:
    out = {}
    for item in items:
        for piece in str(item).split(";"):
            piece = piece.strip()
            if not piece:
                continue
            key, sep, val = piece.partition("=")
            if not sep or not key.strip():
                raise ValidationError(f"--param expects key=value, got {piece!r}")
            out[key.strip()] = _scalar(val.strip())
    return out


def read_config(path: str) -> dict:
    cfg: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ValidationError(f"{path}:{lineno}: expected key = value")
            cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


_CONVERT = {
    "suite": _listify,
    "orders": parse_orders,
    "instances": int,
    "seed": int,
    "cond_cap": float,
    "norms": lambda v: tuple(parse_norm(t) for t in _listify(v)),
    "tol": float,
    "out": str,
    "format": lambda v: {"json-lines": "jsonl", "jsonlines": "jsonl"}.get(str(v), str(v)),
    "params": parse_params,
    "param": parse_params,
    "jobs": int,
}


def build_config(ns: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    merged: dict = {}
    if environ.get("HEINZLAB_SEED"):
        merged["seed"] = environ["HEINZLAB_SEED"]
    if getattr(ns, "config", None):
        merged.update(read_config(ns.config))
    for f in fields(RunConfig):
        v = getattr(ns, f.name, None)
        if v is not None and v != []:
            merged[f.name] = v
    if getattr(ns, "param", None):
        merged["param"] = ns.param
    if "param" in merged:
        merged["params"] = merged.pop("param")
    kwargs = {}
    for k, v in merged.items():
        if k not in _CONVERT:
            raise ValidationError(f"unknown config key {k!r}")
        try:
            kwargs[k] = _CONVERT[k](v)
        except ValueError as exc:
            raise ValidationError(f"bad value for {k}: {v!r} ({exc})") from None
    return RunConfig(**kwargs)


# --------------------------------------------------------------- output

def _float_text(x: float) -> str:
    return repr(float(x))


def record_to_csv_row(r: InequalityReport) -> list[str]:
    d = r.as_dict()
    row = []
    for k in FIELDS:
        v = d[k]
        if isinstance(v, dict):
            row.append(json.dumps(v, sort_keys=True))
        elif isinstance(v, bool):
            row.append("true" if v else "false")
        elif isinstance(v, float):
            row.append(_float_text(v))
        else:
            row.append(str(v))
    return row


def record_from_csv_row(row: dict) -> InequalityReport:
    d = dict(row)
    d["params"] = json.loads(d["params"])
    d["instance"] = json.loads(d["instance"])
    d["pass"] = d["pass"] == "true"
    return InequalityReport.from_dict(d)


class ReportWriter:
    def __init__(self, stream, fmt: str):
        self.stream, self.fmt = stream, fmt
        if fmt == "csv":
            self._csv = csv.writer(stream, lineterminator="\n")
            self._csv.writerow(FIELDS)

    def write(self, r: InequalityReport) -> None:
        if self.fmt == "csv":
            self._csv.writerow(record_to_csv_row(r))
        else:
            self.stream.write(json.dumps(r.as_dict()) + "\n")


def read_reports(stream, fmt: str = "jsonl") -> list[InequalityReport]:
    if fmt == "csv":
        return [record_from_csv_row(row) for row in csv.DictReader(stream)]
    return [InequalityReport.from_dict(json.loads(line)) for line in stream if line.strip()]


# --------------------------------------------------------------- commands

def cmd_verify(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    sink = stdout if cfg.out == "-" else open(cfg.out, "w", encoding="utf-8", newline="")
    writer = ReportWriter(sink, cfg.format)
    summary: dict[str, list[int]] = {}
    try:
        for chain in run_suite(cfg.check_ids, cfg.orders, cfg.instances, cfg.seed, cfg.cond_cap,
                               cfg.norms or None, cfg.tol, cfg.params or None, jobs=cfg.jobs):
            tally = summary.setdefault(chain.id, [0, 0, 0])
            tally[0] += 1
            tally[1] += 0 if chain.ok else 1
            tally[2] += any(r.expect == "violation" for r in chain.reports)
            for r in chain.reports:
                writer.write(r)
    finally:
        if sink is not stdout:
            sink.close()
    failed = 0
    for cid, (total, bad, viol) in summary.items():
        note = f" ({viol} expected violations found)" if viol else ""
        if not REGISTRY[cid].asserted:
            note += " (logged only)"
        print(f"{'FAIL' if bad else 'ok  '} {cid:12s} {total - bad}/{total} instances{note}", file=stderr)
        failed += bad
    return 1 if failed else 0


def _fmt(x: float) -> str:
    return f"{x:>14.8g}"


def render_chain(chain: ChainReport) -> str:
    out = io.StringIO()
    cols = list(chain.stages[0][1]) if chain.stages else []
    width = max([len(lab) for lab, _ in chain.stages] + [5])
    out.write(f"{chain.id}  params={json.dumps(chain.params)}  instance={json.dumps(chain.instance)}\n")
    out.write(" " * width + "".join(f"{c:>14s}" for c in cols) + "\n")
    for lab, vals in chain.stages:
        out.write(f"{lab:<{width}s}" + "".join(_fmt(vals[c]) for c in cols) + "\n")
    out.write("\nadjacent margins (next - previous; Loewner rows: min eigenvalue of the difference)\n")
    by_stage: dict[str, dict[str, InequalityReport]] = {}
    for r in chain.reports:
        by_stage.setdefault(r.stage, {})[r.norm] = r
    norms = list(next(iter(by_stage.values())).keys()) if by_stage else []
    for stage, rs in by_stage.items():
        flag = "" if all(r.passed for r in rs.values()) else "  <-- violation"
        out.write(f"  {stage}\n    " + "".join(f"{n}={rs[n].margin:.3e} " for n in norms) + flag + "\n")
    out.write(f"\nmonotone: {chain.monotone}   worst relative violation: {chain.worst_violation:.3e}\n")
    return out.getvalue()


def cmd_chain(check_id: str, params: dict, spec: InstanceSpec, *, ab: str = "random",
              norms=None, tol: float = 1e-9, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    check = get_check(check_id)
    base = apply_overrides(sample_params(check_id, spec), params) if params else sample_params(check_id, spec)
    if ab == "identity" and check.kind != "scalar":
        eye = np.eye(spec.n, dtype=np.complex128)
        I = HermitianPD.from_spectrum(np.ones(spec.n), eye)
        inst = Instance(I, I, spec.build().X, spec)
    else:
        inst = spec
    chain = run_check(check_id, inst, base, norms, tol)
    stdout.write(render_chain(chain))
    return 0 if chain.ok else 1


def cmd_scan(target: str, ns, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    if target == "drissi":
        lo, hi = DRISSI_INTERVAL
        stdout.write(f"Drissi interval: [{lo:.16f}, {hi:.16f}]  ((sqrt3 -/+ 1)/(2 sqrt3))\n")
        grid = drissi_grid(ns.kmin, ns.kmax)
        stdout.write(f"grid: a/b in 2^k, k = {ns.kmin}..{ns.kmax} ({grid.size} points)\n")
        for nu in ns.nu or [0.20, 0.21, 0.2114, 0.25, 0.5]:
            hit = scan_drissi(nu, grid)
            inside = lo <= nu <= hi
            if hit is None:
                stdout.write(f"nu={nu:<8g} inside={inside!s:5s}  no violation\n")
            else:
                stdout.write(f"nu={nu:<8g} inside={inside!s:5s}  violation at a={hit.a:g}, b={hit.b:g}: "
                             f"H={hit.heinz:.12g} > L={hit.log_mean:.12g} (margin {hit.margin:.3e})\n")
        return 0
    if target == "ladder-convergence":
        x, a, b = ns.x, ns.alpha, ns.beta
        if not x > 0 or not a < b or ns.depth < 1:
            raise ValidationError("ladder scan needs x > 0, alpha < beta and depth >= 1")
        exact = float(fx_mean(x, a, b))
        f = lambda t: float(f_x_scalar(x, t))  # noqa: E731
        stdout.write(f"f_x with x={x:g} on [{a:g}, {b:g}]; mean integral = {exact:.15g}\n")
        stdout.write(f"{'k':>3s} {'phi_k':>22s} {'Phi_k':>22s} {'Phi_k - phi_k':>14s} {'|phi_k - I|':>12s} {'|Phi_k - I|':>12s}\n")
        for k in range(1, ns.depth + 1):
            lo_, hi_ = float(phi_n_scalar(f, a, b, k)), float(Phi_m_scalar(f, a, b, k))
            stdout.write(f"{k:>3d} {lo_:>22.15g} {hi_:>22.15g} {hi_ - lo_:>14.3e} "
                         f"{abs(lo_ - exact):>12.3e} {abs(hi_ - exact):>12.3e}\n")
        return 0
    raise ValidationError(f"unknown scan target {target!r}")


# --------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="heinzlab", description="Verify Heinz/Heron mean inequalities numerically.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run registry checks over seeded random instances")
    v.add_argument("--suite", help="comma-separated check ids, or 'all'")
    v.add_argument("--orders", help="matrix orders, e.g. '1-8' or '2,4'")
    v.add_argument("--instances", type=int, help="instances per (id, order)")
    v.add_argument("--seed", type=int)
    v.add_argument("--cond-cap", dest="cond_cap", type=float)
    v.add_argument("--norms", help="extra norms: trace, hs, op, kyfan:K, schatten:P")
    v.add_argument("--tol", type=float)
    v.add_argument("--out", help="output path ('-' for stdout)")
    v.add_argument("--format", choices=("jsonl", "json-lines", "csv"))
    v.add_argument("--param", action="append", default=[], help="force a parameter, e.g. nu=0.21")
    v.add_argument("--jobs", type=int, help="worker processes")
    v.add_argument("--config", help="key = value settings file")

    c = sub.add_parser("chain", help="print the stage table of one check on one instance")
    c.add_argument("id")
    c.add_argument("--order", type=int, default=3)
    c.add_argument("--seed", type=int)
    c.add_argument("--cond-cap", dest="cond_cap", type=float, default=1e3)
    c.add_argument("--x-kind", dest="x_kind", choices=X_KINDS, default="general")
    c.add_argument("--ab", choices=("random", "identity"), default="random", help="use A = B = I")
    c.add_argument("--norms")
    c.add_argument("--tol", type=float, default=1e-9)
    c.add_argument("--param", action="append", default=[])

    s = sub.add_parser("scan", help="scalar scans")
    s.add_argument("target", choices=("drissi", "ladder-convergence"))
    s.add_argument("--nu", type=float, action="append", help="nu values for the Drissi scan")
    s.add_argument("--kmin", type=int, default=-20)
    s.add_argument("--kmax", type=int, default=20)
    s.add_argument("--x", type=float, default=4.0)
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--depth", type=int, default=12)
    return p


def main(argv=None, *, stdout=None, stderr=None, environ=None) -> int:
    stderr = sys.stderr if stderr is None else stderr
    environ = os.environ if environ is None else environ
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        if ns.command == "verify":
            return cmd_verify(build_config(ns, environ), stdout, stderr)
        if ns.command == "chain":
            seed = ns.seed if ns.seed is not None else int(environ.get("HEINZLAB_SEED", 0))
            spec = InstanceSpec(ns.order, seed, ns.cond_cap, ns.x_kind)
            norms = [parse_norm(t) for t in _listify(ns.norms)] if ns.norms else None
            return cmd_chain(ns.id, parse_params(ns.param), spec, ab=ns.ab, norms=norms, tol=ns.tol, stdout=stdout)
        return cmd_scan(ns.target, ns, stdout)
    except NumericalError as exc:
        seed = f" [instance seed {exc.seed}; rerun with 'heinzlab chain ID --order N --seed {exc.seed}']" if exc.seed is not None else ""
        print(f"numerical error: {exc}{seed}", file=stderr)
        return 3
    except (HypothesisViolation, ValidationError) as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except HeinzLabError as exc:
        print(f"error: {exc}", file=stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
