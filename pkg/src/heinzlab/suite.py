"""Registry of inequality checks, seeded instance generation and report assembly.

Every check is an ordered list of stages that should be nondecreasing:
``stage_0 <= stage_1 <= ...``.  A plain two-sided inequality is a two-stage
chain.  Stages are compared pairwise in every requested norm (norm checks), in
the Loewner order (operator checks) or as real numbers (scalar checks).
"""
from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import HypothesisViolation, NumericalError, ValidationError
from .linalg import (HermitianPD, as_pd, hermitian_eig, hermitian_part, make_rng,
                     random_complex, random_pd, singular_values)
from .matfun import apply_spectral, fprime_opnorm, parse_monotone
from .means import (DRISSI_INTERVAL, MeanPair, MeanParams, Phi_m_scalar, bhatia_alpha,
                    f_x_scalar, fx_mean, heinz_scalar, log_mean, phi_n_scalar)
from .norms import NormKind, SCHATTEN_EXTRAS, KyFan, Schatten
from .policy import get_policy
from .refine import E_n, F_m, block_norm_average, heinz_block, heinz_integral, one_sided_integral

X_KINDS = ("general", "hermitian", "identity", "diagonal")


# ------------------------------------------------------------------ instances

@dataclass(frozen=True)
class InstanceSpec:
    """Deterministic recipe for a triple ``(A, B, X)``.

    ``x_kind="diagonal"`` makes the whole triple diagonal (a commuting instance).
    """

    n: int
    seed: int
    cond_cap: float = 1e3
    x_kind: str = "general"

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"order must be >= 1, got {self.n}")
        if self.x_kind not in X_KINDS:
            raise ValidationError(f"x_kind must be one of {X_KINDS}, got {self.x_kind!r}")
        if not self.cond_cap >= 1:
            raise ValidationError(f"cond_cap must be >= 1, got {self.cond_cap}")

    def as_dict(self) -> dict:
        return {"n": self.n, "seed": self.seed, "cond_cap": self.cond_cap, "x_kind": self.x_kind}

    def build(self) -> "Instance":
        rng = make_rng(self.seed)
        seed_a, seed_b = (int(s) for s in rng.integers(0, 2**63 - 1, size=2))
        scale_a, scale_b = 10.0 ** rng.uniform(-1.0, 1.0, size=2)
        n = self.n
        if self.x_kind == "diagonal":
            ident = np.eye(n, dtype=np.complex128)
            A = HermitianPD.from_spectrum(scale_a * self.cond_cap ** rng.uniform(0, 1, n), ident)
            B = HermitianPD.from_spectrum(scale_b * self.cond_cap ** rng.uniform(0, 1, n), ident)
            X = np.diag(random_complex(n, rng))
            return Instance(A, B, X, self)
        A = random_pd(n, seed_a, self.cond_cap, scale=scale_a)
        B = random_pd(n, seed_b, self.cond_cap, scale=scale_b)
        if self.x_kind == "identity":
            X = np.eye(n, dtype=np.complex128)
        else:
            X = random_complex((n, n), rng)
            if self.x_kind == "hermitian":
                X = hermitian_part(X)
        return Instance(A, B, X, self)

    def param_rng(self) -> np.random.Generator:
        seq = np.random.SeedSequence([self.seed % 2**63, 0x9A7A])
        return make_rng(int(seq.generate_state(1, np.uint64)[0]))


class Instance:
    """A concrete ``(A, B, X)`` with cached derived quantities."""

    def __init__(self, A, B, X, spec: InstanceSpec | None = None):
        self.A = as_pd(A)
        self.B = as_pd(B)
        self.X = np.asarray(X, dtype=np.complex128)
        self.spec = spec
        if self.X.shape != (self.A.n, self.B.n):
            raise ValidationError(f"X must be {self.A.n}x{self.B.n}, got {self.X.shape}")

    @property
    def n(self) -> int:
        return self.A.n

    @cached_property
    def pair(self) -> MeanPair:
        return MeanPair(self.A, self.B)

    def block(self, nu: float) -> np.ndarray:
        return heinz_block(self.A, self.B, self.X, nu)

    @cached_property
    def geo(self) -> np.ndarray:
        """``A^(1/2) X B^(1/2)``."""
        return self.A.power(0.5) @ self.X @ self.B.power(0.5)

    @cached_property
    def arith(self) -> np.ndarray:
        """``(AX + XB) / 2``."""
        return 0.5 * (self.A.matrix @ self.X + self.X @ self.B.matrix)

    @cached_property
    def commutator(self) -> np.ndarray:
        """``AX - XB``."""
        return self.A.matrix @ self.X - self.X @ self.B.matrix

    def heron_block(self, alpha: float) -> np.ndarray:
        """``(1 - alpha) A^(1/2) X B^(1/2) + alpha (AX + XB)/2``."""
        return (1.0 - alpha) * self.geo + alpha * self.arith

    def heinz_difference(self, nu: float) -> np.ndarray:
        return self.A.power(nu) @ self.X @ self.B.power(1.0 - nu) - self.A.power(1.0 - nu) @ self.X @ self.B.power(nu)

    def power_commutator(self, r: float) -> np.ndarray:
        """``A^r X - X B^r``."""
        return self.A.power(r) @ self.X - self.X @ self.B.power(r)

    def opnorm_power(self, p: float) -> float:
        """``max(||A^p||, ||B^p||)`` in operator norm."""
        ea, eb = self.A.spectral.eigenvalues, self.B.spectral.eigenvalues
        return float(max(np.max(ea ** p), np.max(eb ** p)))


# --------------------------------------------------------------------- stages

@dataclass
class Stage:
    """One side of a comparison.

    Exactly one of ``terms`` (norm checks: sum of ``coef * |||M|||``), ``fn``
    (norm checks: direct per-norm values), ``matrix`` (Loewner checks) or
    ``scalar`` is set.
    """

    label: str
    terms: list | None = None
    fn: Callable | None = None
    matrix: np.ndarray | None = None
    scalar: float | None = None

    def norm_values(self, kinds: list[NormKind]) -> np.ndarray:
        if self.fn is not None:
            return np.asarray(self.fn(kinds), dtype=float)
        total = np.zeros(len(kinds))
        for coef, M in self.terms:
            s = singular_values(M)
            total += coef * np.array([k.of_singular_values(s) for k in kinds])
        return total


def M(label: str, matrix, coef: float = 1.0) -> Stage:
    return Stage(label, terms=[(coef, matrix)])


# ------------------------------------------------------------------- registry

@dataclass(frozen=True)
class Check:
    id: str
    kind: str                                    # "norm" | "loewner" | "scalar"
    anchor: str
    sample: Callable[[np.random.Generator, InstanceSpec], MeanParams]
    validate: Callable[[MeanParams], None]
    stages: Callable[[Instance | None, MeanParams], list[Stage]]
    asserted: bool = True
    expects_violation: Callable[[MeanParams], bool] = lambda p: False


def _hyp(check_id: str, cond: bool, text: str) -> None:
    if not cond:
        raise HypothesisViolation(check_id, text)


def _pick(rng, lo, hi, edges=(), p_edge=0.15):
    if edges and rng.uniform() < p_edge:
        return float(edges[int(rng.integers(len(edges)))])
    return float(rng.uniform(lo, hi))


def _nu_not_half(rng, lo=0.0, hi=1.0, edges=(0.0, 1.0, 0.25, 0.75)):
    while True:
        nu = _pick(rng, lo, hi, edges)
        if abs(nu - 0.5) > 1e-3:
            return nu


def _interval(rng, lo=0.0, hi=1.0):
    while True:
        a, b = sorted(rng.uniform(lo, hi, size=2))
        if rng.uniform() < 0.1:
            a, b = lo, hi
        if b - a > 1e-3:
            return float(a), float(b)


def _log_uniform(rng, lo, hi):
    return float(10.0 ** rng.uniform(math.log10(lo), math.log10(hi)))


REGISTRY: dict[str, Check] = {}


def register(check: Check) -> Check:
    REGISTRY[check.id] = check
    return check


# INEQ-1.2 ---------------------------------------------------------------

def in_drissi(nu: float) -> bool:
    lo, hi = DRISSI_INTERVAL
    return lo <= nu <= hi


def _ineq_1_2_sample(rng, spec):
    lo, hi = DRISSI_INTERVAL
    nu = _pick(rng, lo, hi, (lo, hi, 0.5))
    return MeanParams(nu=nu, extra={"a": _log_uniform(rng, 1e-3, 1e3), "b": _log_uniform(rng, 1e-3, 1e3)})


def _ineq_1_2_validate(p):
    _hyp("INEQ-1.2", 0.0 <= p.nu <= 1.0, "0 <= nu <= 1")
    _hyp("INEQ-1.2", p.extra.get("a", 1) > 0 and p.extra.get("b", 1) > 0, "a, b > 0")


def _ineq_1_2_stages(inst, p):
    if not in_drissi(p.nu):
        hit = scan_drissi(p.nu)
        if hit is not None:
            return [Stage("H_nu(a,b)", scalar=hit.heinz), Stage("L(a,b)", scalar=hit.log_mean)]
    a, b = p.extra.get("a", 2.0), p.extra.get("b", 1.0)
    return [Stage("H_nu(a,b)", scalar=float(heinz_scalar(a, b, p.nu))), Stage("L(a,b)", scalar=float(log_mean(a, b)))]


register(Check("INEQ-1.2", "scalar", "H_nu(a,b) <= L(a,b) iff nu in the Drissi interval",
               _ineq_1_2_sample, _ineq_1_2_validate, _ineq_1_2_stages,
               expects_violation=lambda p: not in_drissi(p.nu)))


# Heinz/Heron norm family ----------------------------------------------------

def _quarter_sample(rng, spec):
    return MeanParams(nu=_pick(rng, 0.25, 0.75, (0.25, 0.75, 0.5)), alpha=_pick(rng, 0.5, 3.0, (0.5, 1.0)))


def _quarter_validate(cid):
    def check(p):
        _hyp(cid, 0.25 <= p.nu <= 0.75, "1/4 <= nu <= 3/4")
        _hyp(cid, p.alpha >= 0.5, "alpha >= 1/2")
    return check


register(Check(
    "INEQ-1.3", "norm", "g(nu) <= f(alpha)", _quarter_sample, _quarter_validate("INEQ-1.3"),
    lambda I, p: [M("g(nu)", I.block(p.nu), 0.5), M("f(alpha)", I.heron_block(p.alpha))]))


def _ineq_1_4_sample(rng, spec):
    return MeanParams(extra={"t": _pick(rng, -1.95, 2.0, (2.0, 0.0, -1.0))})


def _ineq_1_4_validate(p):
    t = p.extra.get("t")
    _hyp("INEQ-1.4", t is not None and -2.0 < t <= 2.0, "-2 < t <= 2")


register(Check(
    "INEQ-1.4", "norm", "g(1/2) <= g(2/3) <= |||AX + XB + t A^1/2 X B^1/2||| / (2 + t)",
    _ineq_1_4_sample, _ineq_1_4_validate,
    lambda I, p: [M("g(1/2)", I.geo), M("g(2/3)", I.block(2.0 / 3.0), 0.5),
                  M("(AX+XB+tA^1/2XB^1/2)/(2+t)", 2.0 * I.arith + p.extra["t"] * I.geo, 1.0 / (2.0 + p.extra["t"]))]))

register(Check(
    "CHAIN-1.5", "norm", "g(1/2) <= g(nu) <= f(alpha)", _quarter_sample, _quarter_validate("CHAIN-1.5"),
    lambda I, p: [M("g(1/2)", I.geo), M("g(nu)", I.block(p.nu), 0.5), M("f(alpha)", I.heron_block(p.alpha))]))


def _ineq_1_7_stages(I, p):
    r0 = p.r0
    rhs = Stage("(4r0-1)g(1/2)+2(1-2r0)f(alpha)",
                terms=[(4.0 * r0 - 1.0, I.geo), (2.0 * (1.0 - 2.0 * r0), I.heron_block(p.alpha))])
    return [M("g(nu)", I.block(p.nu), 0.5), rhs]


register(Check("INEQ-1.7", "norm", "g(nu) <= (4r0-1) g(1/2) + 2(1-2r0) f(alpha)",
               _quarter_sample, _quarter_validate("INEQ-1.7"), _ineq_1_7_stages))


def _chain_1_8_sample(rng, spec):
    return MeanParams(nu=_nu_not_half(rng))


def _chain_1_8_validate(p):
    _hyp("CHAIN-1.8", 0.0 <= p.nu <= 1.0, "0 <= nu <= 1")
    _hyp("CHAIN-1.8", p.nu != 0.5, "nu != 1/2 (middle term is 0/0)")


def _chain_1_8_stages(I, p):
    avg = Stage("avg |||block(t)||| on [nu,1-nu]", fn=lambda kinds: _block_avg(I, p.nu, kinds))
    return [M("2 g(1/2)", I.geo, 2.0), avg, M("|||block(nu)|||", I.block(p.nu))]


def _block_avg(I, nu, kinds):
    vals, _ = block_norm_average(I.A, I.B, I.X, nu, kinds)
    return vals


register(Check("CHAIN-1.8", "norm", "2|||A^1/2XB^1/2||| <= avg of |||block(t)||| <= |||block(nu)|||",
               _chain_1_8_sample, _chain_1_8_validate, _chain_1_8_stages))


def _ab_sample(rng, spec):
    a, b = _interval(rng)
    return MeanParams(alpha=a, beta=b)


def _ab_validate(cid):
    def check(p):
        _hyp(cid, p.alpha < p.beta, "alpha < beta")
    return check


register(Check(
    "CHAIN-1.9", "norm", "|||block(mid)||| <= |||int block|||/(beta-alpha) <= endpoint average",
    _ab_sample, _ab_validate("CHAIN-1.9"),
    lambda I, p: [M("block((a+b)/2)", I.block(0.5 * (p.alpha + p.beta))),
                  M("int/(b-a)", heinz_integral(I.A, I.B, I.X, p.alpha, p.beta), 1.0 / (p.beta - p.alpha)),
                  M("(block(a)+block(b))/2", I.block(p.alpha) + I.block(p.beta), 0.5)]))


# difference versions ---------------------------------------------------------

def _ineq_2_0_0_validate(p):
    _hyp("INEQ-2.0.0", 0.0 <= p.nu <= 1.0, "0 <= nu <= 1")


register(Check(
    "INEQ-2.0.0", "norm", "|||A^nu X B^(1-nu) - A^(1-nu) X B^nu||| <= |2nu-1| |||AX-XB|||",
    lambda rng, spec: MeanParams(nu=_pick(rng, 0.0, 1.0, (0.0, 0.5, 1.0))), _ineq_2_0_0_validate,
    lambda I, p: [M("heinz difference", I.heinz_difference(p.nu)),
                  M("|2nu-1| (AX-XB)", I.commutator, abs(2.0 * p.nu - 1.0))]))


def _ineq_2_0_validate(p):
    r = p.extra.get("r")
    _hyp("INEQ-2.0", r is not None and 0.0 < r <= 1.0, "0 < r <= 1")


register(Check(
    "INEQ-2.0", "norm", "|||A^r X - X B^r||| <= r max(||A^(r-1)||, ||B^(r-1)||) |||AX-XB|||",
    lambda rng, spec: MeanParams(extra={"r": _pick(rng, 0.01, 1.0, (1.0, 0.5))}), _ineq_2_0_validate,
    lambda I, p: [M("A^rX-XB^r", I.power_commutator(p.extra["r"])),
                  M("r max||.^(r-1)|| (AX-XB)", I.commutator,
                    p.extra["r"] * I.opnorm_power(p.extra["r"] - 1.0))]))


def _ineq_2_1_sample(rng, spec):
    alpha = _pick(rng, 1.0, 3.0, (1.0,))
    lo, hi = (1.0 - alpha) / 2.0, (1.0 + alpha) / 2.0
    return MeanParams(nu=_pick(rng, lo, hi, (lo, hi, 0.5)), alpha=alpha)


def _ineq_2_1_validate(p):
    _hyp("INEQ-2.1", p.alpha >= 1.0, "alpha >= 1")
    _hyp("INEQ-2.1", (1.0 - p.alpha) / 2.0 <= p.nu <= (1.0 + p.alpha) / 2.0, "(1-alpha)/2 <= nu <= (1+alpha)/2")


register(Check(
    "INEQ-2.1", "norm",
    "alpha |||A^nu X B^(1-nu) - A^(1-nu) X B^nu||| <= |2nu-1| max(||A^(1-alpha)||, ||B^(1-alpha)||) |||A^alpha X - X B^alpha|||",
    _ineq_2_1_sample, _ineq_2_1_validate,
    lambda I, p: [M("alpha * heinz difference", I.heinz_difference(p.nu), p.alpha),
                  M("|2nu-1| max||.^(1-alpha)|| (A^aX-XB^a)", I.power_commutator(p.alpha),
                    abs(2.0 * p.nu - 1.0) * I.opnorm_power(1.0 - p.alpha))]))


_F_CHOICES = ("power:0.1", "power:0.5", "power:0.9", "log", "identity")


def _ineq_2_2_sample(rng, spec):
    k = int(rng.integers(len(_F_CHOICES) + 1))
    f = _F_CHOICES[k] if k < len(_F_CHOICES) else f"power:{rng.uniform(0.01, 1.0):.6f}"
    return MeanParams(extra={"f": f})


def _ineq_2_2_validate(p):
    try:
        parse_monotone(str(p.extra.get("f")))
    except ValidationError as exc:
        raise HypothesisViolation("INEQ-2.2", f"f operator monotone on (0, inf): {exc}") from None


def _ineq_2_2_stages(I, p):
    f = parse_monotone(p.extra["f"])
    lhs = apply_spectral(f, I.A) @ I.X - I.X @ apply_spectral(f, I.B)
    k = max(fprime_opnorm(f, I.A), fprime_opnorm(f, I.B))
    stages = [M("f(A)X-Xf(B)", lhs), M("max||f'|| (AX-XB)", I.commutator, k)]
    inv = max(1.0 / I.A.min_eig, 1.0 / I.B.min_eig)  # max(||A^-1||, ||B^-1||)
    if f.tag == "power":
        stages.append(M("r max||.^-1||^(1-r) (AX-XB)", I.commutator, f.r * inv ** (1.0 - f.r)))
    elif f.tag == "log":
        stages.append(M("max||.^-1|| (AX-XB)", I.commutator, inv))
    return stages


register(Check("INEQ-2.2", "norm", "|||f(A)X - Xf(B)||| <= max(||f'(A)||, ||f'(B)||) |||AX-XB|||",
               _ineq_2_2_sample, _ineq_2_2_validate, _ineq_2_2_stages))


def _ineq_2_2_0_validate(p):
    _hyp("INEQ-2.2.0", p.alpha >= 1.0, "alpha >= 1")


register(Check(
    "INEQ-2.2.0", "norm", "|||AX-XB||| <= (1/alpha) max(||A^(1-alpha)||, ||B^(1-alpha)||) |||A^alpha X - X B^alpha|||",
    lambda rng, spec: MeanParams(alpha=_pick(rng, 1.0, 3.0, (1.0,))), _ineq_2_2_0_validate,
    lambda I, p: [M("AX-XB", I.commutator),
                  M("(1/alpha) max||.^(1-alpha)|| (A^aX-XB^a)", I.power_commutator(p.alpha),
                    I.opnorm_power(1.0 - p.alpha) / p.alpha)]))


# Hermite-Hadamard ladder -------------------------------------------------------

def _chain_2_2_1_sample(rng, spec):
    a, b = _interval(rng)
    return MeanParams(alpha=a, beta=b, n=int(rng.integers(1, 7)), m=int(rng.integers(1, 7)))


def _chain_2_2_1_stages(I, p):
    a, b = p.alpha, p.beta
    out = [M(f"E_{k}", E_n(I.A, I.B, I.X, a, b, k)) for k in range(1, p.n + 1)]
    out.append(M("int/(b-a)", heinz_integral(I.A, I.B, I.X, a, b), 1.0 / (b - a)))
    out += [M(f"F_{k}", F_m(I.A, I.B, I.X, a, b, k)) for k in range(p.m, 0, -1)]
    return out


register(Check("CHAIN-2.2.1", "norm", "|||E_1||| <= ... <= |||E_n||| <= |||int|||/(b-a) <= |||F_m||| <= ... <= |||F_1|||",
               _chain_2_2_1_sample, _ab_validate("CHAIN-2.2.1"), _chain_2_2_1_stages))

register(Check(
    "CHAIN-2.10", "norm", "g(nu) <= |||int_0^1 A^t X B^(1-t) dt||| <= f(alpha)",
    _quarter_sample, _quarter_validate("CHAIN-2.10"),
    lambda I, p: [M("g(nu)", I.block(p.nu), 0.5), M("int_0^1 A^tXB^(1-t)", one_sided_integral(I.A, I.B, I.X)),
                  M("f(alpha)", I.heron_block(p.alpha))]))


# operator (Loewner) checks -----------------------------------------------------

def _nu_unit_validate(cid):
    def check(p):
        _hyp(cid, 0.0 <= p.nu <= 1.0, "0 <= nu <= 1")
    return check


def _nu_unit_sample(rng, spec):
    return MeanParams(nu=_pick(rng, 0.0, 1.0, (0.0, 0.5, 1.0)))


register(Check(
    "CHAIN-3.1", "loewner", "A#B <= H_nu(A,B) <= A nabla B", _nu_unit_sample, _nu_unit_validate("CHAIN-3.1"),
    lambda I, p: [Stage("A#B", matrix=I.pair.sharp(0.5)), Stage("H_nu", matrix=I.pair.heinz(p.nu)),
                  Stage("A nabla B", matrix=I.pair.nabla(0.5))]))

register(Check(
    "INEQ-ZHAO", "loewner", "H_nu(A,B) <= K_alpha(nu)(A,B)", _nu_unit_sample, _nu_unit_validate("INEQ-ZHAO"),
    lambda I, p: [Stage("H_nu", matrix=I.pair.heinz(p.nu)),
                  Stage("K_alpha(nu)", matrix=I.pair.heron(bhatia_alpha(p.nu)))]))


def _ladder_sample(rng, spec, *, x=False, m_min=2, interior=False):
    extra = {"x": _log_uniform(rng, 1e-3, 1e3)} if x else {}
    nu = _nu_not_half(rng, 1e-3, 1.0 - 1e-3, (0.25, 0.75)) if interior else _nu_not_half(rng)
    return MeanParams(nu=nu, n=int(rng.integers(1, 7)), m=int(rng.integers(m_min, 7)), extra=extra)


def _ladder_validate(cid, *, need_r0=False, m_min=2, x=False):
    def check(p):
        _hyp(cid, 0.0 <= p.nu <= 1.0 and p.nu != 0.5, "nu in [0,1] minus {1/2}")
        if need_r0:
            _hyp(cid, p.r0 > 0.0, "r0 = min(nu, 1-nu) > 0 (1/(2 r0) must be finite)")
        if m_min > 1:
            _hyp(cid, p.m >= m_min, f"m >= {m_min} (Phi_m <= Phi_2 needs m >= 2)")
        if x:
            _hyp(cid, p.extra.get("x", 0) > 0, "x > 0")
    return check


def _chain_3_12_stages(I, p):
    P, nu = I.pair, p.nu
    q = (2.0 * nu + 1.0) / 4.0
    return [
        Stage("A#B", matrix=P.sharp(0.5)),
        Stage("H_(2nu+1)/4 = phi_1", matrix=P.heinz(q)),
        Stage(f"phi_{p.n}(nu,1/2)", matrix=P.phi(nu, 0.5, p.n)),
        Stage("A^1/2 F_nu(C) A^1/2/(2nu-1)", matrix=P.F(nu) / (2.0 * nu - 1.0)),
        Stage(f"Phi_{p.m}(nu,1/2)", matrix=P.Phi(nu, 0.5, p.m)),
        Stage("H_nu/4+H_(2nu+1)/4/2+A#B/4", matrix=0.25 * P.heinz(nu) + 0.5 * P.heinz(q) + 0.25 * P.sharp(0.5)),
        Stage("H_nu/2+A#B/2", matrix=0.5 * P.heinz(nu) + 0.5 * P.sharp(0.5)),
        Stage("H_nu", matrix=P.heinz(nu)),
    ]


register(Check("CHAIN-3.12", "loewner", "refined A#B <= ... <= H_nu ladder through phi_n(nu,1/2), F_nu, Phi_m(nu,1/2)",
               _ladder_sample, _ladder_validate("CHAIN-3.12"), _chain_3_12_stages))


def _chain_3_2_variant_stages(I, p):
    P, nu = I.pair, p.nu
    q = (2.0 * nu + 1.0) / 4.0
    return [
        Stage("A#B", matrix=P.sharp(0.5)),
        Stage("H_(2nu+1)/4", matrix=P.heinz(q)),
        Stage("A^1/2 F_nu(C) A^1/2/(2nu-1)", matrix=P.F(nu) / (2.0 * nu - 1.0)),
        Stage("H_nu/4+H_(2nu+1)/4/2+A nabla B/4", matrix=0.25 * P.heinz(nu) + 0.5 * P.heinz(q) + 0.25 * P.nabla(0.5)),
        Stage("H_nu/2+A#B/2", matrix=0.5 * P.heinz(nu) + 0.5 * P.sharp(0.5)),
        Stage("H_nu", matrix=P.heinz(nu)),
    ]


register(Check("CHAIN-3.2V", "loewner", "refined Heinz chain with A nabla B in the quarter-weight term (evaluated, not asserted)",
               lambda rng, spec: _ladder_sample(rng, spec, m_min=1), _ladder_validate("CHAIN-3.2V", m_min=1),
               _chain_3_2_variant_stages, asserted=False))


def _chain_3_14_stages(I, p):
    P, nu, r0 = I.pair, p.nu, p.r0
    return [
        Stage("H_nu", matrix=P.heinz(nu)),
        Stage("H_r0/2", matrix=P.heinz(r0 / 2.0)),
        Stage(f"phi_{p.n}(0,r0)", matrix=P.phi(0.0, r0, p.n)),
        Stage("A^1/2[F_1+F_r0](C)A^1/2/(2r0)", matrix=(P.F(1.0) + P.F(r0)) / (2.0 * r0)),
        Stage(f"Phi_{p.m}(0,r0)", matrix=P.Phi(0.0, r0, p.m)),
        Stage("H_nu/4+H_r0/2/2+A nabla B/4", matrix=0.25 * P.heinz(nu) + 0.5 * P.heinz(r0 / 2.0) + 0.25 * P.nabla(0.5)),
        Stage("H_nu/2+A nabla B/2", matrix=0.5 * P.heinz(nu) + 0.5 * P.nabla(0.5)),
        Stage("A nabla B", matrix=P.nabla(0.5)),
    ]


register(Check("CHAIN-3.14", "loewner", "refined H_nu <= ... <= A nabla B ladder on [0, r0]",
               lambda rng, spec: _ladder_sample(rng, spec, interior=True),
               _ladder_validate("CHAIN-3.14", need_r0=True), _chain_3_14_stages))


# scalar ladders -----------------------------------------------------------------

def _scalar_ladder_stages(x: float, a: float, b: float, n: int, m: int, *, full: bool) -> list[Stage]:
    f = lambda t: float(f_x_scalar(x, t))  # noqa: E731
    integral = float(fx_mean(x, a, b))
    if full:
        out = [Stage(f"phi_{k}", scalar=float(phi_n_scalar(f, a, b, k))) for k in range(1, n + 1)]
        out.append(Stage("mean integral", scalar=integral))
        out += [Stage(f"Phi_{k}", scalar=float(Phi_m_scalar(f, a, b, k))) for k in range(m, 0, -1)]
        return out
    return [
        Stage("f(mid)", scalar=f(0.5 * (a + b))),
        Stage(f"phi_{n}", scalar=float(phi_n_scalar(f, a, b, n))),
        Stage("mean integral", scalar=integral),
        Stage(f"Phi_{m}", scalar=float(Phi_m_scalar(f, a, b, m))),
        Stage("(f(a)+f(b))/2", scalar=0.5 * (f(a) + f(b))),
    ]


def _chain_3_7_sample(rng, spec):
    a, b = _interval(rng)
    return MeanParams(alpha=a, beta=b, n=int(rng.integers(1, 9)), m=int(rng.integers(1, 9)),
                      extra={"x": _log_uniform(rng, 1e-3, 1e3)})


def _chain_3_7_validate(p):
    _hyp("CHAIN-3.7", p.alpha < p.beta, "alpha < beta")
    _hyp("CHAIN-3.7", p.extra.get("x", 0) > 0, "x > 0")


register(Check("CHAIN-3.7", "scalar", "f(mid) <= phi_1 <= ... <= phi_n <= mean integral <= Phi_m <= ... <= Phi_1",
               _chain_3_7_sample, _chain_3_7_validate,
               lambda I, p: _scalar_ladder_stages(p.extra["x"], p.alpha, p.beta, p.n, p.m, full=True)))

register(Check("CHAIN-3.13", "scalar", "scalar ladder for f_x on [nu, 1/2]",
               lambda rng, spec: _ladder_sample(rng, spec, x=True, m_min=1),
               _ladder_validate("CHAIN-3.13", m_min=1, x=True),
               lambda I, p: _scalar_ladder_stages(p.extra["x"], p.nu, 0.5, p.n, p.m, full=False)))

register(Check("CHAIN-3.15", "scalar", "scalar ladder for f_x on [0, r0]",
               lambda rng, spec: _ladder_sample(rng, spec, x=True, m_min=1, interior=True),
               _ladder_validate("CHAIN-3.15", need_r0=True, m_min=1, x=True),
               lambda I, p: _scalar_ladder_stages(p.extra["x"], 0.0, p.r0, p.n, p.m, full=False)))

ASSERTED_IDS = tuple(cid for cid, c in REGISTRY.items() if c.asserted)


# -------------------------------------------------------------------- reports

@dataclass
class InequalityReport:
    id: str
    stage: str
    params: dict
    norm: str
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tol_used: float
    instance: dict
    expect: str = "hold"   # "hold" | "violation" | "unasserted"

    @staticmethod
    def decide(lhs: float, rhs: float, tol: float) -> bool:
        return (rhs - lhs) >= -tol * max(1.0, abs(rhs))

    @property
    def ok(self) -> bool:
        """Whether the outcome matches expectations (drives the exit status)."""
        if self.expect == "violation":
            return not self.passed
        return self.passed or self.expect == "unasserted"

    def as_dict(self) -> dict:
        return {"id": self.id, "stage": self.stage, "params": self.params, "norm": self.norm,
                "lhs": self.lhs, "rhs": self.rhs, "margin": self.margin, "pass": self.passed,
                "tol_used": self.tol_used, "instance": self.instance, "expect": self.expect}

    @classmethod
    def from_dict(cls, d: dict) -> "InequalityReport":
        return cls(id=d["id"], stage=d["stage"], params=dict(d["params"]), norm=d["norm"],
                   lhs=float(d["lhs"]), rhs=float(d["rhs"]), margin=float(d["margin"]),
                   passed=bool(d["pass"]), tol_used=float(d["tol_used"]), instance=dict(d["instance"]),
                   expect=d.get("expect", "hold"))


@dataclass
class ChainReport:
    id: str
    params: dict
    instance: dict
    kind: str
    stages: list            # [(label, {column: value})]
    reports: list = field(default_factory=list)
    monotone: bool = True
    worst_violation: float = 0.0

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)


def loewner_leq(P, Q, tol: float | None = None) -> tuple[bool, float]:
    """``P <= Q`` in the Loewner order: ``lambda_min(Q - P) >= -tol * max(1, ||Q||_op)``."""
    tol = get_policy().inequality if tol is None else tol
    P, Q = np.asarray(P, dtype=np.complex128), np.asarray(Q, dtype=np.complex128)
    if P.shape != Q.shape:
        raise ValidationError(f"dimension mismatch: {P.shape} vs {Q.shape}")
    margin = float(hermitian_eig(hermitian_part(Q - P)).eigenvalues[0])
    qnorm = float(np.max(np.abs(hermitian_eig(hermitian_part(Q)).eigenvalues)))
    return margin >= -tol * max(1.0, qnorm), margin


def resolve_kinds(n: int, norms: Iterable[NormKind] | None) -> list[NormKind]:
    kinds = [KyFan(k) for k in range(1, n + 1)]
    extra = list(norms) if norms else [Schatten(p) for p in SCHATTEN_EXTRAS]
    for k in extra:
        if k.family == "kyfan" and k.param is not None and k.param > n:
            continue
        if k not in kinds:
            kinds.append(k)
    return kinds


def get_check(check_id: str) -> Check:
    try:
        return REGISTRY[check_id]
    except KeyError:
        raise ValidationError(f"unknown check id {check_id!r}; known: {', '.join(REGISTRY)}") from None


def sample_params(check_id: str, spec: InstanceSpec) -> MeanParams:
    return get_check(check_id).sample(spec.param_rng(), spec)


def run_check(check_id: str, instance, params: MeanParams | dict | None = None,
              norms: Iterable[NormKind] | None = None, tol: float | None = None) -> ChainReport:
    """Evaluate every stage of a registered check and compare adjacent stages.

    ``params`` may be a dict of overrides; missing values are sampled from the instance seed.
    """
    check = get_check(check_id)
    tol = get_policy().inequality if tol is None else tol
    if isinstance(instance, InstanceSpec):
        spec = instance
        inst = spec.build() if check.kind != "scalar" else None
    else:
        inst, spec = instance, getattr(instance, "spec", None)
    overrides = params if isinstance(params, dict) else None
    if params is None or overrides is not None:
        if spec is None:
            raise ValidationError("params are required when the instance has no InstanceSpec")
        params = check.sample(spec.param_rng(), spec)
        if overrides:
            params = apply_overrides(params, overrides)
    expect = "hold"
    if not check.asserted:
        expect = "unasserted"
    elif check.expects_violation(params):
        expect = "violation"
    else:
        check.validate(params)

    stages = check.stages(inst, params)
    inst_dict = spec.as_dict() if spec is not None else {}
    pdict = params.as_dict()
    reports: list[InequalityReport] = []
    table: list = []

    def add(stage, norm, lhs, rhs):
        lhs, rhs = float(lhs), float(rhs)
        reports.append(InequalityReport(check_id, stage, pdict, norm, lhs, rhs, rhs - lhs,
                                        InequalityReport.decide(lhs, rhs, tol), tol, inst_dict, expect))

    if check.kind == "norm":
        kinds = resolve_kinds(inst.n, norms)
        labels = [k.label for k in kinds]
        values = [st.norm_values(kinds) for st in stages]
        table = [(st.label, dict(zip(labels, v.tolist()))) for st, v in zip(stages, values)]
        for i in range(len(stages) - 1):
            pair = f"{stages[i].label} <= {stages[i + 1].label}"
            for j, lab in enumerate(labels):
                add(pair, lab, values[i][j], values[i + 1][j])
    elif check.kind == "loewner":
        for st in stages:
            w = hermitian_eig(hermitian_part(st.matrix)).eigenvalues
            table.append((st.label, {"trace": float(np.sum(w)), "min_eig": float(w[0]), "max_eig": float(w[-1])}))
        for i in range(len(stages) - 1):
            _, margin = loewner_leq(stages[i].matrix, stages[i + 1].matrix, tol)
            qnorm = max(abs(table[i + 1][1]["min_eig"]), abs(table[i + 1][1]["max_eig"]))
            # lhs/rhs chosen so that rhs - lhs is the min-eigenvalue margin and |rhs| the anchor
            add(f"{stages[i].label} <= {stages[i + 1].label}", "loewner", qnorm - margin, qnorm)
    else:
        table = [(st.label, {"value": st.scalar}) for st in stages]
        for i in range(len(stages) - 1):
            add(f"{stages[i].label} <= {stages[i + 1].label}", "scalar", stages[i].scalar, stages[i + 1].scalar)

    worst = 0.0
    for r in reports:
        worst = max(worst, -r.margin / max(1.0, abs(r.rhs)))
    return ChainReport(check_id, pdict, inst_dict, check.kind, table, reports,
                       monotone=all(r.passed for r in reports), worst_violation=worst)


# ------------------------------------------------------------------ Drissi scan

@dataclass(frozen=True)
class DrissiHit:
    nu: float
    a: float
    b: float
    heinz: float
    log_mean: float

    @property
    def margin(self) -> float:
        return self.log_mean - self.heinz


def drissi_grid(kmin: int = -20, kmax: int = 20) -> np.ndarray:
    return 2.0 ** np.arange(kmin, kmax + 1, dtype=float)


def scan_drissi(nu: float, grid=None, tol: float = 1e-12) -> DrissiHit | None:
    """First ratio ``a/b`` on the grid (with ``b = 1``) where ``H_nu(a,b) > L(a,b)`` beyond rounding.

    Both means are homogeneous of degree one, so the ratio is the only free variable.
    """
    g = drissi_grid() if grid is None else np.asarray(list(grid), dtype=float)
    if g.size == 0:
        raise ValidationError("grid must not be empty")
    if np.any(g <= 0):
        raise ValidationError("grid values must be positive")
    for a in g:
        h = float(heinz_scalar(a, 1.0, nu))
        lm = float(log_mean(a, 1.0))
        if h - lm > tol * max(1.0, abs(lm)):
            return DrissiHit(nu, float(a), 1.0, h, lm)
    return None


# -------------------------------------------------------------------- runner

def derive_seed(base_seed: int, check_id: str, order: int, index: int) -> int:
    seq = np.random.SeedSequence([base_seed % 2**63, zlib.crc32(check_id.encode()), order, index])
    return int(seq.generate_state(1, np.uint64)[0] >> np.uint64(1))


def x_kind_for(index: int) -> str:
    return {0: "hermitian", 1: "identity", 2: "diagonal"}.get(index % 10, "general")


def iter_instances(check_ids, orders, instances: int, seed: int, cond_cap: float) -> Iterator[tuple[str, InstanceSpec]]:
    for cid in check_ids:
        for order in orders:
            for idx in range(instances):
                yield cid, InstanceSpec(order, derive_seed(seed, cid, order, idx), cond_cap, x_kind_for(idx))


def _evaluate(job) -> ChainReport:
    cid, spec, norms, tol, overrides = job
    params = sample_params(cid, spec)
    if overrides:
        params = apply_overrides(params, overrides)
    try:
        return run_check(cid, spec, params, norms, tol)
    except HypothesisViolation:
        raise
    except ArithmeticError as exc:
        raise NumericalError(f"{cid}: numerical failure on instance {spec.as_dict()}: {exc}", seed=spec.seed) from exc


def run_suite(check_ids, orders, instances: int, seed: int, cond_cap: float = 1e4,
              norms=None, tol: float | None = None, overrides: dict | None = None,
              jobs: int = 1) -> Iterator[ChainReport]:
    """Yield chain reports in deterministic (id, order, index) order.

    ``overrides`` forces parameter values (e.g. ``{"nu": 0.21}``) on top of sampled ones.
    With ``jobs > 1`` instances are evaluated in worker processes; order is unchanged.
    """
    norms = list(norms) if norms else None
    jobs_iter = ((cid, spec, norms, tol, overrides)
                 for cid, spec in iter_instances(check_ids, orders, instances, seed, cond_cap))
    if jobs <= 1:
        yield from map(_evaluate, jobs_iter)
        return
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_evaluate, jobs_iter, chunksize=8)


_CORE = ("nu", "alpha", "beta", "n", "m")


def apply_overrides(params: MeanParams, overrides: dict) -> MeanParams:
    core = {k: getattr(params, k) for k in _CORE}
    extra = dict(params.extra)
    for k, v in overrides.items():
        if k in _CORE:
            core[k] = int(v) if k in ("n", "m") else float(v)
        else:
            extra[k] = v
    return MeanParams(**core, extra=extra)


def reports_to_jsonl(reports: Iterable[InequalityReport]) -> str:
    return "".join(json.dumps(r.as_dict(), sort_keys=False) + "\n" for r in reports)


__all__ = [
    "ASSERTED_IDS", "REGISTRY", "Check", "ChainReport", "DrissiHit", "Instance", "InstanceSpec",
    "InequalityReport", "Stage", "apply_overrides", "drissi_grid", "get_check", "in_drissi",
    "iter_instances", "loewner_leq", "resolve_kinds", "run_check", "run_suite", "sample_params", "scan_drissi",
]
