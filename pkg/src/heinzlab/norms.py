"""Unitarily invariant norms (Ky Fan and Schatten families) and Fan dominance."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import as_matrix, singular_values

SCHATTEN_EXTRAS = (1.0, 1.5, 2.0, 3.0, math.inf)


@dataclass(frozen=True)
class NormKind:
    """``family`` is ``"kyfan"`` or ``"schatten"``; named aliases resolve to these.

    ``KyFan(k)`` with ``k=None`` means "k = order of the matrix" (the trace norm).
    """

    family: str
    param: float | int | None = None
    alias: str | None = None

    def __post_init__(self):
        if self.family == "kyfan":
            if self.param is not None and (int(self.param) != self.param or self.param < 1):
                raise ValidationError(f"Ky Fan index must be a positive integer, got {self.param}")
        elif self.family == "schatten":
            if self.param is None or not self.param >= 1:
                raise ValidationError(f"Schatten p must be in [1, inf], got {self.param}")
        else:
            raise ValidationError(f"unknown norm family {self.family!r}")

    @property
    def label(self) -> str:
        if self.alias:
            return self.alias
        if self.family == "kyfan":
            return f"kyfan:{self.param if self.param is not None else 'n'}"
        p = self.param
        return "schatten:inf" if math.isinf(p) else f"schatten:{p:g}"

    def __str__(self) -> str:
        return self.label

    def of_singular_values(self, s: np.ndarray) -> float:
        s = np.asarray(s, dtype=float)
        if self.family == "kyfan":
            k = len(s) if self.param is None else int(self.param)
            if k > len(s):
                raise ValidationError(f"Ky Fan index {k} exceeds order {len(s)}")
            return float(np.sum(s[:k]))
        p = float(self.param)
        if math.isinf(p):
            return float(s[0]) if len(s) else 0.0
        top = float(s[0]) if len(s) else 0.0
        if top == 0.0:
            return 0.0
        # scale first so s**p cannot overflow
        return top * float(np.sum((s / top) ** p)) ** (1.0 / p)


def KyFan(k: int) -> NormKind:
    return NormKind("kyfan", int(k))


def Schatten(p: float) -> NormKind:
    return NormKind("schatten", float(p))


TRACE = NormKind("kyfan", None, alias="trace")
HILBERT_SCHMIDT = NormKind("schatten", 2.0, alias="hs")
OPERATOR = NormKind("schatten", math.inf, alias="op")

_ALIASES = {
    "trace": TRACE, "nuclear": TRACE,
    "hs": HILBERT_SCHMIDT, "hilbert-schmidt": HILBERT_SCHMIDT, "frobenius": HILBERT_SCHMIDT,
    "op": OPERATOR, "operator": OPERATOR, "spectral": OPERATOR,
}


def parse_norm(text: str) -> NormKind:
    """Parse ``trace``, ``hs``, ``op``, ``kyfan:K`` or ``schatten:P`` (``P`` may be ``inf``)."""
    t = text.strip().lower()
    if t in _ALIASES:
        return _ALIASES[t]
    family, _, arg = t.partition(":")
    try:
        if family == "kyfan":
            return KyFan(int(arg))
        if family == "schatten":
            return Schatten(math.inf if arg in ("inf", "infinity") else float(arg))
    except ValueError as exc:
        raise ValidationError(f"cannot parse norm {text!r}: {exc}") from None
    raise ValidationError(f"unknown norm {text!r}")


def norm(M, kind: NormKind) -> float:
    return kind.of_singular_values(singular_values(M))


def ky_fan_profile(s: np.ndarray) -> np.ndarray:
    """All Ky Fan norms k = 1..n from descending singular values."""
    return np.cumsum(np.asarray(s, dtype=float))


def norm_sweep(n: int, extra=()) -> list[NormKind]:
    """Every Ky Fan k-norm for order n, then the Schatten diagnostics and any extras."""
    kinds = [KyFan(k) for k in range(1, n + 1)]
    kinds += [Schatten(p) for p in SCHATTEN_EXTRAS]
    for kind in extra:
        if kind not in kinds:
            kinds.append(kind)
    return kinds


@dataclass(frozen=True)
class FanResult:
    dominated: bool
    margins: np.ndarray  # KyFan_k(Y) - KyFan_k(X), k = 1..n

    def __bool__(self) -> bool:
        return self.dominated


def fan_dominates(X, Y, tol: float = 1e-9) -> FanResult:
    """Whether ``|||X||| <= |||Y|||`` for every unitarily invariant norm, via all Ky Fan norms."""
    X, Y = as_matrix(X, "X"), as_matrix(Y, "Y")
    if X.shape != Y.shape:
        raise ValidationError(f"dimension mismatch: {X.shape} vs {Y.shape}")
    kx = ky_fan_profile(singular_values(X))
    ky = ky_fan_profile(singular_values(Y))
    margins = ky - kx
    ok = bool(np.all(margins >= -tol * np.maximum(1.0, ky)))
    return FanResult(ok, margins)
