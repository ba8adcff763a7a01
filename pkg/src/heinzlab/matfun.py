"""Spectral functional calculus and first divided differences."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ValidationError
from .linalg import HermitianPD, as_matrix, as_pd
from .policy import get_policy


@dataclass(frozen=True)
class MonotoneFn:
    """An operator monotone function on (0, inf) with its derivative.

    Only three shapes are supported (powers ``t**r`` with ``0 < r <= 1``, ``log``
    and the identity), so the derivative is always exact.
    """

    tag: str
    r: float = 1.0

    def __post_init__(self):
        if self.tag not in ("power", "log", "identity"):
            raise ValidationError(f"unknown monotone function {self.tag!r}")
        if self.tag == "power" and not 0.0 < self.r <= 1.0:
            raise ValidationError(f"power exponent must be in (0, 1], got {self.r}")

    @property
    def name(self) -> str:
        if self.tag == "power":
            return f"power:{self.r:g}"
        return self.tag

    def _check(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise DomainError(f"{self.name} is only defined on (0, inf)")
        return t

    def eval(self, t):
        t = self._check(t)
        if self.tag == "power":
            return t ** self.r
        if self.tag == "log":
            return np.log(t)
        return t.copy()

    def deriv(self, t):
        t = self._check(t)
        if self.tag == "power":
            return self.r * t ** (self.r - 1.0)
        if self.tag == "log":
            return 1.0 / t
        return np.ones_like(t)


def Power(r: float) -> MonotoneFn:
    return MonotoneFn("power", float(r))


LOG = MonotoneFn("log")
IDENTITY = MonotoneFn("identity", 1.0)


def parse_monotone(text: str) -> MonotoneFn:
    t = text.strip().lower()
    if t in ("log", "identity"):
        return LOG if t == "log" else IDENTITY
    head, _, arg = t.partition(":")
    if head == "power" and arg:
        return Power(float(arg))
    raise ValidationError(f"unknown monotone function {text!r}")


def apply_spectral(f: Callable | MonotoneFn, A) -> np.ndarray:
    """``U f(Lambda) U^*`` for Hermitian ``A``."""
    sd = as_pd(A).spectral
    fn = f.eval if isinstance(f, MonotoneFn) else f
    with np.errstate(all="ignore"):
        vals = np.asarray(fn(sd.eigenvalues), dtype=float)
    if vals.shape != sd.eigenvalues.shape or not np.all(np.isfinite(vals)):
        raise DomainError("function is not finite on the spectrum")
    return sd.apply(vals)


def frac_power(A, nu: float) -> HermitianPD:
    P = as_pd(A)
    sd = P.spectral
    return HermitianPD.from_spectrum(sd.eigenvalues ** float(nu), sd.vectors)


def divided_difference_matrix(f: MonotoneFn, eigs) -> np.ndarray:
    """First divided differences ``f[l_i, l_j]`` with ``f'(l_i)`` on the diagonal.

    Nearly equal eigenvalues use ``f'`` at their midpoint to avoid cancellation.
    """
    lam = np.asarray(eigs, dtype=float).ravel()
    if np.any(lam <= 0):
        raise DomainError("divided differences need positive eigenvalues")
    thr = get_policy().divided_difference
    li, lj = np.meshgrid(lam, lam, indexing="ij")
    diff = li - lj
    close = np.abs(diff) <= thr * np.maximum(1.0, np.abs(li))
    fl = f.eval(lam)
    with np.errstate(divide="ignore", invalid="ignore"):
        Y = (fl[:, None] - fl[None, :]) / diff
    mid = f.deriv(0.5 * (li + lj))
    Y = np.where(close, mid, Y)
    return 0.5 * (Y + Y.T)


def schur_product(M, N) -> np.ndarray:
    A, B = as_matrix(M), as_matrix(N)
    if A.shape != B.shape:
        raise ValidationError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A * B


def fprime_opnorm(f: MonotoneFn, A) -> float:
    """Operator norm of ``f'(A)``; ``f'`` is positive and nonincreasing for every supported ``f``."""
    lam = as_pd(A).spectral.eigenvalues
    return float(np.max(np.abs(f.deriv(lam))))


def commutator_identity_residual(f: MonotoneFn, A, X) -> float:
    """``|| f(L) Xt - Xt f(L) - Y o (L Xt - Xt L) ||_F`` in the eigenbasis of ``A``, relative to scale."""
    P = as_pd(A)
    sd = P.spectral
    Xt = sd.vectors.conj().T @ as_matrix(X) @ sd.vectors
    lam = sd.eigenvalues
    fl = f.eval(lam)
    lhs = fl[:, None] * Xt - Xt * fl[None, :]
    comm = lam[:, None] * Xt - Xt * lam[None, :]
    rhs = schur_product(divided_difference_matrix(f, lam), comm)
    return float(np.linalg.norm(lhs - rhs)) / max(1.0, float(np.linalg.norm(lhs)))


def dilate(A, B, X):
    """``diag(A, B)`` and ``[[0, X], [0, 0]]``: reduces ``f(A)X - Xf(B)`` to a single-operator commutator."""
    PA, PB = as_pd(A), as_pd(B)
    Xm = as_matrix(X)
    n, m = PA.n, PB.n
    if Xm.shape != (n, m):
        raise ValidationError(f"X must be {n}x{m}, got {Xm.shape}")
    w = np.concatenate([PA.spectral.eigenvalues, PB.spectral.eigenvalues])
    U = np.zeros((n + m, n + m), dtype=np.complex128)
    U[:n, :n] = PA.spectral.vectors
    U[n:, n:] = PB.spectral.vectors
    Xh = np.zeros((n + m, n + m), dtype=np.complex128)
    Xh[:n, n:] = Xm
    return HermitianPD.from_spectrum(w, U), Xh


def exprel(z):
    """``expm1(z) / z`` with the removable singularity at 0 filled in."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) <= get_policy().series
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(small, 1.0 + z / 2.0 + z * z / 6.0, np.expm1(z) / np.where(small, 1.0, z))
    return out if out.ndim else float(out)

