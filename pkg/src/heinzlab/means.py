"""Scalar and operator means: Heinz, Heron, logarithmic, weighted arithmetic/geometric,
the ``F_nu`` kernel, and the midpoint/trapezoid ladders of ``f_x(t) = (x^t + x^(1-t))/2``.

Every operator mean of a PD pair ``(A, B)`` is a congruence
``A^(1/2) g(C) A^(1/2)`` with ``C = A^(-1/2) B A^(-1/2)``; :class:`MeanPair`
caches the pieces so a whole ladder costs one eigendecomposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import ValidationError
from .linalg import HermitianPD, as_pd, hermitian_eig
from .matfun import exprel

SQRT3 = math.sqrt(3.0)
DRISSI_INTERVAL = ((SQRT3 - 1.0) / (2.0 * SQRT3), (SQRT3 + 1.0) / (2.0 * SQRT3))


@dataclass(frozen=True)
class MeanParams:
    nu: float = 0.25
    alpha: float = 0.0
    beta: float = 1.0
    n: int = 1
    m: int = 1
    extra: dict = field(default_factory=dict)  # per-check parameters such as t, r, f

    def __post_init__(self):
        # the admissible range of nu is check-specific and validated there
        if self.n < 1 or self.m < 1:
            raise ValidationError(f"ladder depths must be >= 1, got n={self.n}, m={self.m}")

    @property
    def r0(self) -> float:
        return min(self.nu, 1.0 - self.nu)

    def as_dict(self) -> dict:
        d = {"nu": self.nu, "alpha": self.alpha, "beta": self.beta, "n": self.n, "m": self.m}
        d.update(self.extra)
        return d


def _nu_ok(nu: float) -> None:
    if not 0.0 <= nu <= 1.0:
        raise ValidationError(f"nu must be in [0, 1], got {nu}")


# ---------------------------------------------------------------- scalar means

def heinz_scalar(a, b, nu):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return 0.5 * (a ** nu * b ** (1.0 - nu) + a ** (1.0 - nu) * b ** nu)


def heron_scalar(a, b, nu):
    _nu_ok(nu)
    a, b = np.asarray(a, float), np.asarray(b, float)
    return (1.0 - nu) * np.sqrt(a * b) + nu * 0.5 * (a + b)


def log_mean(a, b):
    """``(a - b) / (ln a - ln b)``, written as ``b * expm1(u) / u`` with ``u = ln(a/b)``."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValidationError("logarithmic mean needs positive arguments")
    return b * exprel(np.log(a) - np.log(b))


def bhatia_alpha(nu):
    return 1.0 - 4.0 * (nu - nu * nu)


def f_x_scalar(x, t):
    x = np.asarray(x, float)
    return 0.5 * (x ** t + x ** (1.0 - t))


def F_nu_scalar(x, nu):
    """``(x^nu - x^(1-nu)) / ln x``, with value ``2 nu - 1`` at ``x = 1``."""
    u = np.log(np.asarray(x, float))
    return (2.0 * nu - 1.0) * np.exp(nu * u) * exprel((1.0 - 2.0 * nu) * u)


def fx_mean(x, alpha, beta):
    """Average of ``f_x`` over ``[alpha, beta]`` in closed form (``alpha != beta``)."""
    if alpha == beta:
        return f_x_scalar(x, alpha)
    u = np.log(np.asarray(x, float))
    w = beta - alpha
    return 0.5 * exprel(w * u) * (np.exp(alpha * u) + np.exp((1.0 - beta) * u))


def gamma(alpha: float, beta: float, t):
    return (1.0 - np.asarray(t, float)) * alpha + np.asarray(t, float) * beta


def midpoint_nodes(alpha: float, beta: float, n: int) -> np.ndarray:
    """Exponents ``gamma((2i-1)/2^n)``, i = 1..2^(n-1)."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    k = 2 ** (n - 1)
    return gamma(alpha, beta, (2.0 * np.arange(1, k + 1) - 1.0) / 2 ** n)


def trapezoid_nodes(alpha: float, beta: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``gamma(i/2^(m-1))``, i = 0..2^(m-1), and their composite-trapezoid weights."""
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    k = 2 ** (m - 1)
    nodes = gamma(alpha, beta, np.arange(k + 1) / k)
    w = np.full(k + 1, 1.0 / k)
    w[0] = w[-1] = 0.5 / k
    return nodes, w


def pairwise_sum(terms: list):
    """Deterministic tree reduction, independent of how the terms were produced."""
    terms = list(terms)
    if not terms:
        raise ValidationError("nothing to sum")
    while len(terms) > 1:
        nxt = [terms[i] + terms[i + 1] for i in range(0, len(terms) - 1, 2)]
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    return terms[0]


def phi_n_scalar(f: Callable, alpha: float, beta: float, n: int):
    """Composite midpoint average of ``f`` over the dyadic partition of ``[alpha, beta]``."""
    nodes = midpoint_nodes(alpha, beta, n)
    return pairwise_sum([f(t) for t in nodes]) / len(nodes)


def Phi_m_scalar(f: Callable, alpha: float, beta: float, m: int):
    """Composite trapezoid average; ``Phi_1 = (f(alpha) + f(beta)) / 2``."""
    nodes, w = trapezoid_nodes(alpha, beta, m)
    return pairwise_sum([wi * f(t) for t, wi in zip(nodes, w)])


# -------------------------------------------------------------- operator means

class MeanPair:
    """Cached congruence data for a PD pair ``(A, B)``."""

    def __init__(self, A, B):
        self.A = as_pd(A)
        self.B = as_pd(B)
        if self.A.n != self.B.n:
            raise ValidationError(f"A and B must have the same order, got {self.A.n} and {self.B.n}")

    @cached_property
    def a_half(self) -> np.ndarray:
        return self.A.power(0.5)

    @cached_property
    def a_ihalf(self) -> np.ndarray:
        return self.A.power(-0.5)

    @cached_property
    def C(self) -> HermitianPD:
        M = self.a_ihalf @ self.B.matrix @ self.a_ihalf
        M = 0.5 * (M + M.conj().T)
        sd = hermitian_eig(M)
        if sd.eigenvalues[0] <= 0:
            raise ValidationError("A^(-1/2) B A^(-1/2) is not positive definite")
        return HermitianPD.from_spectrum(sd.eigenvalues, sd.vectors)

    @cached_property
    def W(self) -> np.ndarray:
        return self.a_half @ self.C.spectral.vectors

    @property
    def c(self) -> np.ndarray:
        """Eigenvalues of ``A^(-1/2) B A^(-1/2)``."""
        return self.C.spectral.eigenvalues

    def congruence(self, values) -> np.ndarray:
        """``A^(1/2) g(C) A^(1/2)`` for ``values = g(c)``."""
        return (self.W * np.asarray(values, float)) @ self.W.conj().T

    def nabla(self, nu: float = 0.5) -> np.ndarray:
        return (1.0 - nu) * self.A.matrix + nu * self.B.matrix

    def sharp(self, nu: float = 0.5) -> np.ndarray:
        Cn = self.C.spectral.apply(self.c ** nu)
        return self.a_half @ Cn @ self.a_half

    def heinz(self, nu: float) -> np.ndarray:
        return 0.5 * (self.sharp(nu) + self.sharp(1.0 - nu))

    def heron(self, nu: float) -> np.ndarray:
        _nu_ok(nu)
        return (1.0 - nu) * self.sharp(0.5) + nu * self.nabla(0.5)

    def F(self, nu: float) -> np.ndarray:
        return self.congruence(F_nu_scalar(self.c, nu))

    def phi(self, alpha: float, beta: float, n: int) -> np.ndarray:
        """Average of Heinz means at the dyadic midpoints (mean-sum form)."""
        nodes = midpoint_nodes(alpha, beta, n)
        return pairwise_sum([self.heinz(t) for t in nodes]) / len(nodes)

    def Phi(self, alpha: float, beta: float, m: int) -> np.ndarray:
        """Trapezoid-weighted Heinz means (mean-sum form)."""
        nodes, w = trapezoid_nodes(alpha, beta, m)
        return pairwise_sum([wi * self.heinz(t) for t, wi in zip(nodes, w)])

    def phi_congruence(self, alpha: float, beta: float, n: int) -> np.ndarray:
        """Scalar ladder applied to ``C`` then congruence-transformed."""
        return self.congruence(phi_n_scalar(lambda t: f_x_scalar(self.c, t), alpha, beta, n))

    def Phi_congruence(self, alpha: float, beta: float, m: int) -> np.ndarray:
        return self.congruence(Phi_m_scalar(lambda t: f_x_scalar(self.c, t), alpha, beta, m))

    def fx_mean(self, alpha: float, beta: float) -> np.ndarray:
        """``A^(1/2) [mean of f_C over [alpha, beta]] A^(1/2)``."""
        return self.congruence(fx_mean(self.c, alpha, beta))


def arith_mean_w(A, B, nu: float) -> np.ndarray:
    PA, PB = as_pd(A), as_pd(B)
    if PA.n != PB.n:
        raise ValidationError("A and B must have the same order")
    return (1.0 - nu) * PA.matrix + nu * PB.matrix


def geom_mean_w(A, B, nu: float) -> HermitianPD:
    M = MeanPair(A, B).sharp(nu)
    return HermitianPD(0.5 * (M + M.conj().T), check=False)


def heinz_op(A, B, nu: float) -> np.ndarray:
    return MeanPair(A, B).heinz(nu)


def heron_op(A, B, nu: float) -> np.ndarray:
    return MeanPair(A, B).heron(nu)


def F_nu_op(A, B, nu: float) -> np.ndarray:
    return MeanPair(A, B).F(nu)


def phi_n_op(A, B, alpha: float, beta: float, n: int) -> np.ndarray:
    return MeanPair(A, B).phi(alpha, beta, n)


def Phi_m_op(A, B, alpha: float, beta: float, m: int) -> np.ndarray:
    return MeanPair(A, B).Phi(alpha, beta, m)
