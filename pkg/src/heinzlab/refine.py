"""Heinz blocks ``A^t X B^(1-t) + A^(1-t) X B^t``, their midpoint/trapezoid ladders
``E_n`` and ``F_m``, and the exact integrals they approximate.
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .linalg import as_matrix, as_pd, singular_values
from .matfun import exprel
from .means import midpoint_nodes, pairwise_sum, trapezoid_nodes
from .norms import NormKind
from .policy import get_policy
from .quadrature import adaptive_simpson


def _triple(A, B, X):
    PA, PB = as_pd(A), as_pd(B)
    Xm = as_matrix(X, "X")
    if Xm.shape != (PA.n, PB.n):
        raise ValidationError(f"X must be {PA.n}x{PB.n} to match A and B, got {Xm.shape}")
    return PA, PB, Xm


def heinz_block(A, B, X, nu: float) -> np.ndarray:
    PA, PB, Xm = _triple(A, B, X)
    return PA.power(nu) @ Xm @ PB.power(1.0 - nu) + PA.power(1.0 - nu) @ Xm @ PB.power(nu)


def E_n(A, B, X, alpha: float, beta: float, n: int) -> np.ndarray:
    """Average of Heinz blocks at the exponents ``gamma((2i-1)/2^n)``."""
    PA, PB, Xm = _triple(A, B, X)
    nodes = midpoint_nodes(alpha, beta, n)
    return pairwise_sum([heinz_block(PA, PB, Xm, t) for t in nodes]) / len(nodes)


def F_m(A, B, X, alpha: float, beta: float, m: int) -> np.ndarray:
    """Trapezoid average of Heinz blocks on ``2^(m-1)`` equal panels of ``[alpha, beta]``."""
    PA, PB, Xm = _triple(A, B, X)
    nodes, w = trapezoid_nodes(alpha, beta, m)
    return pairwise_sum([wi * heinz_block(PA, PB, Xm, t) for t, wi in zip(nodes, w)])


def _power_integral(p: np.ndarray, q: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """``int_alpha^beta p^t q^(1-t) dt`` elementwise (broadcast), stable near ``p = q``."""
    u = np.log(p) - np.log(q)
    w = beta - alpha
    thr = get_policy().log_ratio
    near = np.abs(u) <= thr
    # limit branch: q e^(alpha u) w (1 + w u / 2)
    rel = np.where(near, 1.0 + w * u / 2.0, exprel(np.where(near, 0.0, w * u)))
    return q * np.exp(alpha * u) * w * rel


def heinz_integral(A, B, X, alpha: float, beta: float) -> np.ndarray:
    """``int_alpha^beta (A^t X B^(1-t) + A^(1-t) X B^t) dt`` in the joint eigenbasis."""
    if not alpha < beta:
        raise ValidationError(f"heinz_integral needs alpha < beta, got {alpha}, {beta}")
    PA, PB, Xm = _triple(A, B, X)
    U, lam = PA.spectral.vectors, PA.spectral.eigenvalues
    V, mu = PB.spectral.vectors, PB.spectral.eigenvalues
    L, M = lam[:, None], mu[None, :]
    K = _power_integral(L, M, alpha, beta) + _power_integral(M, L, alpha, beta)
    return U @ (K * (U.conj().T @ Xm @ V)) @ V.conj().T


def one_sided_integral(A, B, X) -> np.ndarray:
    """``int_0^1 A^t X B^(1-t) dt``; entries in the eigenbasis are log means ``L(l_i, m_j)``."""
    PA, PB, Xm = _triple(A, B, X)
    U, lam = PA.spectral.vectors, PA.spectral.eigenvalues
    V, mu = PB.spectral.vectors, PB.spectral.eigenvalues
    K = _power_integral(lam[:, None], mu[None, :], 0.0, 1.0)
    return U @ (K * (U.conj().T @ Xm @ V)) @ V.conj().T


def block_norm_average(A, B, X, nu: float, kinds, *, tol: float | None = None) -> tuple[np.ndarray, bool]:
    """Mean of ``t -> |||block(t)|||`` over the interval between ``nu`` and ``1 - nu``, for several norms.

    Uses ``block(t) = block(1 - t)``, so only the half ending at 1/2 is integrated.
    Returns the values (one per kind) and whether adaptive Simpson met its tolerance.
    """
    if nu == 0.5:
        raise ValidationError("the block-norm average is undefined (0/0) at nu = 1/2")
    PA, PB, Xm = _triple(A, B, X)
    kinds = list(kinds)
    pol = get_policy()

    def g(t):
        s = singular_values(heinz_block(PA, PB, Xm, t))
        return np.array([k.of_singular_values(s) for k in kinds])

    lo = min(nu, 1.0 - nu)
    ends = np.maximum(np.abs(g(lo)), np.abs(g(0.5)))
    scale = max(1.0, float(np.max(ends)))
    tol = pol.simpson_abs if tol is None else tol
    total, ok = adaptive_simpson(g, lo, 0.5, tol * scale * (0.5 - lo), pol.simpson_depth)
    return total / (0.5 - lo), ok


def norm_of_block_integral(A, B, X, nu: float, kind: NormKind) -> float:
    """``(1/|1-2nu|) |int_nu^(1-nu) |||block(t)||| dt|`` (an integral of norms, not a norm of an integral)."""
    vals, _ = block_norm_average(A, B, X, nu, [kind])
    return float(vals[0])
