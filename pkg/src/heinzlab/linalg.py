"""Dense complex matrix kernels.

Matrices are plain ``numpy`` complex128 arrays.  The Hermitian eigensolver is a
cyclic Jacobi method written here so the whole stack depends only on basic
array arithmetic; ``numpy.linalg`` is used in tests as a cross-check only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NumericalError, ValidationError
from .policy import get_policy


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValidationError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} has non-finite entries")
    return A


def _require_square(A: np.ndarray, name: str) -> None:
    if A.shape[0] != A.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {A.shape}")


def is_hermitian(M, tol: float | None = None) -> bool:
    A = as_matrix(M)
    if A.shape[0] != A.shape[1]:
        return False
    tol = get_policy().hermitian if tol is None else tol
    scale = 1.0 + np.max(np.abs(A))
    return bool(np.max(np.abs(A - A.conj().T)) <= tol * scale)


def hermitian_part(M) -> np.ndarray:
    A = as_matrix(M)
    return 0.5 * (A + A.conj().T)


def adjoint(M) -> np.ndarray:
    return as_matrix(M).conj().T


def matmul(*Ms) -> np.ndarray:
    if not Ms:
        raise ValidationError("matmul needs at least one operand")
    out = as_matrix(Ms[0])
    for M in Ms[1:]:
        B = as_matrix(M)
        if out.shape[1] != B.shape[0]:
            raise ValidationError(f"dimension mismatch: {out.shape} @ {B.shape}")
        out = out @ B
    return out


def add(M, N) -> np.ndarray:
    A, B = as_matrix(M), as_matrix(N)
    if A.shape != B.shape:
        raise ValidationError(f"dimension mismatch: {A.shape} + {B.shape}")
    return A + B


def scale(c, M) -> np.ndarray:
    return complex(c) * as_matrix(M)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """``H = vectors @ diag(eigenvalues) @ vectors^*`` with eigenvalues ascending."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.vectors.conj().T

    def apply(self, values: np.ndarray) -> np.ndarray:
        """``U diag(values) U^*`` for values given per eigenvalue."""
        return (self.vectors * values) @ self.vectors.conj().T


def _offdiag_norm(H: np.ndarray) -> float:
    off = H.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament schedule: n-1 (or n) rounds of disjoint index pairs covering every pair once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(a, b), max(a, b)) for a, b in pairs if a < n and b < n]
        if pairs:
            p, q = np.array(pairs).T
            rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


_SCHEDULES: dict[int, list] = {}


def hermitian_eig(M, *, max_sweeps: int | None = None, threshold: float | None = None) -> SpectralDecomposition:
    """Cyclic Jacobi eigensolver for complex Hermitian matrices.

    Pivots are visited in round-robin order; the rotations of one round act on
    disjoint index pairs and are applied together as a single unitary.  Each
    rotation removes the phase of ``h_pq`` and then applies the real symmetric
    Jacobi rotation to the resulting 2x2 block.
    """
    pol = get_policy()
    max_sweeps = pol.jacobi_max_sweeps if max_sweeps is None else max_sweeps
    threshold = pol.jacobi_offdiag if threshold is None else threshold

    A = as_matrix(M, "H")
    _require_square(A, "H")
    if not is_hermitian(A):
        raise ValidationError("H is not Hermitian within tolerance")
    n = A.shape[0]
    H = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=np.complex128)
    if n == 1:
        return SpectralDecomposition(np.real(np.diagonal(H)).copy(), V)
    schedule = _SCHEDULES.get(n)
    if schedule is None:
        schedule = _SCHEDULES[n] = _round_robin(n)

    target = threshold * float(np.linalg.norm(H))
    skip = max(1e-3 * target / n, np.finfo(float).tiny)
    residual = _offdiag_norm(H)
    sweep = 0
    while residual > target:
        if sweep == max_sweeps:
            raise NumericalError(
                f"Jacobi did not converge after {max_sweeps} sweeps: off-diagonal residual "
                f"{residual:.3e} > {target:.3e}"
            )
        sweep += 1
        for p, q in schedule:
            hpq = H[p, q]
            r = np.abs(hpq)
            live = r > skip
            if not live.any():
                continue
            p, q, hpq, r = p[live], q[live], hpq[live], r[live]
            e = np.conj(hpq / r)
            a = H[p, p].real
            d = H[q, q].real
            tau = (d - a) / (2.0 * r)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            J = np.eye(n, dtype=np.complex128)
            J[p, p] = c
            J[p, q] = s
            J[q, p] = -s * e
            J[q, q] = c * e
            H = J.conj().T @ H @ J
            H[p, q] = 0.0
            H[q, p] = 0.0
            H[p, p] = a - t * r
            H[q, q] = d + t * r
            V = V @ J
        residual = _offdiag_norm(H)
    w = np.real(np.diagonal(H)).copy()
    order = np.argsort(w, kind="stable")
    return SpectralDecomposition(w[order], V[:, order])


def singular_values(M) -> np.ndarray:
    """Singular values in descending order, via the eigenvalues of ``M^* M``."""
    A = as_matrix(M)
    top = float(np.max(np.abs(A)))
    if top == 0.0:
        return np.zeros(min(A.shape))
    A = A / top  # keeps the Gram matrix clear of overflow and underflow
    G = A.conj().T @ A if A.shape[1] <= A.shape[0] else A @ A.conj().T
    G = 0.5 * (G + G.conj().T)
    w = hermitian_eig(G).eigenvalues
    floor = -get_policy().svd_clamp * float(np.linalg.norm(A)) ** 2
    if np.any(w < floor):
        raise NumericalError(f"Gram matrix has eigenvalue {w.min():.3e} below clamp floor {floor:.3e}")
    w = np.clip(w, 0.0, None)
    return top * np.sqrt(w)[::-1]


class HermitianPD:
    """A Hermitian positive-definite matrix with a cached spectral decomposition."""

    __slots__ = ("matrix", "__dict__")

    def __init__(self, M, *, check: bool = True):
        A = as_matrix(M, "H")
        _require_square(A, "H")
        if check and not is_hermitian(A):
            raise ValidationError("matrix is not Hermitian within tolerance")
        A = 0.5 * (A + A.conj().T)
        A.setflags(write=False)
        self.matrix = A
        if check and self.min_eig <= 0:
            raise ValidationError(f"matrix is not positive definite (min eigenvalue {self.min_eig:.3e})")

    @classmethod
    def from_spectrum(cls, eigenvalues, vectors) -> "HermitianPD":
        w = np.asarray(eigenvalues, dtype=float)
        U = as_matrix(vectors)
        order = np.argsort(w, kind="stable")
        w, U = w[order], U[:, order]
        obj = cls((U * w) @ U.conj().T, check=False)
        obj.__dict__["spectral"] = SpectralDecomposition(w, U)
        if w[0] <= 0:
            raise ValidationError("spectrum must be positive")
        return obj

    @cached_property
    def spectral(self) -> SpectralDecomposition:
        return hermitian_eig(self.matrix)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def min_eig(self) -> float:
        return float(self.spectral.eigenvalues[0])

    @property
    def max_eig(self) -> float:
        return float(self.spectral.eigenvalues[-1])

    @property
    def cond(self) -> float:
        return self.max_eig / self.min_eig

    def power(self, nu: float) -> np.ndarray:
        sd = self.spectral
        return sd.apply(sd.eigenvalues ** nu)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self) -> str:
        return f"HermitianPD(n={self.n}, spectrum=[{self.min_eig:.4g}, {self.max_eig:.4g}])"


def as_pd(M) -> HermitianPD:
    return M if isinstance(M, HermitianPD) else HermitianPD(M)


def inverse_pd(H) -> HermitianPD:
    P = as_pd(H)
    sd = P.spectral
    return HermitianPD.from_spectrum(1.0 / sd.eigenvalues, sd.vectors)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based 64-bit generator (Philox) so streams are reproducible across platforms."""
    return np.random.Generator(np.random.Philox(int(seed) % 2**64))


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(G)
    # phase fix makes the result Haar distributed and independent of the QR sign convention
    ph = np.diagonal(R) / np.abs(np.diagonal(R))
    return Q * ph


def random_pd(n: int, seed: int, cond_cap: float = 1e3, *, scale: float = 1.0) -> HermitianPD:
    """Random Hermitian PD matrix with log-uniform spectrum in ``scale * [1, cond_cap]``."""
    if n < 1:
        raise ValidationError(f"order must be >= 1, got {n}")
    if not cond_cap >= 1.0:
        raise ValidationError(f"cond_cap must be >= 1, got {cond_cap}")
    if not scale > 0:
        raise ValidationError(f"scale must be positive, got {scale}")
    rng = make_rng(seed)
    U = random_unitary(n, rng)
    w = scale * cond_cap ** rng.uniform(0.0, 1.0, size=n)
    return HermitianPD.from_spectrum(w, U)


def random_complex(shape, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
