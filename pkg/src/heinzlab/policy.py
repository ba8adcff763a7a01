"""Numerical tolerances shared by every module.

All thresholds live in one place so a run can override them from a config
file (see ``heinzlab.cli``) without threading arguments through each call.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12          # ||M - M*||_max <= hermitian * (1 + ||M||_max)
    jacobi_max_sweeps: int = 50
    jacobi_offdiag: float = 1e-13     # stop when off(H)_F <= jacobi_offdiag * ||H||_F
    svd_clamp: float = 1e-12          # eigenvalues of M*M down to -svd_clamp*||M||^2 are zeroed
    divided_difference: float = 1e-8  # |l_i - l_j| <= this * max(1, |l_i|) -> midpoint derivative
    log_ratio: float = 1e-8           # |ln(l/m)| <= this -> limit branch of the integral kernel
    series: float = 1e-6              # |z| <= this -> Taylor branch of expm1(z)/z
    inequality: float = 1e-9          # default pass tolerance, relative to max(1, |rhs|)
    simpson_abs: float = 1e-9         # adaptive Simpson, relative to the integrand scale
    simpson_depth: int = 20


_policy = Tolerances()


def get_policy() -> Tolerances:
    return _policy


def set_policy(policy: Tolerances | None = None, **overrides) -> Tolerances:
    """Install a new policy (or patch the current one) and return it."""
    global _policy
    base = policy if policy is not None else _policy
    _policy = dataclasses.replace(base, **overrides) if overrides else base
    return _policy


def policy_fields() -> dict[str, type]:
    return {f.name: type(getattr(_policy, f.name)) for f in dataclasses.fields(Tolerances)}
