"""Simpson rules for scalar- or vector-valued integrands on an interval."""
from __future__ import annotations

import numpy as np

from .errors import ValidationError


def composite_simpson(f, a: float, b: float, panels: int = 1024):
    """Composite Simpson with ``panels`` subintervals (must be even)."""
    if panels < 2 or panels % 2:
        raise ValidationError(f"Simpson needs an even number of panels, got {panels}")
    x = np.linspace(a, b, panels + 1)
    h = (b - a) / panels
    acc = f(x[0]) + f(x[-1])
    acc = acc + 4.0 * sum(f(t) for t in x[1:-1:2])
    acc = acc + 2.0 * sum(f(t) for t in x[2:-1:2])
    return acc * (h / 3.0)


def adaptive_simpson(f, a: float, b: float, tol: float, max_depth: int = 20):
    """Adaptive Simpson quadrature; ``f`` may return an array, error is measured in max-norm.

    Returns ``(integral, ok)`` where ``ok`` is False if some subinterval hit ``max_depth``.
    """
    if a == b:
        return np.zeros_like(np.asarray(f(a), dtype=float)), True
    fa, fm, fb = (np.asarray(f(t), dtype=float) for t in (a, 0.5 * (a + b), b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    ok = [True]

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = np.asarray(f(lm), dtype=float), np.asarray(f(rm), dtype=float)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if np.max(np.abs(delta)) <= 15.0 * tol:
            return left + right + delta / 15.0
        if depth >= max_depth:
            ok[0] = False
            return left + right + delta / 15.0
        return (recurse(a, m, fa, flm, fm, left, tol / 2.0, depth + 1)
                + recurse(m, b, fm, frm, fb, right, tol / 2.0, depth + 1))

    return recurse(a, b, fa, fm, fb, whole, tol, 0), ok[0]
