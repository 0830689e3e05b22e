"""Bracketed root finding shared by the branch and derivative analyses."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq


class BracketError(RuntimeError):
    """No sign change where theory (or the caller) expected one.

    ``samples`` carries ``(t, f(t))`` pairs so the failure can be inspected.
    """

    def __init__(self, message: str, samples=()):
        super().__init__(message)
        self.samples = list(samples)


def sign(v: float) -> int:
    return (v > 0) - (v < 0)


def sample_signs(f, a: float, b: float, num: int = 17) -> list[tuple[float, float]]:
    if math.isinf(a) or math.isinf(b):
        return []
    return [(float(t), float(f(t))) for t in np.linspace(a, b, num)]


def find_root(f, a: float, b: float, fprime=None, xtol: float | None = None) -> float:
    """Root of f in [a, b] given a sign change, then one guarded Newton step.

    ``xtol`` defaults to ``1e-13 * max(1, |a|, |b|)``. The Newton polish is
    kept only if it stays inside the bracket and does not increase |f|.
    """
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if sign(fa) == sign(fb):
        raise BracketError(f"no sign change on [{a}, {b}]", sample_signs(f, a, b))
    if xtol is None:
        xtol = 1e-13 * max(1.0, abs(a), abs(b))
    root = brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    if fprime is not None:
        fr = f(root)
        slope = fprime(root)
        if fr != 0.0 and slope != 0.0 and math.isfinite(slope):
            cand = root - fr / slope
            lo, hi = min(a, b), max(a, b)
            if lo <= cand <= hi and abs(f(cand)) <= abs(fr):
                root = cand
    return float(root)


def expand_bracket(f, start: float, direction: int, want_sign: int, first: float = 1.0,
                   limit: float = 2.0**16) -> float | None:
    """Walk away from ``start`` by doubling steps until f has ``want_sign``.

    Returns the far end of the bracket, or None when the step exceeds
    ``limit``.
    """
    step = first
    while step <= limit:
        t = start + direction * step
        if sign(f(t)) == want_sign:
            return t
        step *= 2.0
    return None
