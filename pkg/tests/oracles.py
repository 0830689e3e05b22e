"""Independent reference computations in extended precision (mpmath).

Nothing here imports the package: branches are rebuilt from the Lagrange
formula, maxima come from mpmath's own root finder, leading coefficients
from a polynomial fit.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def eps(k, i):
    return -1 if (k + 1 - i + (1 if i <= k else 0)) % 2 else 1


def ell(xs, k, t):
    out = mp.mpf(1)
    for j, xj in enumerate(xs):
        if j != k:
            out *= (t - xj) / (xs[k] - xj)
    return out


def weight_exp(t):
    return mp.e ** (-t)


def branch(xs, i, t, hybrid=True, w=weight_exp):
    xs = [mp.mpf(v) for v in xs]
    n = len(xs) - 1
    c = eps(n + 1, i) if hybrid else 0
    t = mp.mpf(t)
    return c + sum((eps(k, i) - c) * w(t) / w(xs[k]) * ell(xs, k, t) for k in range(n + 1))


def branch_deriv(xs, i, t, hybrid=True, w=weight_exp):
    return mp.diff(lambda s: branch(xs, i, s, hybrid, w), mp.mpf(t))


def hybrid_maximum(xs, i):
    """(m_i, z_i) by bracketing P_i' on I_i with mpmath."""
    n = len(xs) - 1
    lo = mp.mpf(xs[i - 1])
    if i <= n:
        hi = mp.mpf(xs[i])
    else:
        hi = lo + 1
        while branch_deriv(xs, i, hi) > 0:
            hi = lo + 2 * (hi - lo)
    z = mp.findroot(lambda s: branch_deriv(xs, i, s), (lo, hi), solver="anderson")
    return branch(xs, i, z), z


def leading_a_fit(xs, i):
    """Top coefficient of e^t (P_i - c), from a degree-n fit at Chebyshev points."""
    n = len(xs) - 1
    c = eps(n + 1, i)
    lo, hi = -1.0, float(xs[-1]) + 1.0
    k = np.arange(n + 1)
    ts = (lo + hi) / 2 + (hi - lo) / 2 * np.cos((2 * k + 1) * np.pi / (2 * n + 2))
    ys = [float((branch(xs, i, t) - c) * mp.e ** mp.mpf(t)) for t in ts]
    return float(np.polynomial.polynomial.polyfit(ts, ys, n)[-1])


def fd(f, t, h=1e-6):
    return (f(t + h) - f(t - h)) / (2 * h)
