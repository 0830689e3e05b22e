"""Weight families and their pointwise evaluation.

Each weight is identified by a :class:`WeightKind`; the root-counting and
interior-maximum guarantees used elsewhere depend on which kind is in play,
so arbitrary callables are deliberately not accepted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised when a point lies outside the domain of a weight."""


class WeightKind(enum.Enum):
    EXPONENTIAL = "exp"
    HERMITE = "hermite"
    SQRT_EXPONENTIAL = "sqrtexp"
    UNIT = "unit"


@dataclass(frozen=True)
class Weight:
    """A positive weight ``w`` on its natural domain.

    ``lower``/``upper`` describe the domain; the unit weight is tied to a
    finite interval ``[lower, upper]``.
    """

    kind: WeightKind
    lower: float
    upper: float

    @property
    def halfline(self) -> bool:
        return self.lower == 0.0 and math.isinf(self.upper)

    def check_domain(self, t) -> None:
        t = np.asarray(t, dtype=float)
        if np.any(t < self.lower) or np.any(t > self.upper):
            raise DomainError(
                f"t outside domain [{self.lower}, {self.upper}] of {self.kind.value} weight"
            )

    # The ``*_ext`` evaluators use the natural analytic extension of the
    # weight to the real line where one exists (exp(-t) for t < 0). Branch
    # root analysis needs this; public evaluators reject such points.

    def log_weight(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind is WeightKind.EXPONENTIAL:
            return -t
        if self.kind is WeightKind.HERMITE:
            return -(t * t)
        if self.kind is WeightKind.SQRT_EXPONENTIAL:
            return -np.sqrt(t)
        return np.zeros_like(t)

    def log_derivative(self, t):
        """w'/w, the first derivative of log w."""
        t = np.asarray(t, dtype=float)
        if self.kind is WeightKind.EXPONENTIAL:
            return np.full_like(t, -1.0)
        if self.kind is WeightKind.HERMITE:
            return -2.0 * t
        if self.kind is WeightKind.SQRT_EXPONENTIAL:
            with np.errstate(divide="ignore"):
                return -0.5 / np.sqrt(t)
        return np.zeros_like(t)

    def log_second_derivative(self, t):
        """(w'/w)', needed for second t-derivatives of weighted functions."""
        t = np.asarray(t, dtype=float)
        if self.kind is WeightKind.HERMITE:
            return np.full_like(t, -2.0)
        if self.kind is WeightKind.SQRT_EXPONENTIAL:
            with np.errstate(divide="ignore"):
                return 0.25 / (t * np.sqrt(t))
        return np.zeros_like(t)


EXPONENTIAL = Weight(WeightKind.EXPONENTIAL, 0.0, math.inf)
HERMITE = Weight(WeightKind.HERMITE, -math.inf, math.inf)
SQRT_EXPONENTIAL = Weight(WeightKind.SQRT_EXPONENTIAL, 0.0, math.inf)


def unit_weight(a: float = -1.0, b: float = 1.0) -> Weight:
    if not a < b:
        raise ValueError("unit weight needs a < b")
    return Weight(WeightKind.UNIT, float(a), float(b))


UNIT = unit_weight()


def weight_from_name(name: str, interval: tuple[float, float] | None = None) -> Weight:
    """Look up a weight by its CLI name (exp, hermite, sqrtexp, unit)."""
    kind = WeightKind(name)
    if kind is WeightKind.EXPONENTIAL:
        return EXPONENTIAL
    if kind is WeightKind.HERMITE:
        return HERMITE
    if kind is WeightKind.SQRT_EXPONENTIAL:
        return SQRT_EXPONENTIAL
    return unit_weight(*(interval or (-1.0, 1.0)))


def eval_weight(w: Weight, t):
    """Return w(t); rejects points outside the weight's domain."""
    w.check_domain(t)
    out = np.exp(w.log_weight(t))
    return float(out) if np.ndim(out) == 0 else out


def eval_log_derivative(w: Weight, t):
    """Return w'(t)/w(t) at interior points of the domain."""
    w.check_domain(t)
    if w.kind is WeightKind.SQRT_EXPONENTIAL and np.any(np.asarray(t) == 0.0):
        raise DomainError("exp(-sqrt(t)) is not differentiable at t = 0")
    out = w.log_derivative(t)
    return float(out) if np.ndim(out) == 0 else out
