"""Loss-distribution models: empirical CDF, folded-normal CDF, and the DKW band.

The empirical CDF is refit from a fresh ancillary sample at every step of
the derivative-free optimizer; the folded-normal model is the cheap
parametric stand-in used by the fast first-order variant.  Models are
immutable after fitting.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr  # standard normal CDF, vectorized

__all__ = ["EmpiricalCdf", "FoldedNormalCdf", "dkw_band"]

_MIN_SCALE = 1e-12

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _phi(x):
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(x))


class EmpiricalCdf:
    """Step-function CDF of an observed loss sample; ties counted with <=."""

    __slots__ = ("values", "m")

    def __init__(self, sorted_values: np.ndarray):
        self.values = sorted_values
        self.m = len(sorted_values)

    @classmethod
    def fit(cls, losses) -> "EmpiricalCdf":
        arr = np.asarray(losses, dtype=float).ravel()
        if arr.size == 0:
            raise ValueError("cannot fit an empirical CDF to an empty sample")
        return cls(np.sort(arr))

    def __call__(self, u):
        """Fraction of the sample <= u (scalar or array)."""
        idx = np.searchsorted(self.values, u, side="right")
        out = idx / self.m
        return float(out) if np.isscalar(u) else out


class FoldedNormalCdf:
    """CDF of |X| for X ~ Normal(mu, s^2), with closed-form density.

    ``fit`` sets (mu, s) to the sample mean and sample standard deviation
    (denominator m - 1) of the losses, i.e. the parameters of the
    pre-folded normal are matched to empirical loss moments.  A degenerate
    scale is clamped at 1e-12 so constant ancillary samples stay usable.
    """

    __slots__ = ("mu", "s")

    def __init__(self, mu: float, s: float):
        if not (s > 0.0):
            raise ValueError(f"folded-normal scale must be positive, got {s}")
        self.mu = float(mu)
        self.s = float(s)

    @classmethod
    def fit(cls, losses) -> "FoldedNormalCdf":
        arr = np.asarray(losses, dtype=float).ravel()
        if arr.size < 2:
            raise ValueError(
                f"folded-normal fit needs at least 2 samples, got {arr.size}"
            )
        mu = float(np.mean(arr))
        s = float(np.std(arr, ddof=1))
        return cls(mu, max(s, _MIN_SCALE))

    def cdf(self, u):
        arr = np.asarray(u, dtype=float)
        pos = ndtr((arr - self.mu) / self.s) - ndtr((-arr - self.mu) / self.s)
        out = np.where(arr < 0.0, 0.0, pos)
        return float(out) if np.isscalar(u) or arr.ndim == 0 else out

    def density(self, u):
        arr = np.asarray(u, dtype=float)
        val = (_phi((arr - self.mu) / self.s) + _phi((arr + self.mu) / self.s)) / self.s
        out = np.where(arr < 0.0, 0.0, val)
        return float(out) if np.isscalar(u) or arr.ndim == 0 else out


def dkw_band(m: int, delta: float) -> float:
    """Half-width eps such that P(sup_u |F_hat - F| > eps) <= delta for m samples.

    Refined Dvoretzky-Kiefer-Wolfowitz bound: eps = sqrt(log(2/delta) / (2 m)).
    """
    if m < 1:
        raise ValueError(f"sample size must be >= 1, got {m}")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"confidence level must lie in (0, 1), got {delta}")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * m))
