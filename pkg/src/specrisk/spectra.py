"""Risk spectra: the weighting densities on quantile levels.

A spectrum is a nonnegative, nondecreasing density sigma on [0, 1] that
integrates to one.  Larger weight on high quantile levels means more
aversion to extreme losses.  Three families are provided:

* ``ExponentialSpectrum(c)`` -- sigma(u) = c * exp(-c (1 - u)) / (1 - exp(-c))
* ``CvarSpectrum(beta)``     -- sigma(u) = 1{beta < u <= 1} / (1 - beta)
* ``UniformSpectrum()``      -- sigma(u) = 1 (plain expected value)

Instances are immutable and safe to share across threads.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "Spectrum",
    "ExponentialSpectrum",
    "CvarSpectrum",
    "UniformSpectrum",
    "spectrum_from_name",
]


def _check_unit_interval(u) -> np.ndarray:
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError(f"quantile level must lie in [0, 1], got {u!r}")
    return arr


class Spectrum:
    """Common interface for spectral densities.

    Attributes
    ----------
    lipschitz : float or None
        Lipschitz constant of the density on [0, 1]; ``None`` marks an
        unbounded (discontinuous) density, as for CVaR.  Kept as a tagged
        value rather than ``inf`` so theory-mode step sizes can refuse it
        cleanly.
    upper_bound : float
        sup of the density on [0, 1].
    """

    name: str
    lipschitz: float | None
    upper_bound: float

    def density(self, u):
        """Evaluate sigma(u) for u in [0, 1] (scalar or array)."""
        raise NotImplementedError

    def density_derivative(self, u):
        """Evaluate sigma'(u); raises ValueError for non-differentiable kinds."""
        raise NotImplementedError

    def tail_integral(self, a, b):
        """Exact integral of sigma over [a, b] for 0 <= a <= b <= 1 (vectorized)."""
        raise NotImplementedError

    def cli_label(self) -> str:
        return self.name


class ExponentialSpectrum(Spectrum):
    """sigma(u) = c * exp(-c (1 - u)) / (1 - exp(-c)) with c > 0."""

    def __init__(self, c: float):
        if not (c > 0.0) or not math.isfinite(c):
            raise ValueError(f"exponential spectrum needs c > 0, got {c}")
        self.c = float(c)
        self._norm = 1.0 - math.exp(-self.c)
        self.name = f"exp(c={self.c:g})"
        # density is increasing, so |sigma'| peaks at u = 1
        self.lipschitz = self.c * self.c / self._norm
        self.upper_bound = self.c / self._norm

    def density(self, u):
        arr = _check_unit_interval(u)
        out = self.c * np.exp(-self.c * (1.0 - arr)) / self._norm
        return float(out) if np.isscalar(u) or arr.ndim == 0 else out

    def density_derivative(self, u):
        arr = _check_unit_interval(u)
        out = self.c * self.c * np.exp(-self.c * (1.0 - arr)) / self._norm
        return float(out) if np.isscalar(u) or arr.ndim == 0 else out

    def tail_integral(self, a, b):
        a = _check_unit_interval(a)
        b = _check_unit_interval(b)
        return (np.exp(-self.c * (1.0 - b)) - np.exp(-self.c * (1.0 - a))) / self._norm


class CvarSpectrum(Spectrum):
    """Step density 1{beta < u <= 1} / (1 - beta); recovers CVaR at level beta.

    The right-open convention sigma(beta) = 0 matches the defining
    indicator.  The step makes the density discontinuous, so ``lipschitz``
    is ``None`` (unbounded) and ``density_derivative`` is refused.
    """

    def __init__(self, beta: float):
        if not (0.0 <= beta < 1.0):
            raise ValueError(f"cvar level must satisfy 0 <= beta < 1, got {beta}")
        self.beta = float(beta)
        self.name = f"cvar(beta={self.beta:g})"
        self.lipschitz = None
        self.upper_bound = 1.0 / (1.0 - self.beta)

    def density(self, u):
        arr = _check_unit_interval(u)
        out = np.where(arr > self.beta, self.upper_bound, 0.0)
        return float(out) if np.isscalar(u) or arr.ndim == 0 else out

    def density_derivative(self, u):
        raise ValueError("cvar spectrum has no classical derivative (step density)")

    def tail_integral(self, a, b):
        a = _check_unit_interval(a)
        b = _check_unit_interval(b)
        return np.clip(b - np.maximum(a, self.beta), 0.0, None) / (1.0 - self.beta)


class UniformSpectrum(Spectrum):
    """sigma(u) = 1: spectral risk reduces to the expected loss."""

    def __init__(self):
        self.name = "uniform"
        self.lipschitz = 0.0
        self.upper_bound = 1.0

    def density(self, u):
        arr = _check_unit_interval(u)
        out = np.ones_like(arr)
        return float(out) if np.isscalar(u) or arr.ndim == 0 else out

    def density_derivative(self, u):
        arr = _check_unit_interval(u)
        out = np.zeros_like(arr)
        return float(out) if np.isscalar(u) or arr.ndim == 0 else out

    def tail_integral(self, a, b):
        a = _check_unit_interval(a)
        b = _check_unit_interval(b)
        return b - a


def spectrum_from_name(
    name: str, c: float | None = None, beta: float | None = None
) -> Spectrum:
    """Build a spectrum from CLI-style arguments (``exp``, ``cvar``, ``uniform``)."""
    key = name.strip().lower()
    if key in ("exp", "exponential"):
        if c is None:
            raise ValueError("--spectrum exp requires --spec-c")
        return ExponentialSpectrum(c)
    if key == "cvar":
        if beta is None:
            raise ValueError("--spectrum cvar requires --spec-beta")
        return CvarSpectrum(beta)
    if key == "uniform":
        return UniformSpectrum()
    raise ValueError(f"unknown spectrum kind {name!r} (expected exp, cvar, or uniform)")
