"""Risk functionals built on a spectrum: plug-in spectral risk, weighted-loss
stochastic estimates, Monte-Carlo smoothed risk, and a Catoni-type robust
location estimator for heavy-tailed validation samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectra import Spectrum

__all__ = [
    "CatoniConfig",
    "weighted_loss",
    "plugin_weights",
    "plugin_spectral_risk",
    "sample_ball",
    "smoothed_spectral_risk_mc",
    "catoni_estimate",
    "catoni_default_scale",
    "epsilon2_bound",
]


def weighted_loss(loss_value, cdf_at_loss, spec: Spectrum):
    """Spectrum-weighted loss ell * sigma(F(ell)); the basic stochastic estimate.

    Averaged over draws with the true loss CDF, this equals the spectral
    risk.  Accepts scalars or matching arrays.
    """
    return loss_value * spec.density(cdf_at_loss)


def plugin_weights(n: int, spec: Spectrum) -> np.ndarray:
    """Order-statistic weights W_i = integral of sigma over ((i-1)/n, i/n].

    Exact tail integrals rather than sigma(i/n) point evaluations, so the
    weights sum to 1 for every n and the CVaR case is handled without
    discretization error.
    """
    if n < 1:
        raise ValueError(f"need at least one loss, got n={n}")
    edges = np.arange(n + 1) / n
    return np.asarray(spec.tail_integral(edges[:-1], edges[1:]), dtype=float)


def plugin_spectral_risk(losses, spec: Spectrum) -> float:
    """L-statistic estimate: sorted losses weighted by exact spectrum mass."""
    arr = np.asarray(losses, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("cannot estimate spectral risk from an empty sample")
    return float(np.sort(arr) @ plugin_weights(arr.size, spec))


def sample_ball(d: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the L2 ball: sphere direction scaled by radius * u^(1/d)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    g = rng.standard_normal(d)
    g /= np.linalg.norm(g)
    return radius * rng.uniform() ** (1.0 / d) * g


def smoothed_spectral_risk_mc(
    w,
    delta: float,
    spec: Spectrum,
    oracle,
    n_ball: int,
    n_loss: int,
    rng: np.random.Generator,
) -> float:
    """Monte-Carlo estimate of the ball-smoothed spectral risk at w.

    ``oracle(point, n, rng)`` must return n fresh loss draws at the given
    parameter point.  The estimate averages the plug-in spectral risk over
    ``n_ball`` uniform perturbations of w inside the radius-``delta`` ball,
    each evaluated on ``n_loss`` fresh losses.
    """
    if not (0.0 < delta < 1.0):
        raise ValueError(f"smoothing radius must lie in (0, 1), got {delta}")
    if n_ball < 1 or n_loss < 1:
        raise ValueError("n_ball and n_loss must be positive")
    w = np.asarray(w, dtype=float)
    total = 0.0
    for _ in range(n_ball):
        v = w + sample_ball(w.size, delta, rng)
        total += plugin_spectral_risk(oracle(v, n_loss, rng), spec)
    return total / n_ball


@dataclass(frozen=True)
class CatoniConfig:
    """Scale and stopping parameters for the Catoni M-estimator."""

    scale_b: float
    max_iters: int = 200
    tol: float = 1e-10

    def __post_init__(self):
        if not (self.scale_b > 0.0):
            raise ValueError(f"scale_b must be positive, got {self.scale_b}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        if not (self.tol > 0.0):
            raise ValueError(f"tol must be positive, got {self.tol}")


def _catoni_psi(u: np.ndarray) -> np.ndarray:
    # narrowest Catoni influence: sign(u) * log(1 + |u| + u^2 / 2)
    a = np.abs(u)
    return np.sign(u) * np.log1p(a + 0.5 * a * a)


def catoni_estimate(samples, cfg: CatoniConfig) -> float:
    """Robust location estimate: the root of sum_i psi((a - x_i) / b).

    psi grows logarithmically, so single extreme samples move the root far
    less than they move the mean.  The root is bracketed on
    [min(x) - b, max(x) + b] and found by bisection.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot estimate location of an empty sample")

    b = cfg.scale_b

    def objective(a: float) -> float:
        return float(np.sum(_catoni_psi((a - x) / b)))

    lo = float(np.min(x)) - b
    hi = float(np.max(x)) + b
    f_lo = objective(lo)
    f_hi = objective(hi)
    if not (f_lo <= 0.0 <= f_hi):
        raise RuntimeError(
            f"catoni objective is not bracketed on [{lo}, {hi}]; input may be non-finite"
        )
    mid = 0.5 * (lo + hi)
    for _ in range(cfg.max_iters):
        f_mid = objective(mid)
        if abs(f_mid) <= cfg.tol:
            break
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
    return mid


def catoni_default_scale(variance_bound: float, n: int, delta: float) -> float:
    """Scale b = sqrt(n v / (2 (1 + log(2/delta)))) matching the deviation bound."""
    if not (variance_bound > 0.0):
        raise ValueError(f"variance bound must be positive, got {variance_bound}")
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"confidence level must lie in (0, 1), got {delta}")
    return math.sqrt(n * variance_bound / (2.0 * (1.0 + math.log(2.0 / delta))))


def epsilon2_bound(
    sigma_bar: float,
    lambda_sigma: float,
    s2: float,
    n: int,
    k: int,
    delta: float,
) -> float:
    """High-probability deviation radius for a validated candidate's risk estimate.

    With m = floor(n / (k+1)) holdout points per half, the estimate deviates
    from the candidate's true spectral risk by at most

        2 sigma_bar s2 sqrt(2 (1 + log(2/delta)) / m)
        + lambda_sigma s2 sqrt(log(4/delta) / m)

    where sigma_bar bounds the spectral density, lambda_sigma its Lipschitz
    constant, and s2 the loss second moment.
    """
    if not (sigma_bar > 0.0) or lambda_sigma < 0.0 or not (s2 > 0.0):
        raise ValueError("sigma_bar and s2 must be positive, lambda_sigma nonnegative")
    if not (0.0 < delta < 1.0):
        raise ValueError(f"confidence level must lie in (0, 1), got {delta}")
    m = n // (k + 1)
    if m < 1:
        raise ValueError(f"floor(n / (k+1)) must be >= 1, got n={n}, k={k}")
    catoni_term = 2.0 * sigma_bar * s2 * math.sqrt(2.0 * (1.0 + math.log(2.0 / delta)) / m)
    cdf_term = lambda_sigma * s2 * math.sqrt(math.log(4.0 / delta) / m)
    return catoni_term + cdf_term
