"""Mirror-descent optimizers for spectral risk.

Three update rules share one projected-step loop:

* ``default`` -- derivative-free: perturb the iterate along a random sphere
  direction, weight the perturbed loss by the spectrum evaluated at an
  ancillary empirical CDF, and scale by d/delta.
* ``fast``    -- first-order: chain-rule factor from a folded-normal CDF fit
  on the ancillary sample, applied to the exact loss gradient.
* ``off``     -- plain SGD on the unweighted loss; risk handling disabled.

``run_algorithm1`` (default) and ``run_streaming`` (fast/off) are
budget-driven: they consume exactly ``n_budget`` oracle draws and return
the average of the post-update iterates.  Each run splits its generator
into an ancillary stream and an update stream, so methods that skip
ancillary sampling still see the same update draws under a shared seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import EmpiricalCdf, FoldedNormalCdf
from .losses import as_example
from .risk import weighted_loss
from .spectra import Spectrum

__all__ = [
    "EuclideanBall",
    "TheoryConstants",
    "RunConfig",
    "IterateState",
    "sample_sphere",
    "df_gradient",
    "fast_gradient",
    "mirror_step",
    "allocate_budget",
    "theory_step_size",
    "default_step_size",
    "run_algorithm1",
    "run_streaming",
]

METHODS = ("default", "fast", "off")


class EuclideanBall:
    """Feasible set: the L2 ball of the given radius, with exact projection.

    The associated mirror map is 0.5 ||w||^2, so the mirror step is plain
    projected gradient descent.  ``diameter`` and ``bregman_range`` are the
    constants reported in run logs (2 r and 2 r^2).
    """

    strong_convexity = 1.0

    def __init__(self, radius: float):
        if not (radius > 0.0):
            raise ValueError(f"radius must be positive, got {radius}")
        self.radius = float(radius)
        self.diameter = 2.0 * self.radius
        self.bregman_range = 2.0 * self.radius * self.radius

    def project(self, w: np.ndarray) -> np.ndarray:
        nrm = float(np.linalg.norm(w))
        if nrm <= self.radius:
            return w
        return w * (self.radius / nrm)

    def contains(self, w: np.ndarray, slack: float = 1e-9) -> bool:
        return float(np.linalg.norm(w)) <= self.radius + slack


@dataclass(frozen=True)
class TheoryConstants:
    """Problem constants feeding the theoretical step size.

    lambda_r: weak-convexity modulus of the smoothed risk; s1, s2: loss
    first/second moment bounds; lambda_sigma: spectrum Lipschitz constant
    (None when unbounded, as for CVaR); delta_phi: Bregman range of the
    feasible set; mu: strong convexity of the mirror map.
    """

    lambda_r: float
    s1: float
    s2: float
    lambda_sigma: float | None
    delta_phi: float
    mu: float = 1.0


@dataclass(frozen=True)
class RunConfig:
    """Per-method run settings shared by the engines and the benchmark driver."""

    method: str
    step_size: float | str = "auto"
    smoothing_delta: float = 0.3
    ancillary_size: int = 2
    epochs: int = 50
    seed: int = 0
    theory_constants: TheoryConstants | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (0.0 < self.smoothing_delta < 1.0):
            raise ValueError(
                f"smoothing delta must lie in (0, 1), got {self.smoothing_delta}"
            )
        if self.ancillary_size < 2:
            raise ValueError(
                f"ancillary size must be >= 2, got {self.ancillary_size}"
            )
        if self.epochs < 0:
            raise ValueError(f"epochs must be nonnegative, got {self.epochs}")
        if isinstance(self.step_size, str):
            if self.step_size not in ("auto", "theory"):
                raise ValueError(
                    f"step_size must be a number, 'auto', or 'theory', got {self.step_size!r}"
                )
        elif not (self.step_size > 0.0):
            raise ValueError(f"step_size must be positive, got {self.step_size}")


@dataclass
class IterateState:
    """Current iterate plus the exact running sum of post-update iterates."""

    w: np.ndarray
    t: int = 0
    running_sum: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=float).copy()
        if self.running_sum is None:
            self.running_sum = np.zeros_like(self.w)

    def average(self) -> np.ndarray:
        if self.t < 1:
            raise ValueError("no updates taken yet; average undefined")
        return self.running_sum / self.t


def sample_sphere(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the unit sphere in R^d (normalized Gaussian)."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    g = rng.standard_normal(d)
    return g / np.linalg.norm(g)


def df_gradient(w, delta, U, z, model, cdf: EmpiricalCdf, spec: Spectrum) -> np.ndarray:
    """Derivative-free gradient estimate (d/delta) ell(w+dU;z) sigma(F(ell)) U.

    ``cdf`` must be the ancillary empirical CDF fit from losses at w itself;
    it is evaluated at the loss of the perturbed point.
    """
    if not (0.0 < delta < 1.0):
        raise ValueError(f"smoothing delta must lie in (0, 1), got {delta}")
    perturbed = model.loss(np.asarray(w, dtype=float) + delta * U, z)
    scale = (model.dim / delta) * weighted_loss(perturbed, cdf(perturbed), spec)
    return scale * U


def fast_gradient(w, z, model, cdf: FoldedNormalCdf, spec: Spectrum) -> np.ndarray:
    """First-order estimate [sigma(F(ell)) + ell sigma'(F(ell)) f(ell)] grad ell.

    Needs a differentiable spectrum; the CVaR step density is refused by
    ``density_derivative``.
    """
    ell = model.loss(w, z)
    F = cdf.cdf(ell)
    factor = spec.density(F) + ell * spec.density_derivative(F) * cdf.density(ell)
    return factor * model.gradient(w, z)


def mirror_step(state: IterateState, g, alpha: float, geom: EuclideanBall) -> IterateState:
    """Projected step w <- Pi(w - alpha g); advances counters in place."""
    if not (alpha > 0.0):
        raise ValueError(f"step size must be positive, got {alpha}")
    w_new = geom.project(state.w - alpha * np.asarray(g, dtype=float))
    state.w = w_new
    state.t += 1
    state.running_sum = state.running_sum + w_new
    return state


def allocate_budget(n: int) -> tuple[int, int]:
    """Split an n-draw budget into (M, T) = (ceil(sqrt n), floor(n / (1 + M)))."""
    if n < 1:
        raise ValueError(f"budget must be positive, got {n}")
    m = math.isqrt(n)
    if m * m < n:
        m += 1
    t = n // (1 + m)
    if t < 1:
        raise ValueError(f"budget n={n} too small for one step with M={m} ancillary draws")
    return m, t


def theory_step_size(
    constants: TheoryConstants, T: int, delta_smooth: float, d: int
) -> float:
    """Constant step mu / (lambda_r + 1/c_T) from the convergence guarantee.

    c_T = (delta/d) sqrt(2 Delta_Phi mu / (T (s1^2 + (lambda_sigma s2)^2))).
    """
    if constants.lambda_sigma is None:
        raise ValueError(
            "theory step size needs a Lipschitz spectrum; CVaR has an unbounded density"
        )
    if T < 1 or d < 1:
        raise ValueError(f"T and d must be positive, got T={T}, d={d}")
    if not (0.0 < delta_smooth < 1.0):
        raise ValueError(f"smoothing delta must lie in (0, 1), got {delta_smooth}")
    variance = constants.s1**2 + (constants.lambda_sigma * constants.s2) ** 2
    c_t = (delta_smooth / d) * math.sqrt(
        2.0 * constants.delta_phi * constants.mu / (T * variance)
    )
    return constants.mu / (constants.lambda_r + 1.0 / c_t)


def default_step_size(method: str, n: int, d: int, gamma: float = 1.0) -> float:
    """Benchmark defaults: 2 gamma / (d sqrt n) for default, 2 / sqrt n otherwise."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if n < 1 or d < 1:
        raise ValueError(f"n and d must be positive, got n={n}, d={d}")
    if not (gamma > 0.0):
        raise ValueError(f"gamma must be positive, got {gamma}")
    if method == "default":
        return 2.0 * gamma / (d * math.sqrt(n))
    return 2.0 / math.sqrt(n)


def _resolve_step(cfg: RunConfig, T: int, d: int) -> float:
    if cfg.step_size == "theory":
        if cfg.theory_constants is None:
            raise ValueError("step_size 'theory' requires theory_constants")
        return theory_step_size(cfg.theory_constants, T, cfg.smoothing_delta, d)
    if isinstance(cfg.step_size, str):
        raise ValueError(
            "engine needs a resolved numeric step size (or 'theory' with constants); "
            f"got {cfg.step_size!r}"
        )
    return float(cfg.step_size)


def run_algorithm1(
    model,
    sampler,
    spec: Spectrum,
    geom: EuclideanBall,
    cfg: RunConfig,
    n_budget: int,
    rng: np.random.Generator,
    w0=None,
    trace: list | None = None,
) -> np.ndarray:
    """Derivative-free mirror descent under a spectral risk; returns the iterate average.

    ``sampler(k, rng)`` must return (X, y) with k fresh draws.  Each of the
    T = n_budget // (M + 1) steps refits an empirical CDF from M ancillary
    losses at the current iterate, then takes one projected step along a
    sphere direction.  Exactly T (M + 1) draws are consumed.
    """
    if cfg.method != "default":
        raise ValueError(f"run_algorithm1 drives the 'default' method, got {cfg.method!r}")
    m = cfg.ancillary_size
    T = n_budget // (m + 1)
    if T < 1:
        raise ValueError(
            f"budget {n_budget} too small for one step with M={m} ancillary draws"
        )
    d = model.dim
    alpha = _resolve_step(cfg, T, d)
    delta = cfg.smoothing_delta
    ancillary_rng, update_rng = rng.spawn(2)

    state = IterateState(np.zeros(d) if w0 is None else w0)
    for _ in range(T):
        xa, ya = sampler(m, ancillary_rng)
        ecdf = EmpiricalCdf.fit(model.batch_losses(state.w, xa, ya))
        u = sample_sphere(d, update_rng)
        xz, yz = sampler(1, update_rng)
        z = as_example(model, xz[0], yz[0])
        g = df_gradient(state.w, delta, u, z, model, ecdf, spec)
        mirror_step(state, g, alpha, geom)
        if trace is not None:
            trace.append(state.w.copy())
    return state.average()


def run_streaming(
    method: str,
    model,
    sampler,
    spec: Spectrum,
    geom: EuclideanBall,
    cfg: RunConfig,
    n_budget: int,
    rng: np.random.Generator,
    w0=None,
    trace: list | None = None,
) -> np.ndarray:
    """First-order variants: ``fast`` (folded-normal reweighting) and ``off`` (plain SGD).

    ``fast`` consumes M + 1 draws per step like the derivative-free engine;
    ``off`` consumes one draw per step, so T = n_budget.  Both split the
    generator exactly as ``run_algorithm1`` does, which keeps the update
    draw sequence shared across methods under one seed.
    """
    if method not in ("fast", "off"):
        raise ValueError(f"run_streaming drives 'fast' or 'off', got {method!r}")
    d = model.dim
    m = cfg.ancillary_size
    T = n_budget if method == "off" else n_budget // (m + 1)
    if T < 1:
        raise ValueError(f"budget {n_budget} allows no steps for method {method!r}")
    alpha = _resolve_step(cfg, T, d)
    ancillary_rng, update_rng = rng.spawn(2)

    state = IterateState(np.zeros(d) if w0 is None else w0)
    for _ in range(T):
        if method == "fast":
            xa, ya = sampler(m, ancillary_rng)
            folded = FoldedNormalCdf.fit(model.batch_losses(state.w, xa, ya))
        xz, yz = sampler(1, update_rng)
        z = as_example(model, xz[0], yz[0])
        if method == "fast":
            g = fast_gradient(state.w, z, model, folded, spec)
        else:
            g = model.gradient(state.w, z)
        mirror_step(state, g, alpha, geom)
        if trace is not None:
            trace.append(state.w.copy())
    return state.average()
