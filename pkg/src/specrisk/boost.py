"""Confidence boosting: turn an in-expectation optimizer into a
high-probability one.

The budget is split into k training shares plus a holdout.  Each share
trains an independent candidate; the holdout is halved into a CDF part
(fits each candidate's loss ECDF) and an estimate part (spectrum-weighted
losses fed to the Catoni estimator).  The candidate with the smallest
robust risk estimate wins.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dist import EmpiricalCdf
from .optim import EuclideanBall, RunConfig, run_algorithm1, run_streaming
from .risk import CatoniConfig, catoni_default_scale, catoni_estimate, epsilon2_bound
from .spectra import Spectrum

__all__ = [
    "BoostPlan",
    "BoostResult",
    "candidates_k",
    "make_boost_plan",
    "validate_candidate",
    "boost_select",
    "run_boosted",
]

# keeps the Catoni scale positive when a candidate sees all-zero losses
_MIN_VARIANCE_BOUND = 1e-12


@dataclass(frozen=True)
class BoostPlan:
    """How an n-draw budget is carved into training shares and holdout halves."""

    k: int
    per_candidate_budget: int
    holdout_cdf_size: int
    holdout_estimate_size: int

    def total(self) -> int:
        return (
            self.k * self.per_candidate_budget
            + self.holdout_cdf_size
            + self.holdout_estimate_size
        )


@dataclass(frozen=True)
class BoostResult:
    plan: BoostPlan
    candidates: list
    estimates: np.ndarray
    index: int
    selected: np.ndarray
    epsilon2: float
    epsilon2_note: str | None = None


def candidates_k(delta: float) -> int:
    """Number of weak candidates ceil(log(2 ceil(log(1/delta)))), at least 1."""
    if not (0.0 < delta < 1.0):
        raise ValueError(f"confidence level must lie in (0, 1), got {delta}")
    inner = math.ceil(math.log(1.0 / delta))
    return max(1, math.ceil(math.log(2.0 * inner)))


def make_boost_plan(n: int, delta: float) -> BoostPlan:
    """Carve n draws for candidates_k(delta) candidates; errors when n is too small."""
    k = candidates_k(delta)
    share = n // (k + 1)
    half = share // 2
    if share < 1 or half < 1:
        raise ValueError(
            f"budget n={n} too small for k={k} candidates plus two holdout halves"
        )
    plan = BoostPlan(k, share, half, half)
    assert plan.total() <= n
    return plan


def validate_candidate(
    w: np.ndarray,
    cdf_losses,
    x_estimate: np.ndarray,
    y_estimate: np.ndarray,
    model,
    spec: Spectrum,
    cfg: CatoniConfig,
) -> float:
    """Robust estimate of a candidate's spectral risk from the two holdout halves.

    ``cdf_losses`` are the candidate's losses on the CDF half; the estimate
    half is mapped to spectrum-weighted losses ell * sigma(F_hat(ell)) and
    fed to the Catoni estimator.
    """
    ecdf = EmpiricalCdf.fit(cdf_losses)
    losses = model.batch_losses(w, x_estimate, y_estimate)
    weighted = losses * spec.density(ecdf(losses))
    return catoni_estimate(weighted, cfg)


def boost_select(candidates: list, estimates) -> tuple[int, np.ndarray]:
    """Argmin of the risk estimates; ties resolve to the lowest index."""
    if len(candidates) == 0:
        raise ValueError("no candidates to select from")
    est = np.asarray(estimates, dtype=float)
    if est.size != len(candidates):
        raise ValueError(
            f"{len(candidates)} candidates but {est.size} estimates"
        )
    idx = int(np.argmin(est))
    return idx, candidates[idx]


def run_boosted(
    model,
    sampler,
    spec: Spectrum,
    geom: EuclideanBall,
    cfg: RunConfig,
    n: int,
    delta: float,
    rng: np.random.Generator,
    w0=None,
) -> BoostResult:
    """Train k candidates on disjoint budget shares and keep the validated best.

    The training engine follows cfg.method, so the wrapper also applies to
    the first-order variants.  Deterministic given the generator: streams
    are pre-split into k candidate streams plus one holdout stream.
    """
    plan = make_boost_plan(n, delta)
    streams = rng.spawn(plan.k + 1)
    holdout_rng = streams[-1]

    candidates = []
    for j in range(plan.k):
        if cfg.method == "default":
            w_j = run_algorithm1(
                model, sampler, spec, geom, cfg, plan.per_candidate_budget, streams[j], w0
            )
        else:
            w_j = run_streaming(
                cfg.method, model, sampler, spec, geom, cfg,
                plan.per_candidate_budget, streams[j], w0,
            )
        candidates.append(w_j)

    x_cdf, y_cdf = sampler(plan.holdout_cdf_size, holdout_rng)
    x_est, y_est = sampler(plan.holdout_estimate_size, holdout_rng)

    sigma_bar = spec.upper_bound
    estimates = np.empty(plan.k)
    for j, w_j in enumerate(candidates):
        cdf_losses = model.batch_losses(w_j, x_cdf, y_cdf)
        s2_sq = float(np.mean(np.square(cdf_losses)))
        scale = catoni_default_scale(
            max(sigma_bar * sigma_bar * s2_sq, _MIN_VARIANCE_BOUND),
            plan.holdout_estimate_size,
            delta,
        )
        estimates[j] = validate_candidate(
            w_j, cdf_losses, x_est, y_est, model, spec, CatoniConfig(scale_b=scale)
        )
    index, selected = boost_select(candidates, estimates)
    cdf_losses = model.batch_losses(selected, x_cdf, y_cdf)
    s2_selected = float(np.mean(np.square(cdf_losses)))

    note = None
    lam = spec.lipschitz
    if lam is None:
        note = "spectrum density is not Lipschitz; epsilon2 omits its CDF-deviation term"
        warnings.warn(note)
        lam = 0.0
    eps2 = epsilon2_bound(
        sigma_bar,
        lam,
        math.sqrt(max(s2_selected, _MIN_VARIANCE_BOUND)),
        n,
        plan.k,
        delta,
    )
    return BoostResult(plan, candidates, estimates, index, selected, eps2, note)
