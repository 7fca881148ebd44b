"""Spectral-risk learning: derivative-free mirror descent, robust
confidence boosting, and a reproducible benchmark harness."""

__version__ = "0.1.0"

from .spectra import (
    CvarSpectrum,
    ExponentialSpectrum,
    Spectrum,
    UniformSpectrum,
    spectrum_from_name,
)
from .dist import EmpiricalCdf, FoldedNormalCdf, dkw_band
from .risk import (
    CatoniConfig,
    catoni_default_scale,
    catoni_estimate,
    epsilon2_bound,
    plugin_spectral_risk,
    plugin_weights,
    sample_ball,
    smoothed_spectral_risk_mc,
    weighted_loss,
)
from .losses import (
    Example,
    MulticlassLogistic,
    SyntheticLinear,
    SyntheticQuadratic,
    misclassification_rate,
)
from .optim import (
    EuclideanBall,
    IterateState,
    RunConfig,
    TheoryConstants,
    allocate_budget,
    default_step_size,
    df_gradient,
    fast_gradient,
    mirror_step,
    run_algorithm1,
    run_streaming,
    sample_sphere,
    theory_step_size,
)
from .boost import (
    BoostPlan,
    BoostResult,
    boost_select,
    candidates_k,
    make_boost_plan,
    run_boosted,
    validate_candidate,
)
from .data import (
    Dataset,
    convert_libsvm,
    load_delimited,
    load_schema,
    make_linabs_sampler,
    make_synthetic,
    split_shuffle,
    write_delimited,
)
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    run_experiment,
    summarize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
