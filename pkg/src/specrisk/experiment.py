"""Benchmark driver: per-method training over trials and epochs, metric
logging, and CSV emission.

Each trial shuffles and splits the dataset, draws one shared random initial
point, runs every enabled method for the configured number of epochs, and
records the plug-in spectral risk (plus misclassification for classifiers)
on both splits after every epoch, including epoch 0 before any update.
Trials are independent and may fan out across processes; rows are gathered
and sorted so the output bytes do not depend on scheduling.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .boost import run_boosted
from .data import Dataset, load_delimited, load_schema, make_synthetic, split_shuffle
from .losses import MulticlassLogistic, SyntheticLinear, misclassification_rate
from .optim import (
    METHODS,
    EuclideanBall,
    IterateState,
    RunConfig,
    default_step_size,
    df_gradient,
    fast_gradient,
    mirror_step,
    sample_sphere,
)
from .dist import EmpiricalCdf, FoldedNormalCdf
from .risk import plugin_spectral_risk, sample_ball
from .spectra import spectrum_from_name

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "TRAJECTORY_HEADER",
    "SUMMARY_HEADER",
    "resolve_ancillary",
    "run_experiment",
    "summarize",
    "read_trajectories",
    "write_trajectories",
    "write_summary",
]

TRAJECTORY_HEADER = ("trial", "epoch", "split", "metric", "method", "value")
SUMMARY_HEADER = ("method", "epoch", "split", "metric", "mean", "std")


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat, picklable benchmark settings; one instance drives a whole run."""

    data_path: str | None = None
    schema_path: str | None = None
    synthetic: str | None = None
    synthetic_n: int = 5000
    synthetic_d: int = 2
    synthetic_noise: float = 0.1
    methods: tuple = ("default", "fast", "off")
    spectrum: str = "exp"
    spec_c: float = 1.0
    spec_beta: float = 0.95
    epochs: int = 50
    trials: int = 10
    seed: int = 0
    test_fraction: float = 0.2
    radius: float = 100.0
    gamma: float = 1.0
    smoothing_delta: float = 0.3
    ancillary: str = "auto"
    boost: bool = False
    boost_delta: float = 0.05
    jobs: int = 1
    out: str = "results"


@dataclass(frozen=True)
class ExperimentResult:
    trajectories_path: str
    summary_path: str
    runlog_path: str
    n_rows: int


def validate_config(cfg: ExperimentConfig) -> None:
    if (cfg.data_path is None) == (cfg.synthetic is None):
        raise ValueError("exactly one data source is required: --data or --synthetic")
    if cfg.data_path is not None and cfg.schema_path is None:
        raise ValueError("--data requires --schema")
    if not cfg.methods:
        raise ValueError("at least one method must be enabled")
    for m in cfg.methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
    if len(set(cfg.methods)) != len(cfg.methods):
        raise ValueError(f"duplicate method in {cfg.methods}")
    if cfg.epochs < 0:
        raise ValueError(f"epochs must be nonnegative, got {cfg.epochs}")
    if cfg.trials < 1:
        raise ValueError(f"trials must be >= 1, got {cfg.trials}")
    if not (0.0 < cfg.test_fraction < 1.0):
        raise ValueError(f"test fraction must lie in (0, 1), got {cfg.test_fraction}")
    if not (cfg.radius > 0.0):
        raise ValueError(f"radius must be positive, got {cfg.radius}")
    if not (cfg.gamma > 0.0):
        raise ValueError(f"gamma must be positive, got {cfg.gamma}")
    if not (0.0 < cfg.smoothing_delta < 1.0):
        raise ValueError(
            f"smoothing delta must lie in (0, 1), got {cfg.smoothing_delta}"
        )
    if cfg.ancillary != "auto":
        try:
            m = int(cfg.ancillary)
        except ValueError:
            raise ValueError(
                f"--ancillary must be 'auto' or an integer >= 2, got {cfg.ancillary!r}"
            ) from None
        if m < 2:
            raise ValueError(f"--ancillary must be >= 2, got {m}")
    if cfg.boost and not (0.0 < cfg.boost_delta < 1.0):
        raise ValueError(f"--delta must lie in (0, 1), got {cfg.boost_delta}")
    if cfg.jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {cfg.jobs}")


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    if cfg.synthetic is not None:
        return make_synthetic(
            cfg.synthetic, cfg.synthetic_n, cfg.synthetic_d, cfg.synthetic_noise, cfg.seed
        )
    return load_delimited(cfg.data_path, load_schema(cfg.schema_path))


def resolve_ancillary(cfg: ExperimentConfig, n_train: int) -> int:
    if cfg.ancillary == "auto":
        m = math.isqrt(n_train)
        if m * m < n_train:
            m += 1
        return max(m, 2)
    return int(cfg.ancillary)


def _build_model(ds: Dataset):
    if ds.task == "classification":
        return MulticlassLogistic(ds.n_classes, ds.n_features)
    return SyntheticLinear(ds.n_features)


def _metric_values(model, w, ds: Dataset, spec) -> list:
    out = [("spectral_risk", plugin_spectral_risk(model.batch_losses(w, ds.X, ds.y), spec))]
    if ds.task == "classification":
        out.append(("misclass", misclassification_rate(model, w, ds.X, ds.y)))
    return out


class _PoolSampler:
    """Sequential draws from a fixed pool; positional, so disjoint across calls."""

    def __init__(self, X: np.ndarray, y: np.ndarray):
        self.X = X
        self.y = y
        self.cursor = 0

    def __call__(self, k: int, rng):
        end = self.cursor + k
        if end > len(self.X):
            raise ValueError(
                f"training pool exhausted: requested {k}, have {len(self.X) - self.cursor}"
            )
        sl = slice(self.cursor, end)
        self.cursor = end
        return self.X[sl], self.y[sl]


def _fmt(x: float) -> str:
    return repr(float(x))


def _trial_worker(args) -> tuple:
    cfg, ds, trial = args
    spec = spectrum_from_name(cfg.spectrum, cfg.spec_c, cfg.spec_beta)
    split_rng = np.random.default_rng([cfg.seed, trial, 0])
    train, test = split_shuffle(ds, cfg.test_fraction, split_rng)
    model = _build_model(train)
    geom = EuclideanBall(cfg.radius)
    d = model.dim
    n_train = len(train)
    m_anc = resolve_ancillary(cfg, n_train)
    delta = cfg.smoothing_delta

    init_rng = np.random.default_rng([cfg.seed, trial, 1])
    w0 = sample_ball(d, min(1.0, cfg.radius), init_rng)

    examples = train.examples()
    records = []
    log_lines = []
    for method in cfg.methods:
        method_idx = METHODS.index(method)
        method_rng = np.random.default_rng([cfg.seed, trial, 2, method_idx])
        alpha = default_step_size(method, n_train, d, cfg.gamma)
        state = IterateState(w0)

        def record(epoch: int, w: np.ndarray):
            for split_name, split_ds in (("train", train), ("test", test)):
                for metric, value in _metric_values(model, w, split_ds, spec):
                    records.append((trial, epoch, split_name, metric, method, value))

        record(0, state.w)
        for epoch in range(1, cfg.epochs + 1):
            perm = method_rng.permutation(n_train)
            if method == "off":
                for i in perm:
                    g = model.gradient(state.w, examples[i])
                    mirror_step(state, g, alpha, geom)
            else:
                pos = 0
                while pos + m_anc + 1 <= n_train:
                    idx = perm[pos : pos + m_anc]
                    losses = model.batch_losses(state.w, train.X[idx], train.y[idx])
                    z = examples[perm[pos + m_anc]]
                    if method == "default":
                        ecdf = EmpiricalCdf.fit(losses)
                        u = sample_sphere(d, method_rng)
                        g = df_gradient(state.w, delta, u, z, model, ecdf, spec)
                    else:
                        folded = FoldedNormalCdf.fit(losses)
                        g = fast_gradient(state.w, z, model, folded, spec)
                    mirror_step(state, g, alpha, geom)
                    pos += m_anc + 1
            record(epoch, state.w)

        if cfg.boost:
            boost_rng = np.random.default_rng([cfg.seed, trial, 3, method_idx])
            perm = boost_rng.permutation(n_train)
            sampler = _PoolSampler(train.X[perm], train.y[perm])
            run_cfg = RunConfig(
                method=method,
                step_size=alpha,
                smoothing_delta=delta,
                ancillary_size=m_anc,
                seed=cfg.seed,
            )
            result = run_boosted(
                model, sampler, spec, geom, run_cfg, n_train, cfg.boost_delta,
                boost_rng, w0,
            )
            plan = result.plan
            log_lines.append(
                f"boost trial={trial} method={method}: k={plan.k} "
                f"share={plan.per_candidate_budget} "
                f"holdout_halves={plan.holdout_cdf_size}/{plan.holdout_estimate_size}"
            )
            table = ", ".join(
                f"R[{j}]={_fmt(v)}" for j, v in enumerate(result.estimates)
            )
            log_lines.append(f"boost trial={trial} method={method}: {table}")
            log_lines.append(
                f"boost trial={trial} method={method}: selected={result.index} "
                f"epsilon2={_fmt(result.epsilon2)}"
            )
            if result.epsilon2_note:
                log_lines.append(
                    f"boost trial={trial} method={method}: note: {result.epsilon2_note}"
                )
            for split_name, split_ds in (("train", train), ("test", test)):
                parts = " ".join(
                    f"{metric}={_fmt(value)}"
                    for metric, value in _metric_values(model, result.selected, split_ds, spec)
                )
                log_lines.append(
                    f"boost trial={trial} method={method}: selected {split_name}: {parts}"
                )
    return trial, records, log_lines


def summarize(records) -> list:
    """Per (method, epoch, split, metric): mean and std over trials (ddof=1)."""
    if not records:
        raise ValueError("no trajectory records to summarize")
    groups: dict = {}
    for trial, epoch, split, metric, method, value in records:
        groups.setdefault((method, epoch, split, metric), []).append(value)
    out = []
    for key in sorted(groups):
        vals = np.asarray(groups[key], dtype=float)
        std = float(np.std(vals, ddof=1)) if vals.size > 1 else 0.0
        out.append(key + (float(np.mean(vals)), std))
    return out


def read_trajectories(path) -> list:
    """Load trajectories.csv back into record tuples; checks the header."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        if header != TRAJECTORY_HEADER:
            missing = [c for c in TRAJECTORY_HEADER if c not in header]
            raise ValueError(
                f"{path}: header mismatch; missing column(s) {missing or list(header)}"
            )
        records = []
        for row in reader:
            trial, epoch, split, metric, method, value = row
            records.append((int(trial), int(epoch), split, metric, method, float(value)))
    if not records:
        raise ValueError(f"{path}: no data rows")
    return records


def write_trajectories(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(TRAJECTORY_HEADER) + "\n")
        for trial, epoch, split, metric, method, value in records:
            fh.write(f"{trial},{epoch},{split},{metric},{method},{_fmt(value)}\n")


def write_summary(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(SUMMARY_HEADER) + "\n")
        for method, epoch, split, metric, mean, std in rows:
            fh.write(f"{method},{epoch},{split},{metric},{_fmt(mean)},{_fmt(std)}\n")


def _runlog_lines(cfg: ExperimentConfig, ds: Dataset, trial_logs: list) -> list:
    geom = EuclideanBall(cfg.radius)
    lines = ["specrisk run log", "", "[config]"]
    for key, value in sorted(asdict(cfg).items()):
        lines.append(f"{key} = {value}")
    n = len(ds)
    n_test = int(math.floor(n * cfg.test_fraction))
    n_train = n - n_test
    m_anc = resolve_ancillary(cfg, n_train)
    lines += [
        "",
        "[data]",
        f"rows = {n}",
        f"train = {n_train}",
        f"test = {n_test}",
        f"features = {ds.n_features}",
        f"classes = {ds.n_classes}",
        f"task = {ds.task}",
        "",
        "[geometry]",
        f"radius = {_fmt(geom.radius)}",
        f"diameter = {_fmt(geom.diameter)}",
        f"bregman_range = {_fmt(geom.bregman_range)}",
        "",
        "[methods]",
    ]
    model = _build_model(ds)
    steps_per_epoch = n_train // (m_anc + 1)
    for method in cfg.methods:
        alpha = default_step_size(method, n_train, model.dim, cfg.gamma)
        if method == "off":
            lines.append(
                f"{method}: step_size = {_fmt(alpha)}, steps_per_epoch = {n_train}"
            )
        else:
            lines.append(
                f"{method}: step_size = {_fmt(alpha)}, ancillary = {m_anc}, "
                f"steps_per_epoch = {steps_per_epoch}"
            )
    if trial_logs:
        lines += ["", "[boost]"]
        lines.extend(trial_logs)
    return lines


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Run every (trial, method) pair and emit trajectories, summary, and run log."""
    validate_config(cfg)
    ds = load_dataset(cfg)
    n = len(ds)
    n_train = n - int(math.floor(n * cfg.test_fraction))
    m_anc = resolve_ancillary(cfg, n_train)
    if any(m in ("default", "fast") for m in cfg.methods) and n_train < m_anc + 1:
        raise ValueError(
            f"training split of {n_train} rows cannot fill an ancillary block of "
            f"{m_anc}; lower --ancillary or add data"
        )

    tasks = [(cfg, ds, trial) for trial in range(cfg.trials)]
    if cfg.jobs > 1 and cfg.trials > 1:
        with ProcessPoolExecutor(max_workers=min(cfg.jobs, cfg.trials)) as pool:
            outputs = list(pool.map(_trial_worker, tasks))
    else:
        outputs = [_trial_worker(t) for t in tasks]
    outputs.sort(key=lambda item: item[0])

    records = []
    trial_logs = []
    for _, trial_records, trial_log in outputs:
        records.extend(trial_records)
        trial_logs.extend(trial_log)
    records.sort(key=lambda r: (r[0], r[1], r[4], r[2], r[3]))

    os.makedirs(cfg.out, exist_ok=True)
    traj_path = os.path.join(cfg.out, "trajectories.csv")
    summary_path = os.path.join(cfg.out, "summary.csv")
    runlog_path = os.path.join(cfg.out, "runlog.txt")
    write_trajectories(records, traj_path)
    write_summary(summarize(records), summary_path)
    with open(runlog_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(_runlog_lines(cfg, ds, trial_logs)) + "\n")
    return ExperimentResult(traj_path, summary_path, runlog_path, len(records))
