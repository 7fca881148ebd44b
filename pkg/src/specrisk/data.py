"""Dataset ingestion and synthetic task generation.

Input is header-bearing delimited text plus a flat key-value schema that
assigns each column a role: ``numeric``, ``categorical``, or ``label``
(exactly one label column).  Categoricals become one-hot indicator blocks,
numerics are min-max scaled to the unit interval, labels are relabeled to
contiguous class indices.  Splitting reshuffles with a seeded generator
and refits the scaling on the training part only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .losses import Example

__all__ = [
    "Dataset",
    "load_schema",
    "load_delimited",
    "write_delimited",
    "split_shuffle",
    "make_synthetic",
    "make_linabs_sampler",
    "fit_scaling",
    "apply_scaling",
    "convert_libsvm",
]

ROLES = ("numeric", "categorical", "label")

# column kinds after encoding: "numeric" columns are min-max scaled,
# "indicator" columns (one-hot blocks, bias terms) pass through untouched
_SCALED = "numeric"
_KEPT = "indicator"

_RANGE_EPS = 1e-300


@dataclass
class Dataset:
    """Feature matrix plus labels or targets, with the scaling that produced X."""

    X: np.ndarray
    y: np.ndarray
    task: str  # "classification" or "regression"
    n_classes: int
    feature_names: list
    column_kinds: list
    raw: np.ndarray
    scaling: np.ndarray  # (p, 2) per-column (min, max) fitted on training data

    def __len__(self) -> int:
        return len(self.X)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def examples(self) -> list:
        if self.task == "classification":
            return [Example(self.X[i], label=int(self.y[i])) for i in range(len(self))]
        return [Example(self.X[i], target=float(self.y[i])) for i in range(len(self))]


def fit_scaling(raw: np.ndarray, kinds) -> np.ndarray:
    """Per-column (min, max) over the given rows; identity for kept columns."""
    scaling = np.empty((raw.shape[1], 2))
    for j, kind in enumerate(kinds):
        if kind == _SCALED:
            scaling[j] = (raw[:, j].min(), raw[:, j].max())
        else:
            scaling[j] = (0.0, 1.0)
    return scaling


def apply_scaling(raw: np.ndarray, scaling: np.ndarray, kinds, clamp: bool) -> np.ndarray:
    """Min-max transform; constant columns map to 0.5; optional clamp to [0, 1]."""
    X = raw.astype(float).copy()
    for j, kind in enumerate(kinds):
        if kind != _SCALED:
            continue
        lo, hi = scaling[j]
        span = hi - lo
        if span <= _RANGE_EPS:
            X[:, j] = 0.5
            continue
        X[:, j] = (X[:, j] - lo) / span
        if clamp:
            X[:, j] = np.clip(X[:, j], 0.0, 1.0)
    return X


def load_schema(path) -> dict:
    """Parse a flat key-value role file: one ``column = role`` pair per line."""
    schema = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ValueError(
                    f"{path}: line {lineno}: expected 'column = role', got {stripped!r}"
                )
            key, _, value = stripped.partition("=")
            name, role = key.strip(), value.strip()
            if role not in ROLES:
                raise ValueError(
                    f"{path}: line {lineno}: role for {name!r} must be one of {ROLES}, "
                    f"got {role!r}"
                )
            if name in schema:
                raise ValueError(f"{path}: line {lineno}: duplicate column {name!r}")
            schema[name] = role
    if not schema:
        raise ValueError(f"{path}: schema file defines no columns")
    return schema


def _sorted_levels(values) -> list:
    return sorted(set(values))


def _relabel(raw_labels) -> tuple[np.ndarray, list]:
    levels = set(raw_labels)
    try:
        ordered = sorted(levels, key=float)
    except ValueError:
        ordered = sorted(levels)
    index = {lvl: i for i, lvl in enumerate(ordered)}
    return np.array([index[v] for v in raw_labels], dtype=int), ordered


def load_delimited(path, schema: dict, delimiter: str = ",") -> Dataset:
    """Read a delimited file into a scaled classification Dataset.

    Unparseable numeric fields and short rows are rejected with the file
    line number and column name.  Categorical levels are taken from the
    file, sorted lexicographically, one indicator column per level.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        missing = [name for name in header if name not in schema]
        if missing:
            raise ValueError(f"{path}: no schema role for column(s) {missing}")
        extra = [name for name in schema if name not in header]
        if extra:
            raise ValueError(f"{path}: schema names absent column(s) {extra}")
        label_cols = [name for name in header if schema[name] == "label"]
        if len(label_cols) != 1:
            raise ValueError(
                f"{path}: need exactly one label column, found {label_cols or 'none'}"
            )

        columns: dict = {name: [] for name in header}
        n_rows = 0
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            for name, field_value in zip(header, row):
                field_value = field_value.strip()
                if schema[name] == "numeric":
                    try:
                        columns[name].append(float(field_value))
                    except ValueError:
                        raise ValueError(
                            f"{path}: line {lineno}: column {name!r}: "
                            f"cannot parse {field_value!r} as a number"
                        ) from None
                else:
                    columns[name].append(field_value)
            n_rows += 1
    if n_rows == 0:
        raise ValueError(f"{path}: file has a header but no data rows")

    blocks, names, kinds = [], [], []
    for name in header:
        role = schema[name]
        if role == "label":
            continue
        if role == "numeric":
            blocks.append(np.array(columns[name], dtype=float)[:, None])
            names.append(name)
            kinds.append(_SCALED)
        else:
            levels = _sorted_levels(columns[name])
            blocks.append(_encode_onehot(columns[name], levels))
            names.extend(f"{name}={lvl}" for lvl in levels)
            kinds.extend(_KEPT for _ in levels)
    raw = np.hstack(blocks)
    y, _ = _relabel(columns[label_cols[0]])
    scaling = fit_scaling(raw, kinds)
    X = apply_scaling(raw, scaling, kinds, clamp=False)
    return Dataset(X, y, "classification", int(y.max()) + 1, names, kinds, raw, scaling)


def _encode_onehot(values, levels) -> np.ndarray:
    """Indicator block with one column per known level; unknown rows are all zero."""
    index = {lvl: i for i, lvl in enumerate(levels)}
    block = np.zeros((len(values), len(levels)))
    for i, v in enumerate(values):
        j = index.get(v)
        if j is not None:
            block[i, j] = 1.0
    return block


def write_delimited(ds: Dataset, path, delimiter: str = ",") -> None:
    """Write the scaled features plus label/target column; exact float round-trip."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(list(ds.feature_names) + ["label"])
        for i in range(len(ds)):
            row = [repr(float(v)) for v in ds.X[i]]
            if ds.task == "classification":
                row.append(str(int(ds.y[i])))
            else:
                row.append(repr(float(ds.y[i])))
            writer.writerow(row)


def split_shuffle(ds: Dataset, test_fraction: float, seed) -> tuple[Dataset, Dataset]:
    """Shuffle, split, refit scaling on the training part, clamp the test part."""
    if not (0.0 < test_fraction < 1.0):
        raise ValueError(f"test fraction must lie in (0, 1), got {test_fraction}")
    n = len(ds)
    n_test = int(math.floor(n * test_fraction))
    n_train = n - n_test
    if n_test < 1 or n_train < 1:
        raise ValueError(
            f"split of {n} rows at fraction {test_fraction} leaves an empty part"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    perm = rng.permutation(n)
    train_idx, test_idx = perm[:n_train], perm[n_train:]

    raw_train, raw_test = ds.raw[train_idx], ds.raw[test_idx]
    scaling = fit_scaling(raw_train, ds.column_kinds)
    train = Dataset(
        apply_scaling(raw_train, scaling, ds.column_kinds, clamp=False),
        ds.y[train_idx],
        ds.task,
        ds.n_classes,
        ds.feature_names,
        ds.column_kinds,
        raw_train,
        scaling,
    )
    test = Dataset(
        apply_scaling(raw_test, scaling, ds.column_kinds, clamp=True),
        ds.y[test_idx],
        ds.task,
        ds.n_classes,
        ds.feature_names,
        ds.column_kinds,
        raw_test,
        scaling,
    )
    return train, test


def _default_w_star(d: int) -> np.ndarray:
    return np.linspace(0.5, -0.3, num=d)


def _linabs_draw(k: int, d: int, noise: float, w_star: np.ndarray, rng) -> tuple:
    x = rng.uniform(-1.0, 1.0, size=(k, d))
    eps = rng.lognormal(mean=0.0, sigma=noise, size=k)
    return x, x @ w_star + eps


def make_linabs_sampler(d: int, noise: float = 1.0, w_star=None):
    """Infinite sampler for the linear absolute-deviation task.

    Features are uniform on [-1, 1]^d; targets add lognormal(0, noise)
    noise to <w*, x>, so losses are heavy-tailed.  Returns a callable
    ``sampler(k, rng) -> (X, y)`` for the budget-driven engines.
    """
    w_star = _default_w_star(d) if w_star is None else np.asarray(w_star, dtype=float)
    if w_star.size != d:
        raise ValueError(f"w_star has length {w_star.size}, expected {d}")

    def sampler(k: int, rng: np.random.Generator):
        return _linabs_draw(k, d, noise, w_star, rng)

    return sampler


def make_synthetic(kind: str, n: int, d: int = 2, noise: float = 0.1, seed=0) -> Dataset:
    """Generate a benchmark-shaped synthetic dataset.

    ``gauss2``: balanced two-class Gaussians with means 0.35 and 0.65 on
    every coordinate, scale ``noise``, plus an always-on bias column.
    ``linabs``: the heavy-tailed regression task of ``make_linabs_sampler``
    (``noise`` is the lognormal sigma).
    """
    if n < 2:
        raise ValueError(f"need at least 2 rows, got {n}")
    if d < 1:
        raise ValueError(f"need at least 1 feature, got {d}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if kind == "gauss2":
        y = rng.integers(0, 2, size=n)
        means = np.where(y[:, None] == 0, 0.35, 0.65)
        feats = means + noise * rng.standard_normal((n, d))
        raw = np.hstack([feats, np.ones((n, 1))])
        names = [f"x{j}" for j in range(d)] + ["bias"]
        kinds = [_SCALED] * d + [_KEPT]
        scaling = fit_scaling(raw, kinds)
        X = apply_scaling(raw, scaling, kinds, clamp=False)
        return Dataset(X, y.astype(int), "classification", 2, names, kinds, raw, scaling)
    if kind == "linabs":
        w_star = _default_w_star(d)
        x, y = _linabs_draw(n, d, noise, w_star, rng)
        names = [f"x{j}" for j in range(d)]
        kinds = [_KEPT] * d  # features already lie in a fixed box; no refit on split
        scaling = fit_scaling(x, kinds)
        return Dataset(x.copy(), y, "regression", 0, names, kinds, x, scaling)
    raise ValueError(f"unknown synthetic kind {kind!r} (expected gauss2 or linabs)")


def convert_libsvm(in_path, out_path, delimiter: str = ",") -> tuple[int, int]:
    """Rewrite a libsvm-format file (label idx:val ...) as dense delimited text.

    Feature indices are 1-based in the input; absent entries are zero.
    Returns (rows, features) written.  The output pairs with an all-numeric
    schema whose label column is named ``label``.
    """
    labels, rows = [], []
    max_idx = 0
    with open(in_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            parts = stripped.split()
            labels.append(parts[0])
            entries = {}
            for item in parts[1:]:
                if ":" not in item:
                    raise ValueError(
                        f"{in_path}: line {lineno}: expected idx:value, got {item!r}"
                    )
                idx_s, _, val_s = item.partition(":")
                try:
                    idx, val = int(idx_s), float(val_s)
                except ValueError:
                    raise ValueError(
                        f"{in_path}: line {lineno}: cannot parse entry {item!r}"
                    ) from None
                if idx < 1:
                    raise ValueError(
                        f"{in_path}: line {lineno}: feature index must be >= 1, got {idx}"
                    )
                entries[idx] = val
                max_idx = max(max_idx, idx)
            rows.append(entries)
    if not rows:
        raise ValueError(f"{in_path}: file has no data lines")

    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow([f"f{j}" for j in range(1, max_idx + 1)] + ["label"])
        for label, entries in zip(labels, rows):
            row = [repr(entries.get(j, 0.0)) for j in range(1, max_idx + 1)]
            row.append(label)
            writer.writerow(row)
    return len(rows), max_idx
