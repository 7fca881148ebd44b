"""Loss models: multiclass logistic regression and synthetic convex tasks.

Every model exposes a flat parameter vector of length ``dim``, a
single-example ``loss``/``gradient`` pair used by the optimizers, and
vectorized batch evaluators used for metric computation.  All losses are
nonnegative and convex in the parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Example",
    "MulticlassLogistic",
    "SyntheticLinear",
    "SyntheticQuadratic",
    "as_example",
    "misclassification_rate",
]


@dataclass(frozen=True)
class Example:
    """One observation: features plus either a class label or a real target."""

    features: np.ndarray
    label: int = 0
    target: float = 0.0


def _check_dim(name: str, got: int, want: int):
    if got != want:
        raise ValueError(f"{name} has length {got}, model expects {want}")


class MulticlassLogistic:
    """Cross-entropy loss with one linear model per class (no reference class).

    Parameters are flattened class-major: w = (w_0, w_1, ..., w_{K-1}) with
    one length-p block per class, so dim = K * p.  Losses use the
    log-sum-exp max shift and stay finite for logits up to about 1e308.
    """

    kind = "logistic"

    def __init__(self, n_classes: int, n_features: int):
        if n_classes < 2:
            raise ValueError(f"need at least 2 classes, got {n_classes}")
        if n_features < 1:
            raise ValueError(f"need at least 1 feature, got {n_features}")
        self.n_classes = n_classes
        self.n_features = n_features
        self.dim = n_classes * n_features

    def _weights(self, w: np.ndarray) -> np.ndarray:
        _check_dim("parameter vector", w.size, self.dim)
        return w.reshape(self.n_classes, self.n_features)

    def loss(self, w: np.ndarray, z: Example) -> float:
        _check_dim("feature vector", z.features.size, self.n_features)
        logits = self._weights(w) @ z.features
        m = logits.max()
        return float(m + np.log(np.sum(np.exp(logits - m))) - logits[z.label])

    def gradient(self, w: np.ndarray, z: Example) -> np.ndarray:
        _check_dim("feature vector", z.features.size, self.n_features)
        logits = self._weights(w) @ z.features
        p = np.exp(logits - logits.max())
        p /= p.sum()
        p[z.label] -= 1.0
        return np.outer(p, z.features).ravel()

    def batch_losses(self, w: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        logits = X @ self._weights(w).T
        m = logits.max(axis=1)
        lse = m + np.log(np.sum(np.exp(logits - m[:, None]), axis=1))
        return lse - logits[np.arange(len(X)), y]

    def batch_predict(self, w: np.ndarray, X: np.ndarray) -> np.ndarray:
        """Argmax-logit labels; ties resolve to the lowest class index."""
        return np.argmax(X @ self._weights(w).T, axis=1)


class SyntheticLinear:
    """Absolute-deviation linear loss |<w, x> - y|; convex, heavy-tail friendly."""

    kind = "linear_abs"

    def __init__(self, n_features: int):
        if n_features < 1:
            raise ValueError(f"need at least 1 feature, got {n_features}")
        self.n_features = n_features
        self.dim = n_features

    def loss(self, w: np.ndarray, z: Example) -> float:
        _check_dim("parameter vector", w.size, self.dim)
        return float(abs(w @ z.features - z.target))

    def gradient(self, w: np.ndarray, z: Example) -> np.ndarray:
        _check_dim("parameter vector", w.size, self.dim)
        # subgradient: 0 at the kink
        return np.sign(w @ z.features - z.target) * z.features

    def batch_losses(self, w: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        _check_dim("parameter vector", w.size, self.dim)
        return np.abs(X @ w - y)


class SyntheticQuadratic:
    """Anchored quadratic 0.5 ||w - x||^2 + y with nonnegative offset y.

    The offset injects additive noise without touching the gradient, which
    is handy for oracle tests where the loss CDF must stay analytic.
    """

    kind = "quadratic"

    def __init__(self, n_features: int):
        if n_features < 1:
            raise ValueError(f"need at least 1 feature, got {n_features}")
        self.n_features = n_features
        self.dim = n_features

    def loss(self, w: np.ndarray, z: Example) -> float:
        _check_dim("parameter vector", w.size, self.dim)
        diff = w - z.features
        return float(0.5 * (diff @ diff) + z.target)

    def gradient(self, w: np.ndarray, z: Example) -> np.ndarray:
        _check_dim("parameter vector", w.size, self.dim)
        return w - z.features

    def batch_losses(self, w: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
        _check_dim("parameter vector", w.size, self.dim)
        diff = X - w
        return 0.5 * np.sum(diff * diff, axis=1) + y


def as_example(model, features: np.ndarray, y) -> Example:
    """Wrap one sampled row as an Example, routing y to label or target."""
    if model.kind == "logistic":
        return Example(features=features, label=int(y))
    return Example(features=features, target=float(y))


def misclassification_rate(model, w: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """Fraction of examples whose predicted label differs from the true one."""
    if not hasattr(model, "batch_predict"):
        raise ValueError(f"misclassification needs a classifier, got kind {model.kind!r}")
    if len(X) == 0:
        raise ValueError("cannot score an empty dataset")
    return float(np.mean(model.batch_predict(w, X) != y))
