"""Regularized four-way maximum-entropy (multinomial log-linear) classifier.

The model scores label ``b`` for a token as the sum of the weights of its
active indicator features, ``s_b = sum_i w[i, b]``, and normalizes over the
four boundary labels. Training maximizes the L2-penalized log-likelihood

    sum_j log P(b_j | t_j) - sum_{i,b} w[i,b]**2 / (2 * sigma2)

with limited-memory quasi-Newton (L-BFGS) steps, starting from ``w = 0``.
"""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, TextIO, Union

import numpy as np
import scipy.sparse as sp
from scipy.linalg.blas import daxpy, ddot
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import LABEL_INDEX, LABEL_ORDER, BoundaryLabel
from .features import FeatureSpace

log = logging.getLogger(__name__)

__all__ = [
    "MaxEntModel",
    "TrainConfig",
    "TrainResult",
    "LabeledInstance",
    "TrainingError",
    "ModelFormatError",
    "predict_proba",
    "objective_and_gradient",
    "train",
    "decode",
    "save_model",
    "load_model",
    "MaxEntClassifier",
]

N_LABELS = len(LABEL_ORDER)
MODEL_MAGIC = "edu-seg-model"
MODEL_VERSION = "v1"


class TrainingError(RuntimeError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    l2_sigma2: float = 1.0
    max_iterations: int = 500
    tolerance: float = 1e-6

    def __post_init__(self):
        if not self.l2_sigma2 > 0:
            raise ValueError("l2_sigma2 must be positive")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


@dataclass(frozen=True)
class LabeledInstance:
    vector: tuple
    label: BoundaryLabel


@dataclass
class TrainResult:
    """Diagnostics of one training run."""

    objective: float
    iterations: int
    gradient_norm: float
    trace: list = field(default_factory=list)
    converged: bool = False


@dataclass
class MaxEntModel:
    space: FeatureSpace
    weights: np.ndarray
    training: Optional[TrainResult] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (len(self.space), N_LABELS):
            raise ValueError(
                f"weights shape {self.weights.shape} does not match "
                f"({len(self.space)}, {N_LABELS})"
            )
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")

    @property
    def labels(self) -> tuple:
        return LABEL_ORDER

    @classmethod
    def zeros(cls, space: FeatureSpace) -> "MaxEntModel":
        return cls(space, np.zeros((len(space), N_LABELS)))


# ---------------------------------------------------------------------------
# Probability model


def _log_softmax(scores: np.ndarray) -> np.ndarray:
    shift = scores.max(axis=-1, keepdims=True)
    z = scores - shift
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def _check_ids(vector, m: int) -> np.ndarray:
    ids = np.fromiter(vector, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= m):
        raise IndexError(f"feature id out of range for a model with {m} features")
    return ids


def predict_proba(model: MaxEntModel, vector) -> np.ndarray:
    """Distribution over ``LABEL_ORDER`` for one feature vector."""
    ids = _check_ids(vector, len(model.space))
    scores = model.weights[ids].sum(axis=0) if ids.size else np.zeros(N_LABELS)
    return np.exp(_log_softmax(scores))


def decode(model: MaxEntModel, vector) -> BoundaryLabel:
    # np.argmax returns the first maximum: ties fall to LABEL_ORDER
    return LABEL_ORDER[int(np.argmax(predict_proba(model, vector)))]


def _as_matrix(vectors: Sequence, m: int) -> sp.csr_matrix:
    indptr = [0]
    indices: list[int] = []
    for vec in vectors:
        ids = _check_ids(vec, m)
        indices.extend(ids.tolist())
        indptr.append(len(indices))
    return sp.csr_matrix(
        (np.ones(len(indices)), np.asarray(indices, dtype=np.int64), np.asarray(indptr, dtype=np.int64)),
        shape=(len(vectors), m),
    )


def _label_indices(labels) -> np.ndarray:
    out = np.empty(len(labels), dtype=np.int64)
    for j, lab in enumerate(labels):
        if not isinstance(lab, BoundaryLabel):
            lab = BoundaryLabel.from_code(str(lab))
        out[j] = LABEL_INDEX[lab]
    return out


def _objective(W: np.ndarray, X: sp.csr_matrix, y: np.ndarray, sigma2: float):
    """Penalized log-likelihood and its gradient for a dense ``m x 4`` W."""
    log_p = _log_softmax(X @ W)
    rows = np.arange(X.shape[0])
    obj = log_p[rows, y].sum() - (W * W).sum() / (2.0 * sigma2)
    resid = -np.exp(log_p)
    resid[rows, y] += 1.0
    grad = X.T @ resid - W / sigma2
    return obj, np.asarray(grad)


def objective_and_gradient(model: MaxEntModel, data: Sequence[LabeledInstance], config: TrainConfig):
    if not data:
        raise ValueError("objective needs at least one instance")
    X = _as_matrix([inst.vector for inst in data], len(model.space))
    y = _label_indices([inst.label for inst in data])
    return _objective(model.weights, X, y, config.l2_sigma2)


def _two_loop(grad: np.ndarray, pairs: list) -> np.ndarray:
    """L-BFGS two-loop recursion: approximate inverse-Hessian times ``grad``."""
    q = grad.copy()
    alphas = []
    for s_k, y_k, rho in reversed(pairs):
        a = rho * ddot(s_k, q)
        alphas.append(a)
        q = daxpy(y_k, q, a=-a)
    if pairs:
        s_k, y_k, _ = pairs[-1]
        q *= ddot(s_k, y_k) / ddot(y_k, y_k)
    for (s_k, y_k, rho), a in zip(pairs, reversed(alphas)):
        b = rho * ddot(y_k, q)
        q = daxpy(s_k, q, a=a - b)
    return q


def fit_weights(X: sp.csr_matrix, y: np.ndarray, config: TrainConfig, memory: int = 10):
    """Maximize the penalized likelihood over a CSR design matrix.

    Limited-memory quasi-Newton ascent from ``W = 0``. Every step passes an
    Armijo sufficient-increase test, so the recorded objective trace is
    non-decreasing. Stops when the relative objective change drops below
    ``config.tolerance`` or after ``config.max_iterations`` steps.

    Returns ``(W, TrainResult)``.
    """
    n_cols = X.shape[1]
    # columns never active in X stay at their optimum w = 0
    active = np.flatnonzero(X.getnnz(axis=0))
    X = X[:, active].tocsr()
    m = len(active)
    shape = (m, N_LABELS)
    sigma2 = config.l2_sigma2
    w = np.zeros(m * N_LABELS)
    obj, grad = _objective(w.reshape(shape), X, y, sigma2)
    grad = grad.ravel()
    trace = [float(obj)]
    pairs: list = []
    converged = m == 0
    it = 0
    while it < config.max_iterations and not converged:
        direction = _two_loop(grad, pairs)
        slope = np.dot(grad, direction)
        if slope <= 0:
            pairs.clear()
            direction = grad.copy()
            slope = np.dot(grad, grad)
        if slope == 0:
            converged = True
            break
        step = 1.0 if pairs else 1.0 / max(np.linalg.norm(grad), 1.0)
        for _ in range(60):
            w_new = w + step * direction
            obj_new, grad_new = _objective(w_new.reshape(shape), X, y, sigma2)
            if not np.isfinite(obj_new):
                raise TrainingError(f"non-finite objective at iteration {it + 1}")
            if obj_new >= obj + 1e-4 * step * slope:
                break
            step *= 0.5
        else:
            # no ascent step found: already at numerical optimum
            converged = True
            break
        it += 1
        grad_new = grad_new.ravel()
        s_k = w_new - w
        y_k = grad - grad_new  # gradient of the negated objective
        sy = np.dot(s_k, y_k)
        if sy > 1e-12:
            pairs.append((s_k, y_k, 1.0 / sy))
            if len(pairs) > memory:
                pairs.pop(0)
        rel = (obj_new - obj) / max(abs(obj), abs(obj_new), 1.0)
        w, obj, grad = w_new, obj_new, grad_new
        trace.append(float(obj))
        if rel < config.tolerance:
            converged = True
    gnorm = float(np.abs(grad).max()) if grad.size else 0.0
    log.debug("maxent: %d iterations, objective %.6f, |grad|max %.3g", it, obj, gnorm)
    W = np.zeros((n_cols, N_LABELS))
    W[active] = w.reshape(shape)
    return W, TrainResult(float(obj), it, gnorm, trace, converged)


def train(data: Sequence[LabeledInstance], space: FeatureSpace, config: TrainConfig = TrainConfig()) -> MaxEntModel:
    if not data:
        raise ValueError("training data is empty")
    if not space.frozen:
        raise ValueError("feature space must be frozen before training")
    X = _as_matrix([inst.vector for inst in data], len(space))
    y = _label_indices([inst.label for inst in data])
    W, result = fit_weights(X, y, config)
    return MaxEntModel(space, W, training=result)


# ---------------------------------------------------------------------------
# Model files


def save_model(model: MaxEntModel, stream: Optional[TextIO] = None) -> str:
    out = io.StringIO()
    out.write(f"{MODEL_MAGIC} {MODEL_VERSION}\n")
    out.write("labels " + " ".join(lab.code for lab in LABEL_ORDER) + "\n")
    out.write(f"features {len(model.space)}\n")
    for fid, name in enumerate(model.space.names):
        out.write(name + "\n")
        out.write("\t".join(format(float(w), ".17g") for w in model.weights[fid]) + "\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def load_model(stream: Union[TextIO, str]) -> MaxEntModel:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    lines = stream.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 3:
        raise ModelFormatError("truncated model file: missing header")
    magic = lines[0].split()
    if len(magic) != 2 or magic[0] != MODEL_MAGIC:
        raise ModelFormatError(f"not a model file (header {lines[0]!r})")
    if magic[1] != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {magic[1]!r}, expected {MODEL_VERSION}")
    expected_labels = "labels " + " ".join(lab.code for lab in LABEL_ORDER)
    if lines[1] != expected_labels:
        raise ModelFormatError(f"unexpected label line {lines[1]!r}")
    parts = lines[2].split()
    if len(parts) != 2 or parts[0] != "features" or not parts[1].isdigit():
        raise ModelFormatError(f"malformed feature count line {lines[2]!r}")
    m = int(parts[1])
    body = lines[3:]
    if len(body) != 2 * m:
        raise ModelFormatError(
            f"feature count {m} does not match {len(body) / 2:g} weight blocks (truncated stream?)"
        )
    names = body[0::2]
    weights = np.empty((m, N_LABELS))
    for fid, row in enumerate(body[1::2]):
        cols = row.split("\t")
        if len(cols) != N_LABELS:
            raise ModelFormatError(f"feature {names[fid]!r}: expected {N_LABELS} weights")
        try:
            weights[fid] = [float(c) for c in cols]
        except ValueError:
            raise ModelFormatError(f"feature {names[fid]!r}: non-numeric weight") from None
    space = FeatureSpace(names, frozen=True)
    if len(space) != m:
        raise ModelFormatError("duplicate feature names in model file")
    return MaxEntModel(space, weights)


# ---------------------------------------------------------------------------
# scikit-learn facade


class MaxEntClassifier(ClassifierMixin, BaseEstimator):
    """L2-regularized multinomial log-linear classifier over the four boundary labels.

    ``X`` is a (sparse) binary design matrix and ``y`` holds boundary labels
    (``BoundaryLabel`` members or their codes ``"B"``, ``"E"``, ``"BE"``,
    ``"I"``). The class set is always the full label order, even when some
    labels are absent from ``y``.
    """

    def __init__(self, l2_sigma2: float = 1.0, max_iter: int = 500, tol: float = 1e-6):
        self.l2_sigma2 = l2_sigma2
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X = sp.csr_matrix(X, dtype=np.float64)
        y_idx = _label_indices(y)
        if X.shape[0] != len(y_idx):
            raise ValueError(f"X has {X.shape[0]} rows but y has {len(y_idx)} labels")
        if X.shape[0] == 0:
            raise ValueError("cannot fit on zero instances")
        config = TrainConfig(self.l2_sigma2, self.max_iter, self.tol)
        self.coef_, self.training_ = fit_weights(X, y_idx, config)
        self.classes_ = np.array([lab.code for lab in LABEL_ORDER])
        self.n_features_in_ = X.shape[1]
        return self

    def _log_proba(self, X):
        check_is_fitted(self, "coef_")
        X = sp.csr_matrix(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, model expects {self.n_features_in_}")
        return _log_softmax(np.asarray(X @ self.coef_))

    def predict_proba(self, X) -> np.ndarray:
        return np.exp(self._log_proba(X))

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self._log_proba(X), axis=1)]

    def to_model(self, space: FeatureSpace) -> MaxEntModel:
        check_is_fitted(self, "coef_")
        return MaxEntModel(space, self.coef_.copy(), training=self.training_)

    @classmethod
    def from_model(cls, model: MaxEntModel, **params) -> "MaxEntClassifier":
        clf = cls(**params)
        clf.coef_ = model.weights.copy()
        clf.training_ = model.training
        clf.classes_ = np.array([lab.code for lab in LABEL_ORDER])
        clf.n_features_in_ = len(model.space)
        return clf
