"""L2-regularized hinge-loss linear SVM trained by dual coordinate descent.

The bias is learned as the weight of an implicit constant-1 feature, so it
is regularized together with the other weights. Multiclass is one-vs-rest.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .features import FeatureSpace, SparseVector

MODEL_FORMAT = "tweetpolarity-model"
MODEL_VERSION = 1

DEFAULT_C = 0.5
DEFAULT_TOL = 1e-3
DEFAULT_MAX_EPOCHS = 1000
DEFAULT_SEED = 42


class ModelFormatError(ValueError):
    pass


@dataclass
class BinarySvm:
    weights: np.ndarray
    bias: float
    C: float
    epochs: int = 0
    converged: bool = False
    dual_history: list = field(default_factory=list)
    alpha: Optional[np.ndarray] = None

    def decision(self, x: SparseVector) -> float:
        return x.dot(self.weights) + self.bias

    @property
    def dual_objective(self) -> float:
        return self.dual_history[-1] if self.dual_history else 0.0

    def primal_objective(self, X: Sequence[SparseVector], y: Sequence[int]) -> float:
        """0.5 * (|w|^2 + b^2) + C * sum of hinge losses."""
        margins = np.array([yi * self.decision(x) for x, yi in zip(X, y)])
        reg = 0.5 * (float(self.weights @ self.weights) + self.bias ** 2)
        return reg + self.C * float(np.maximum(0.0, 1.0 - margins).sum())


def _check_training_set(X, y, C):
    if len(X) == 0:
        raise ValueError("empty training set")
    if len(X) != len(y):
        raise ValueError(f"{len(X)} vectors but {len(y)} labels")
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    dim = X[0].dim
    for i, x in enumerate(X):
        if x.dim != dim:
            raise ValueError(f"dimension mismatch: vector {i} has dim {x.dim}, expected {dim}")
    labels = set(int(v) for v in y)
    if not labels <= {-1, 1}:
        raise ValueError(f"binary labels must be +1/-1, got {sorted(labels)}")
    if len(labels) < 2:
        raise ValueError("training set holds a single class; need both +1 and -1")
    return dim


def train_binary(X: Sequence[SparseVector], y: Sequence[int], C: float = DEFAULT_C,
                 tol: float = DEFAULT_TOL, max_epochs: int = DEFAULT_MAX_EPOCHS,
                 seed: int = DEFAULT_SEED) -> BinarySvm:
    """Coordinate ascent on the dual, visiting coordinates in a fresh seeded
    permutation each epoch.

    Stops once the largest projected-gradient magnitude seen during an epoch
    falls below ``tol`` or after ``max_epochs`` epochs. The dual objective
    after every epoch is kept in ``dual_history``.
    """
    dim = _check_training_set(X, y, C)
    n = len(X)
    y = np.asarray(y, dtype=np.float64)
    idx = [x.indices for x in X]
    val = [x.values for x in X]
    # +1 for the constant bias feature
    qdiag = np.array([float(v @ v) + 1.0 for v in val])

    w = np.zeros(dim)
    b = 0.0
    alpha = np.zeros(n)
    rng = np.random.default_rng(seed)
    history = []
    converged = False
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        worst = 0.0
        for i in rng.permutation(n):
            yi = y[i]
            ai = alpha[i]
            g = yi * (float(w[idx[i]] @ val[i]) + b) - 1.0
            if ai <= 0.0:
                pg = min(g, 0.0)
            elif ai >= C:
                pg = max(g, 0.0)
            else:
                pg = g
            worst = max(worst, abs(pg))
            if pg != 0.0:
                new = min(max(ai - g / qdiag[i], 0.0), C)
                step = (new - ai) * yi
                if step != 0.0:
                    w[idx[i]] += step * val[i]
                    b += step
                    alpha[i] = new
        history.append(float(alpha.sum() - 0.5 * (w @ w + b * b)))
        if worst < tol:
            converged = True
            break
    return BinarySvm(w, b, float(C), epoch, converged, history, alpha)


@dataclass
class SvmModel:
    classes: list
    machines: list
    space: Optional[FeatureSpace] = None
    pipeline_config: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.classes) != len(self.machines):
            raise ValueError("one machine per class is required")
        self._W = np.vstack([m.weights for m in self.machines]) if self.machines else np.zeros((0, 0))
        self._b = np.array([m.bias for m in self.machines])

    @property
    def dim(self) -> int:
        return self._W.shape[1]

    def scores(self, x: SparseVector) -> np.ndarray:
        if x.dim != self.dim:
            raise ValueError(f"vector dimension {x.dim} does not match model dimension {self.dim}")
        return self._W[:, x.indices] @ x.values + self._b


def train_ovr(X: Sequence[SparseVector], labels: Sequence[str], C: float = DEFAULT_C,
              tol: float = DEFAULT_TOL, max_epochs: int = DEFAULT_MAX_EPOCHS,
              seed: int = DEFAULT_SEED, space: Optional[FeatureSpace] = None,
              pipeline_config: Optional[dict] = None) -> SvmModel:
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ValueError(f"need at least 2 classes to train, got {classes}")
    machines = []
    for cls in classes:
        y = [1 if lab == cls else -1 for lab in labels]
        machines.append(train_binary(X, y, C=C, tol=tol, max_epochs=max_epochs, seed=seed))
    return SvmModel(classes, machines, space, dict(pipeline_config or {}))


def decision_values(model: SvmModel, x: SparseVector) -> dict:
    return dict(zip(model.classes, model.scores(x).tolist()))


def argmax_label(scores: dict) -> str:
    """Highest score wins; exact ties go to the label that sorts first."""
    best = None
    for label in sorted(scores):
        if best is None or scores[label] > scores[best]:
            best = label
    return best


def predict(model: SvmModel, x: SparseVector) -> str:
    s = model.scores(x)
    return model.classes[int(np.argmax(s))]


def model_to_dict(model: SvmModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "classes": list(model.classes),
        "machines": [
            {"C": m.C, "bias": m.bias, "epochs": m.epochs, "converged": m.converged,
             "dual_objective": m.dual_objective, "weights": m.weights.tolist()}
            for m in model.machines
        ],
        "space": model.space.to_dict() if model.space is not None else None,
        "pipeline": model.pipeline_config,
    }


def model_from_dict(data: dict) -> SvmModel:
    if data.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"not a {MODEL_FORMAT} file")
    if data.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {data.get('version')!r}; "
                               f"this build reads version {MODEL_VERSION}")
    space = FeatureSpace.from_dict(data["space"]) if data.get("space") else None
    machines = []
    for m in data["machines"]:
        w = np.array(m["weights"], dtype=np.float64)
        if space is not None and w.shape[0] != space.dim:
            raise ModelFormatError(f"weight vector of length {w.shape[0]} does not match feature space of {space.dim}")
        machines.append(BinarySvm(w, float(m["bias"]), float(m["C"]), int(m.get("epochs", 0)),
                                  bool(m.get("converged", False)), [m["dual_objective"]] if "dual_objective" in m else []))
    return SvmModel(list(data["classes"]), machines, space, data.get("pipeline") or {})


def save_model(model: SvmModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, ensure_ascii=False)
        fh.write("\n")


def load_model(path) -> SvmModel:
    if not os.path.exists(path):
        raise FileNotFoundError(f"model file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ModelFormatError("model file must hold a JSON object")
    return model_from_dict(data)
