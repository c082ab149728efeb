"""Image featurization, a norm-capped linear max-loss classifier, and a
nearest-neighbor baseline on series distances.

The classifier scores class Y of a feature vector z as ``A_Y^T z + B_Y`` and
predicts the argmax.  Training minimizes the empirical max loss

    L(score[y] - max_{y' != y} score[y'])

by projected full-batch subgradient descent: after every step each weight row
is projected onto the ball of radius ``c_A`` and each bias is clipped to
``[-c_B, c_B]``, so the returned model always satisfies the norm caps.  The
auxiliary loss L is the hinge, squared hinge, or exponential function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BlockGridInvalid,
    DimMismatch,
    DimensionMismatch,
    EmptyInput,
    LengthMismatch,
)
from .dgp import LabeledDataset
from .imaging import RecurrenceImage
from .intervals import Kernel2x2, MvIntervalSeries, series_dk_squared

AUX_KINDS = ("hinge", "squared_hinge", "exponential")


def aux_loss(kind: str, a: float) -> float:
    """Non-increasing auxiliary loss evaluated at margin a."""
    if kind == "hinge":
        return max(0.0, 1.0 - a)
    if kind == "squared_hinge":
        return max(0.0, 1.0 - a) ** 2
    if kind == "exponential":
        return math.exp(-a)
    raise ValueError(f"unknown auxiliary loss {kind!r}; expected one of {AUX_KINDS}")


def aux_subgradient(kind: str, a: float) -> float:
    """A valid subgradient of the auxiliary loss; the hinge kink uses 0."""
    if kind == "hinge":
        return -1.0 if a < 1.0 else 0.0
    if kind == "squared_hinge":
        return -2.0 * max(0.0, 1.0 - a)
    if kind == "exponential":
        return -math.exp(-a)
    raise ValueError(f"unknown auxiliary loss {kind!r}; expected one of {AUX_KINDS}")


def _aux_loss_vec(kind: str, a: np.ndarray) -> np.ndarray:
    if kind == "hinge":
        return np.maximum(0.0, 1.0 - a)
    if kind == "squared_hinge":
        return np.maximum(0.0, 1.0 - a) ** 2
    if kind == "exponential":
        return np.exp(-a)
    raise ValueError(f"unknown auxiliary loss {kind!r}; expected one of {AUX_KINDS}")


def _aux_subgradient_vec(kind: str, a: np.ndarray) -> np.ndarray:
    if kind == "hinge":
        return np.where(a < 1.0, -1.0, 0.0)
    if kind == "squared_hinge":
        return -2.0 * np.maximum(0.0, 1.0 - a)
    if kind == "exponential":
        return -np.exp(-a)
    raise ValueError(f"unknown auxiliary loss {kind!r}; expected one of {AUX_KINDS}")


@dataclass(frozen=True)
class FeatureConfig:
    """How a recurrence image becomes a feature vector.

    ``flatten`` uses all N^2 pixels; ``block_mean`` averages the pixels of a
    q-by-q grid of near-equal cells.  The vector is then scaled down when its
    norm exceeds ``normalize_cap``, so features always satisfy the cap.
    """

    mode: str = "flatten"
    q: int = 1
    normalize_cap: float = 1.0

    def __post_init__(self) -> None:
        if self.mode not in ("flatten", "block_mean"):
            raise ValueError(f"mode must be 'flatten' or 'block_mean', got {self.mode!r}")
        if self.q < 1:
            raise BlockGridInvalid(f"block grid size must be >= 1, got {self.q}")
        if not self.normalize_cap > 0.0:
            raise ValueError(f"normalize_cap must be positive, got {self.normalize_cap}")


def featurize(img: RecurrenceImage, cfg: FeatureConfig) -> np.ndarray:
    """Turn an image into a norm-capped feature vector of dim N^2 or q^2."""
    px = img.pixels.astype(np.float64)
    if cfg.mode == "flatten":
        z = px.reshape(-1)
    else:
        if cfg.q > img.n:
            raise BlockGridInvalid(
                f"block grid {cfg.q} exceeds image size {img.n}"
            )
        cells = np.array_split(np.arange(img.n), cfg.q)
        z = np.array(
            [px[np.ix_(r, c)].mean() for r in cells for c in cells]
        )
    norm = float(np.linalg.norm(z))
    if norm > cfg.normalize_cap:
        z = z * (cfg.normalize_cap / norm)
    return z


@dataclass(frozen=True)
class LinearClassifier:
    """Per-class weight rows and biases under norm caps c_A and c_B."""

    weights: np.ndarray  # (C, p); row y-1 scores class y
    biases: np.ndarray  # (C,)
    c_A: float = 1.0
    c_B: float = 1.0

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64)
        b = np.array(self.biases, dtype=np.float64)
        if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
            raise ValueError("weights must be (C, p) and biases (C,)")
        if w.shape[0] < 1:
            raise ValueError("a classifier needs at least one class")
        if not (self.c_A > 0.0 and self.c_B > 0.0):
            raise ValueError("norm caps c_A and c_B must be positive")
        tol = 1e-9
        row_norms = np.linalg.norm(w, axis=1)
        if row_norms.max() > self.c_A + tol:
            raise ValueError(
                f"weight row norm {row_norms.max()} exceeds cap c_A={self.c_A}"
            )
        if np.abs(b).max() > self.c_B + tol:
            raise ValueError(f"bias magnitude {np.abs(b).max()} exceeds cap c_B={self.c_B}")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @classmethod
    def zeros(cls, n_classes: int, dim: int, c_A: float = 1.0, c_B: float = 1.0):
        return cls(np.zeros((n_classes, dim)), np.zeros(n_classes), c_A, c_B)

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


def score(clf: LinearClassifier, z) -> np.ndarray:
    """Length-C score vector A_Y^T z + B_Y."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (clf.dim,):
        raise DimMismatch(f"feature has shape {z.shape}, classifier expects ({clf.dim},)")
    return clf.weights @ z + clf.biases


def predict(clf: LinearClassifier, z) -> int:
    """Highest-scoring class; ties break to the lowest class index."""
    return int(np.argmax(score(clf, z))) + 1


def _score_matrix(clf: LinearClassifier, features: np.ndarray) -> np.ndarray:
    if features.ndim != 2 or features.shape[1] != clf.dim:
        raise DimMismatch(
            f"features have shape {features.shape}, classifier expects (*, {clf.dim})"
        )
    return features @ clf.weights.T + clf.biases


def _margins(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # margin_i = score[y_i] - max_{y' != y_i} score[y']; also return the
    # achieving other class (lowest index on ties).
    idx = np.arange(scores.shape[0])
    true = scores[idx, labels - 1]
    masked = scores.copy()
    masked[idx, labels - 1] = -np.inf
    best_other = masked.argmax(axis=1)
    return true - masked[idx, best_other], best_other


def max_loss(clf: LinearClassifier, z, y: int, kind: str) -> float:
    """Auxiliary loss of the margin of (z, y) under the classifier."""
    if clf.n_classes < 2:
        raise ValueError("the max loss needs at least two classes")
    s = score(clf, z)
    others = np.delete(s, y - 1)
    return aux_loss(kind, float(s[y - 1] - others.max()))


def empirical_phi_risk(clf: LinearClassifier, features, labels, kind: str) -> float:
    """Mean max loss over a labeled feature set."""
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.shape[0] == 0:
        raise EmptyInput("empirical risk of an empty set is undefined")
    if clf.n_classes < 2:
        raise ValueError("the max loss needs at least two classes")
    margins, _ = _margins(_score_matrix(clf, X), y)
    return float(_aux_loss_vec(kind, margins).mean())


def train(
    features,
    labels,
    kind: str = "hinge",
    steps: int = 500,
    step_size: float = 0.5,
    c_A: float = 1.0,
    c_B: float = 1.0,
    seed: int = 0,
) -> LinearClassifier:
    """Projected full-batch subgradient descent on the empirical max-loss risk.

    Starts from the zero classifier, uses the step schedule
    ``step_size / sqrt(t)``, and returns the iterate with the lowest recorded
    empirical risk (so the step-0 zero model is returned when nothing
    improves on it).  The optimizer is deterministic; ``seed`` is accepted
    for interface stability but unused by the full-batch updates.
    """
    del seed
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("features must be (n, p) with one label per row")
    n, p = X.shape
    if n < 1:
        raise EmptyInput("cannot train on an empty feature set")
    n_classes = int(y.max())
    if n_classes < 2:
        raise ValueError("training needs at least two classes")
    if y.min() < 1:
        raise ValueError("labels must be 1-based class ids")
    if steps < 0:
        raise ValueError("steps must be >= 0")

    w = np.zeros((n_classes, p))
    b = np.zeros(n_classes)

    def risk(wm: np.ndarray, bv: np.ndarray) -> float:
        scores = X @ wm.T + bv
        margins, _ = _margins(scores, y)
        return float(_aux_loss_vec(kind, margins).mean())

    best_risk = risk(w, b)
    best_w = w.copy()
    best_b = b.copy()
    rows = np.arange(n)
    for t in range(1, steps + 1):
        scores = X @ w.T + b
        margins, best_other = _margins(scores, y)
        g = _aux_subgradient_vec(kind, margins)
        coeff = np.zeros((n, n_classes))
        coeff[rows, y - 1] = g
        coeff[rows, best_other] -= g
        w -= (step_size / math.sqrt(t)) * (coeff.T @ X) / n
        b -= (step_size / math.sqrt(t)) * coeff.sum(axis=0) / n
        norms = np.linalg.norm(w, axis=1)
        over = norms > c_A
        if over.any():
            w[over] *= (c_A / norms[over])[:, None]
        np.clip(b, -c_B, c_B, out=b)
        r = risk(w, b)
        if r < best_risk:
            best_risk = r
            best_w = w.copy()
            best_b = b.copy()
    return LinearClassifier(best_w, best_b, c_A, c_B)


def _pair_series_distance(query, item, kernel: Kernel2x2) -> float:
    if isinstance(query, MvIntervalSeries) or isinstance(item, MvIntervalSeries):
        if not (isinstance(query, MvIntervalSeries) and isinstance(item, MvIntervalSeries)):
            raise DimensionMismatch("cannot mix univariate and multivariate series")
        if query.d != item.d:
            raise DimensionMismatch(
                f"series dimensions differ: {query.d} vs {item.d}"
            )
        return sum(
            series_dk_squared(query.dimension(j), item.dimension(j), kernel)
            for j in range(query.d)
        )
    return series_dk_squared(query, item, kernel)


def knn_classify(
    train: LabeledDataset, query, k: int, kernel: Kernel2x2
) -> int:
    """Majority vote among the k nearest training items under the summed
    squared series distance (per-dimension sums for multivariate data).

    Vote ties break to the class with the smallest total distance among its
    voting neighbors, then to the lowest class id.
    """
    n = len(train)
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= {n}, got {k}")
    dists = np.array(
        [_pair_series_distance(query, item, kernel) for item, _ in train.items]
    )
    order = np.argsort(dists, kind="stable")[:k]
    votes: dict[int, int] = {}
    totals: dict[int, float] = {}
    for idx in order:
        label = train.items[idx][1]
        votes[label] = votes.get(label, 0) + 1
        totals[label] = totals.get(label, 0.0) + float(dists[idx])
    top = max(votes.values())
    tied = [label for label, v in votes.items() if v == top]
    return min(tied, key=lambda label: (totals[label], label))


def accuracy(predictions, labels) -> float:
    """Fraction of matching entries."""
    predictions = list(predictions)
    labels = list(labels)
    if len(predictions) != len(labels):
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(labels)} labels"
        )
    if not predictions:
        raise EmptyInput("accuracy of an empty prediction set is undefined")
    hits = sum(1 for p, t in zip(predictions, labels) if p == t)
    return hits / len(predictions)


def save_model(clf: LinearClassifier, kind: str, path) -> None:
    """Plain-text model file: `C p c_A c_B kind` header, then one row per class."""
    lines = [f"{clf.n_classes} {clf.dim} {clf.c_A!r} {clf.c_B!r} {kind}"]
    for row, bias in zip(clf.weights, clf.biases):
        lines.append(" ".join(repr(float(v)) for v in row) + " " + repr(float(bias)))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_model(path) -> tuple[LinearClassifier, str]:
    """Read a model written by :func:`save_model`; returns (classifier, kind)."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty model file")
    head = lines[0].split()
    if len(head) != 5:
        raise ValueError(f"{path}: malformed model header {lines[0]!r}")
    n_classes, p = int(head[0]), int(head[1])
    c_A, c_B, kind = float(head[2]), float(head[3]), head[4]
    if len(lines) < 1 + n_classes:
        raise ValueError(f"{path}: expected {n_classes} weight rows")
    weights = np.empty((n_classes, p))
    biases = np.empty(n_classes)
    for i, line in enumerate(lines[1 : 1 + n_classes]):
        values = [float(v) for v in line.split()]
        if len(values) != p + 1:
            raise ValueError(f"{path}: row {i} has {len(values)} values, expected {p + 1}")
        weights[i] = values[:p]
        biases[i] = values[p]
    return LinearClassifier(weights, biases, c_A, c_B), kind
