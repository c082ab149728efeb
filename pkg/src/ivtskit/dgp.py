"""Simulation generators for labeled interval-valued time series.

Three bivariate (center, range) processes share one residual law: Gaussian
pairs with unit center variance, range variance 1/4, and correlation ``rho``
between the two components.  The processes are

* process 1: a truncated coefficient series with a deterministic first term,
  Gaussian higher terms, and an additive residual;
* process 2: a VARMA(1, 1) recursion started from zero with a burn-in;
* process 3: an MA(1) with a zero initial residual.

Each generated (center, range) path is reconstructed into an interval series
via [center - range, center + range]; ranges can be negative, so improper
intervals are normal output.  Every observation gets its own RNG stream
derived from (base seed, item index, ...), which makes datasets reproducible
and generation parallelizable.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .errors import LengthMismatch, NonFinite
from .intervals import IntervalSeries, MvIntervalSeries

AnySeries = Union[IntervalSeries, MvIntervalSeries]

PHI = np.array([[0.2, -0.1], [0.1, 0.2]])
GAMMA = np.array([[-0.6, 0.3], [0.3, 0.6]])

DEFAULT_RHO_GRID: tuple[float, ...] = (-0.9, -0.5, 0.0, 0.3, 0.7)
DEFAULT_T = 150
DEFAULT_PER_CLASS = 500

# Chunk size for vectorized draws in gen_dgp1; fixed so that a given
# (config, seed) always consumes the RNG stream identically.
_DGP1_CHUNK = 16384

# Stream tag separating split shuffles from item generation streams.
_SPLIT_STREAM = 24301


def residual_covariance(rho: float) -> np.ndarray:
    """Covariance of one (center, range) residual pair."""
    if abs(rho) > 1.0:
        raise ValueError(f"correlation must satisfy |rho| <= 1, got {rho}")
    return np.array([[1.0, rho / 2.0], [rho / 2.0, 0.25]])


def _residual_cholesky(rho: float) -> np.ndarray:
    # Lower Cholesky factor of residual_covariance(rho), in closed form.
    return np.array([[1.0, 0.0], [rho / 2.0, math.sqrt(0.25 - rho * rho / 4.0)]])


def sample_residuals(rho: float, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw n residual pairs as an (n, 2) array."""
    if abs(rho) > 1.0:
        raise ValueError(f"correlation must satisfy |rho| <= 1, got {rho}")
    z = rng.standard_normal((n, 2))
    return z @ _residual_cholesky(rho).T


def sample_residual(rho: float, rng: np.random.Generator) -> tuple[float, float]:
    """Draw one (eps_c, eps_r) residual pair."""
    e = sample_residuals(rho, rng, 1)[0]
    return float(e[0]), float(e[1])


@dataclass(frozen=True)
class DgpConfig:
    """Parameters shared by the three generators.

    ``truncation_L`` only affects process 1 (where the coefficient series is
    cut off) and ``burn_in`` only affects process 2.  ``seed`` documents the
    base seed of the run; generators take an explicit RNG.
    """

    rho: float = 0.0
    T: int = DEFAULT_T
    truncation_L: int = 100
    burn_in: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if abs(self.rho) > 1.0:
            raise ValueError(f"correlation must satisfy |rho| <= 1, got {self.rho}")
        if self.T < 1:
            raise ValueError(f"series length T must be >= 1, got {self.T}")
        if self.truncation_L < 1:
            raise ValueError(f"truncation_L must be >= 1, got {self.truncation_L}")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")

    def make_rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def gen_dgp1(cfg: DgpConfig, rng: np.random.Generator) -> np.ndarray:
    """Truncated-series process, returned as a (T, 2) (center, range) array.

    The first coefficient multiplies the deterministic vector (1, 1), so the
    process mean is pi_1 * PHI @ (1, 1); all higher terms and the residual
    are zero-mean Gaussians.
    """
    L = cfg.truncation_L
    pis = np.arange(1, L + 1, dtype=np.float64) ** -2 / math.sqrt(3.0)
    mean = pis[0] * (PHI @ np.ones(2))
    chol = _residual_cholesky(cfg.rho)
    out = np.empty((cfg.T, 2))
    for start in range(0, cfg.T, _DGP1_CHUNK):
        stop = min(start + _DGP1_CHUNK, cfg.T)
        nt = stop - start
        block = np.broadcast_to(mean, (nt, 2)).copy()
        if L > 1:
            z = rng.standard_normal((nt, L - 1, 2)) @ chol.T
            block += np.einsum("l,tlj->tj", pis[1:], z) @ PHI.T
        block += rng.standard_normal((nt, 2)) @ chol.T
        out[start:stop] = block
    return out


def gen_dgp2(
    cfg: DgpConfig,
    rng: np.random.Generator,
    residuals: np.ndarray | None = None,
) -> np.ndarray:
    """VARMA(1, 1) recursion X_t = PHI X_{t-1} + eps_t - GAMMA eps_{t-1}.

    Starts from X_0 = 0, eps_0 = 0; the first ``burn_in`` steps are
    discarded.  ``residuals`` replaces the Gaussian draws with a fixed
    (burn_in + T, 2) array (test hook).
    """
    total = cfg.burn_in + cfg.T
    if residuals is None:
        eps = sample_residuals(cfg.rho, rng, total)
    else:
        eps = np.asarray(residuals, dtype=np.float64)
        if eps.shape != (total, 2):
            raise LengthMismatch(
                f"injected residuals must have shape ({total}, 2), got {eps.shape}"
            )
    out = np.empty((total, 2))
    prev_x = np.zeros(2)
    prev_e = np.zeros(2)
    for t in range(total):
        x = PHI @ prev_x + eps[t] - GAMMA @ prev_e
        out[t] = x
        prev_x = x
        prev_e = eps[t]
    return out[cfg.burn_in :]


def gen_dgp3(
    cfg: DgpConfig,
    rng: np.random.Generator,
    residuals: np.ndarray | None = None,
    gamma: np.ndarray | None = None,
) -> np.ndarray:
    """MA(1) process X_t = eps_t - GAMMA eps_{t-1} with eps_0 = 0.

    ``residuals`` injects a fixed (T, 2) residual stream and ``gamma``
    overrides the MA matrix (test hooks).
    """
    g = GAMMA if gamma is None else np.asarray(gamma, dtype=np.float64)
    if residuals is None:
        eps = sample_residuals(cfg.rho, rng, cfg.T)
    else:
        eps = np.asarray(residuals, dtype=np.float64)
        if eps.shape != (cfg.T, 2):
            raise LengthMismatch(
                f"injected residuals must have shape ({cfg.T}, 2), got {eps.shape}"
            )
    lagged = np.vstack([np.zeros((1, 2)), eps[:-1]])
    return eps - lagged @ g.T


def to_interval_series(cr: np.ndarray) -> IntervalSeries:
    """Reconstruct a (T, 2) (center, range) path into an interval series."""
    cr = np.asarray(cr, dtype=np.float64)
    if not np.all(np.isfinite(cr)):
        raise NonFinite("center/range path must be finite")
    return IntervalSeries.from_center_range(cr[:, 0], cr[:, 1])


_GENERATORS: dict[int, Callable[..., np.ndarray]] = {1: gen_dgp1, 2: gen_dgp2, 3: gen_dgp3}


@dataclass(frozen=True)
class LabeledDataset:
    """Observations paired with 1-based class labels."""

    items: tuple[tuple[AnySeries, int], ...]
    n_classes: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("a labeled dataset must be nonempty")
        if self.n_classes < 1:
            raise ValueError("a labeled dataset needs at least one class")
        for _, label in self.items:
            if not 1 <= label <= self.n_classes:
                raise ValueError(
                    f"label {label} outside the valid range 1..{self.n_classes}"
                )

    def __len__(self) -> int:
        return len(self.items)

    def labels(self) -> list[int]:
        return [label for _, label in self.items]

    def series(self) -> list[AnySeries]:
        return [s for s, _ in self.items]

    def class_counts(self) -> dict[int, int]:
        counts: dict[int, int] = defaultdict(int)
        for _, label in self.items:
            counts[label] += 1
        return dict(counts)

    def dim(self) -> int:
        first = self.items[0][0]
        return first.d if isinstance(first, MvIntervalSeries) else 1


def _item_rng(seed: int, *key: int) -> np.random.Generator:
    # One independent stream per generated observation.
    return np.random.default_rng([int(seed), *map(int, key)])


def build_univariate_dataset(
    dgp_id: int,
    per_class_n: int = DEFAULT_PER_CLASS,
    T: int = DEFAULT_T,
    rho_grid: Sequence[float] = DEFAULT_RHO_GRID,
    seed: int = 0,
    truncation_L: int = 100,
    burn_in: int = 100,
) -> LabeledDataset:
    """One class per correlation value, all generated by the same process."""
    if dgp_id not in _GENERATORS:
        raise ValueError(f"dgp_id must be one of {sorted(_GENERATORS)}, got {dgp_id}")
    if not rho_grid:
        raise ValueError("rho_grid must be nonempty")
    if per_class_n < 1:
        raise ValueError("per_class_n must be >= 1")
    gen = _GENERATORS[dgp_id]
    items: list[tuple[AnySeries, int]] = []
    item_index = 0
    for label, rho in enumerate(rho_grid, start=1):
        cfg = DgpConfig(rho=rho, T=T, truncation_L=truncation_L, burn_in=burn_in, seed=seed)
        for _ in range(per_class_n):
            cr = gen(cfg, _item_rng(seed, item_index))
            items.append((to_interval_series(cr), label))
            item_index += 1
    return LabeledDataset(tuple(items), n_classes=len(rho_grid))


def build_multivariate_c1(
    per_class_n: int = DEFAULT_PER_CLASS,
    T: int = DEFAULT_T,
    rho_grid: Sequence[float] = DEFAULT_RHO_GRID,
    seed: int = 0,
    truncation_L: int = 100,
    burn_in: int = 100,
) -> LabeledDataset:
    """Scenario C1: one class per process, one dimension per correlation."""
    if per_class_n < 1:
        raise ValueError("per_class_n must be >= 1")
    items: list[tuple[AnySeries, int]] = []
    item_index = 0
    for label, dgp_id in enumerate(sorted(_GENERATORS), start=1):
        gen = _GENERATORS[dgp_id]
        for _ in range(per_class_n):
            rows = []
            for dim, rho in enumerate(rho_grid):
                cfg = DgpConfig(rho=rho, T=T, truncation_L=truncation_L, burn_in=burn_in, seed=seed)
                rows.append(to_interval_series(gen(cfg, _item_rng(seed, item_index, dim))))
            items.append((MvIntervalSeries(rows), label))
            item_index += 1
    return LabeledDataset(tuple(items), n_classes=len(_GENERATORS))


def build_multivariate_c2(
    per_class_n: int = DEFAULT_PER_CLASS,
    T: int = DEFAULT_T,
    rho_grid: Sequence[float] = DEFAULT_RHO_GRID,
    seed: int = 0,
    truncation_L: int = 100,
    burn_in: int = 100,
) -> LabeledDataset:
    """Scenario C2: one class per correlation, one dimension per process."""
    if not rho_grid:
        raise ValueError("rho_grid must be nonempty")
    if per_class_n < 1:
        raise ValueError("per_class_n must be >= 1")
    items: list[tuple[AnySeries, int]] = []
    item_index = 0
    for label, rho in enumerate(rho_grid, start=1):
        cfg = DgpConfig(rho=rho, T=T, truncation_L=truncation_L, burn_in=burn_in, seed=seed)
        for _ in range(per_class_n):
            rows = []
            for dim, dgp_id in enumerate(sorted(_GENERATORS)):
                gen = _GENERATORS[dgp_id]
                rows.append(to_interval_series(gen(cfg, _item_rng(seed, item_index, dim))))
            items.append((MvIntervalSeries(rows), label))
            item_index += 1
    return LabeledDataset(tuple(items), n_classes=len(rho_grid))


def build_dgp_mix_dataset(
    per_class_n: int,
    T: int = DEFAULT_T,
    rho: float = 0.7,
    seed: int = 0,
    truncation_L: int = 100,
    burn_in: int = 100,
) -> LabeledDataset:
    """Univariate dataset whose classes are the three processes at a fixed rho."""
    if per_class_n < 1:
        raise ValueError("per_class_n must be >= 1")
    items: list[tuple[AnySeries, int]] = []
    item_index = 0
    for label, dgp_id in enumerate(sorted(_GENERATORS), start=1):
        gen = _GENERATORS[dgp_id]
        cfg = DgpConfig(rho=rho, T=T, truncation_L=truncation_L, burn_in=burn_in, seed=seed)
        for _ in range(per_class_n):
            cr = gen(cfg, _item_rng(seed, item_index))
            items.append((to_interval_series(cr), label))
            item_index += 1
    return LabeledDataset(tuple(items), n_classes=len(_GENERATORS))


def split_indices(
    labels: Sequence[int], train_fraction: float, seed: int = 0
) -> tuple[list[int], list[int]]:
    """Stratified index split; both lists come back in ascending order."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    by_class: dict[int, list[int]] = defaultdict(list)
    for idx, label in enumerate(labels):
        by_class[label].append(idx)
    rng = np.random.default_rng([int(seed), _SPLIT_STREAM])
    train_idx: list[int] = []
    test_idx: list[int] = []
    for label in sorted(by_class):
        idx = by_class[label]
        if len(idx) < 2:
            raise ValueError(
                f"class {label} has {len(idx)} item(s); need at least 2 to split"
            )
        n_train = int(round(train_fraction * len(idx)))
        n_train = min(max(n_train, 1), len(idx) - 1)
        perm = rng.permutation(len(idx))
        chosen = {idx[p] for p in perm[:n_train]}
        train_idx.extend(i for i in idx if i in chosen)
        test_idx.extend(i for i in idx if i not in chosen)
    return sorted(train_idx), sorted(test_idx)


def train_test_split(
    ds: LabeledDataset, train_fraction: float, seed: int = 0
) -> tuple[LabeledDataset, LabeledDataset]:
    """Stratified random split into an exact (disjoint, exhaustive) partition."""
    train_idx, test_idx = split_indices(ds.labels(), train_fraction, seed)
    train = LabeledDataset(tuple(ds.items[i] for i in train_idx), ds.n_classes)
    test = LabeledDataset(tuple(ds.items[i] for i in test_idx), ds.n_classes)
    return train, test


DATASET_HEADER = "item,dim,t,lower,upper,label"


def save_dataset_csv(ds: LabeledDataset, path) -> None:
    """Write `item,dim,t,lower,upper,label` rows (0-based indices, 1-based labels)."""
    lines = [DATASET_HEADER]
    for item_idx, (series, label) in enumerate(ds.items):
        dims = (
            series.dimensions()
            if isinstance(series, MvIntervalSeries)
            else (series,)
        )
        for dim_idx, s in enumerate(dims):
            b = s.bounds
            for t in range(len(s)):
                lines.append(
                    f"{item_idx},{dim_idx},{t},{float(b[t, 0])!r},{float(b[t, 1])!r},{label}"
                )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def load_dataset_csv(path) -> LabeledDataset:
    """Read a dataset written by :func:`save_dataset_csv`."""
    text = Path(path).read_text(encoding="ascii")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != DATASET_HEADER:
        raise ValueError(f"{path}: expected header {DATASET_HEADER!r}")
    per_item: dict[int, dict[int, dict[int, tuple[float, float]]]] = defaultdict(
        lambda: defaultdict(dict)
    )
    item_labels: dict[int, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 6:
            raise ValueError(f"{path}:{lineno}: expected 6 fields, got {len(parts)}")
        try:
            item, dim, t = int(parts[0]), int(parts[1]), int(parts[2])
            lower, upper = float(parts[3]), float(parts[4])
            label = int(parts[5])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: malformed row {line!r}") from None
        if item in item_labels and item_labels[item] != label:
            raise ValueError(f"{path}:{lineno}: item {item} has conflicting labels")
        item_labels[item] = label
        per_item[item][dim][t] = (lower, upper)
    if not per_item:
        raise ValueError(f"{path}: no data rows")
    items: list[tuple[AnySeries, int]] = []
    dims_seen = set()
    for item in sorted(per_item):
        dims = per_item[item]
        dims_seen.add(len(dims))
        rows = []
        for dim in sorted(dims):
            steps = dims[dim]
            if sorted(steps) != list(range(len(steps))):
                raise ValueError(f"{path}: item {item} dim {dim} has gaps in t")
            arr = np.array([steps[t] for t in range(len(steps))])
            rows.append(IntervalSeries(arr))
        if len(rows) == 1:
            items.append((rows[0], item_labels[item]))
        else:
            items.append((MvIntervalSeries(rows), item_labels[item]))
    if len(dims_seen) != 1:
        raise ValueError(f"{path}: items disagree on dimension count: {sorted(dims_seen)}")
    n_classes = max(item_labels.values())
    return LabeledDataset(tuple(items), n_classes=n_classes)
