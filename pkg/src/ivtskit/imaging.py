"""Binary recurrence imaging of interval-valued time series.

A series of length T yields ``N = T - (m - 1) * kappa`` delay trajectories of
length ``m`` with time delay ``kappa``.  Pixel (j, k) of the image is 1
exactly when the kernel distance between trajectories j and k is at most the
threshold; the step function uses the recurrence convention H(0) = 1, so a
distance exactly at threshold counts as recurrent.  Every image is therefore
square, binary, symmetric, and all-ones on the diagonal for a nonnegative
threshold.

Multivariate series are imaged one dimension at a time and the per-dimension
images are combined with an elementwise product, which on binary images is a
logical AND.
"""

from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    LengthMismatch,
    NegativeSquaredDistance,
    SeriesTooShort,
)
from .intervals import (
    NEGATIVE_TOLERANCE,
    Interval,
    IntervalSeries,
    Kernel2x2,
    MvIntervalSeries,
    dk_squared,
    distance_from_squared,
    pointwise_dk_squared,
)

#: Default recurrence threshold.
DEFAULT_EPSILON = math.pi / 18.0


@dataclass(frozen=True)
class TrajectoryConfig:
    """Delay-embedding and threshold parameters for recurrence imaging.

    ``epsilon`` is a single threshold broadcast to every dimension, or a
    tuple with one threshold per dimension of a multivariate series.
    """

    m: int = 1
    kappa: int = 1
    epsilon: float | tuple[float, ...] = DEFAULT_EPSILON

    def __post_init__(self) -> None:
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"trajectory length m must be a positive integer, got {self.m}")
        if int(self.kappa) != self.kappa or self.kappa < 1:
            raise ValueError(f"time delay kappa must be a positive integer, got {self.kappa}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "kappa", int(self.kappa))
        eps = self.epsilon
        if isinstance(eps, (tuple, list, np.ndarray)):
            eps = tuple(float(e) for e in eps)
            if not eps:
                raise ValueError("epsilon tuple must be nonempty")
        else:
            eps = float(eps)
        values = eps if isinstance(eps, tuple) else (eps,)
        for e in values:
            if not math.isfinite(e) or e < 0.0:
                raise ValueError(f"epsilon must be finite and >= 0, got {e}")
        object.__setattr__(self, "epsilon", eps)

    def num_trajectories(self, series_length: int) -> int:
        n = series_length - (self.m - 1) * self.kappa
        if n < 1:
            raise SeriesTooShort(
                f"series of length {series_length} is too short for m={self.m}, "
                f"kappa={self.kappa}; need T >= {(self.m - 1) * self.kappa + 1}"
            )
        return n

    def epsilon_for(self, d: int) -> tuple[float, ...]:
        """Per-dimension thresholds: broadcast a scalar, validate a vector."""
        if isinstance(self.epsilon, tuple):
            if len(self.epsilon) == 1:
                return self.epsilon * d
            if len(self.epsilon) != d:
                raise DimensionMismatch(
                    f"{len(self.epsilon)} thresholds given for {d} dimensions"
                )
            return self.epsilon
        return (self.epsilon,) * d


class RecurrenceImage:
    """Square binary image backed by a read-only (N, N) uint8 array."""

    __slots__ = ("_pixels",)

    def __init__(self, pixels):
        arr = np.asarray(pixels)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError("a recurrence image must be square and nonempty")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("recurrence image entries must be 0 or 1")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        self._pixels = arr

    @property
    def pixels(self) -> np.ndarray:
        return self._pixels

    @property
    def n(self) -> int:
        return self._pixels.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RecurrenceImage):
            return NotImplemented
        return np.array_equal(self._pixels, other._pixels)

    def __repr__(self) -> str:
        return f"RecurrenceImage(n={self.n})"


def extract_trajectories(
    x: IntervalSeries, cfg: TrajectoryConfig
) -> list[tuple[Interval, ...]]:
    """All delay trajectories of x: trajectory j is (x[j], x[j+kappa], ...)."""
    n = cfg.num_trajectories(len(x))
    return [
        tuple(x[j + s * cfg.kappa] for s in range(cfg.m)) for j in range(n)
    ]


def trajectory_dk(
    ta: Sequence[Interval], tb: Sequence[Interval], k: Kernel2x2
) -> float:
    """Distance between equal-length trajectories: sqrt of summed per-slot forms."""
    if len(ta) != len(tb):
        raise LengthMismatch(f"trajectory lengths differ: {len(ta)} vs {len(tb)}")
    q = sum(dk_squared(a, b, k) for a, b in zip(ta, tb))
    return distance_from_squared(q)


def heaviside(x: float) -> int:
    """Step function with H(0) = 1."""
    return 1 if x >= 0 else 0


def _trajectory_dk2_grid(
    bounds: np.ndarray, cfg: TrajectoryConfig, kernel: Kernel2x2
) -> np.ndarray:
    """(N, N) matrix of summed quadratic forms between all trajectory pairs."""
    n = cfg.num_trajectories(bounds.shape[0])
    point = pointwise_dk_squared(bounds[:, None, :], bounds[None, :, :], kernel)
    grid = point[:n, :n].copy()
    for s in range(1, cfg.m):
        o = s * cfg.kappa
        grid += point[o : o + n, o : o + n]
    return grid


def _scalar_epsilon(cfg: TrajectoryConfig) -> float:
    eps = cfg.epsilon_for(1)
    return eps[0]


def irp(x: IntervalSeries, cfg: TrajectoryConfig, kernel: Kernel2x2) -> RecurrenceImage:
    """Image a univariate series: pixel (j, k) = H(epsilon - d(traj_j, traj_k))."""
    eps = _scalar_epsilon(cfg)
    grid = _trajectory_dk2_grid(x.bounds, cfg, kernel)
    low = float(grid.min())
    if low < -NEGATIVE_TOLERANCE:
        raise NegativeSquaredDistance(
            f"squared trajectory distance {low} is negative beyond tolerance; "
            "the kernel is indefinite on this series"
        )
    dist = np.sqrt(np.maximum(grid, 0.0))
    return RecurrenceImage(dist <= eps)


def ijrp(
    w: MvIntervalSeries, cfg: TrajectoryConfig, kernel: Kernel2x2
) -> RecurrenceImage:
    """Image a multivariate series: AND of the per-dimension recurrence images."""
    eps = cfg.epsilon_for(w.d)
    out: np.ndarray | None = None
    for j in range(w.d):
        dim_cfg = dataclasses.replace(cfg, epsilon=eps[j])
        img = irp(w.dimension(j), dim_cfg, kernel).pixels
        out = img if out is None else out & img
    assert out is not None
    return RecurrenceImage(out)


def image_series(series, cfg: TrajectoryConfig, kernel: Kernel2x2) -> RecurrenceImage:
    """Dispatch to irp or ijrp based on the series type."""
    if isinstance(series, MvIntervalSeries):
        return ijrp(series, cfg, kernel)
    return irp(series, cfg, kernel)


def image_dataset(
    series_list, cfg: TrajectoryConfig, kernel: Kernel2x2, threads: int = 1
) -> list[RecurrenceImage]:
    """Image a batch of observations.

    Imaging is pure and embarrassingly parallel across observations; output
    order always matches input order regardless of thread count.
    """
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda s: image_series(s, cfg, kernel), series_list))
    return [image_series(s, cfg, kernel) for s in series_list]


def export_pgm(img: RecurrenceImage, path) -> None:
    """Write a binary (P5, maxval 255) greymap: pixel value = 255 * entry."""
    header = f"P5\n{img.n} {img.n}\n255\n".encode("ascii")
    payload = (img.pixels * np.uint8(255)).tobytes()
    Path(path).write_bytes(header + payload)


def load_pgm(path) -> RecurrenceImage:
    """Read a binary image previously written by :func:`export_pgm`."""
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if len(parts) != 4 or parts[0] != b"P5":
        raise ValueError(f"{path}: not a binary P5 greymap")
    dims = parts[1].split()
    if len(dims) != 2:
        raise ValueError(f"{path}: malformed P5 dimension line")
    width, height = int(dims[0]), int(dims[1])
    maxval = int(parts[2])
    if maxval != 255:
        raise ValueError(f"{path}: expected maxval 255, got {maxval}")
    data = np.frombuffer(parts[3], dtype=np.uint8, count=width * height)
    return RecurrenceImage((data > 0).astype(np.uint8).reshape(height, width))


def export_csv(img: RecurrenceImage, path) -> None:
    """Write the image as N rows of comma-separated 0/1 entries."""
    lines = "\n".join(",".join(str(int(v)) for v in row) for row in img.pixels)
    Path(path).write_text(lines + "\n", encoding="ascii")


def load_csv_image(path) -> RecurrenceImage:
    """Read an image previously written by :func:`export_csv`."""
    rows = [
        [int(v) for v in line.split(",")]
        for line in Path(path).read_text(encoding="ascii").splitlines()
        if line
    ]
    return RecurrenceImage(np.array(rows, dtype=np.uint8))
