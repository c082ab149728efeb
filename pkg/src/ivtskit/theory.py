"""Surrogate-risk bound calculators and an offset Rademacher estimator.

For an auxiliary loss with Lipschitz constant ``ell`` and caps ``c_A``
(weight rows), ``c_B`` (biases), ``c_Z`` (features), the conditional excess
surrogate risk of any capped linear hypothesis is bounded by
``2 ell (c_A c_Z + c_B)`` pointwise, and the difference between two
hypotheses by twice that.  The offset (quadratically penalized) Rademacher
complexity of the induced excess-risk class obeys

    (1 + logN) / (2 varrho n) + g (1 + varrho g),    g = 4 ell (c_A c_Z + c_B),

where ``logN`` is the log of the expected empirical sup-metric covering
number, supplied by the caller.  The excess-risk bound is four times this
expression evaluated at ``varrho = 1 / g``.

The Monte-Carlo estimator targets the complexity of the capped linear class
itself: for each Rademacher sign vector it maximizes the penalized average by
projected gradient ascent and averages the per-draw suprema.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

LIPSCHITZ_CONSTANTS = {"hinge": 1.0, "squared_hinge": 2.0, "exponential": 1.0}


def lipschitz_constant(kind: str) -> float:
    """Lipschitz constant of an auxiliary loss: hinge 1, squared hinge 2,
    exponential 1 (the exponential value assumes nonnegative margins)."""
    try:
        return LIPSCHITZ_CONSTANTS[kind]
    except KeyError:
        raise ValueError(
            f"unknown auxiliary loss {kind!r}; expected one of {sorted(LIPSCHITZ_CONSTANTS)}"
        ) from None


def _require_positive(**values: float) -> None:
    for name, v in values.items():
        if not v > 0.0:
            raise ValueError(f"{name} must be positive, got {v}")


def g_bounds(ell: float, c_A: float, c_Z: float, c_B: float) -> tuple[float, float]:
    """(single, pair) pointwise bounds: 2 ell (c_A c_Z + c_B) and twice that."""
    _require_positive(ell=ell, c_A=c_A, c_Z=c_Z, c_B=c_B)
    single = 2.0 * ell * (c_A * c_Z + c_B)
    return single, 2.0 * single


@dataclass(frozen=True)
class RiskBoundInputs:
    """Everything the offset-complexity bound needs.

    ``log_covering`` is log E N_inf(delta, F, S_n); the covering number is an
    input because no refinement of it is attempted here.
    """

    ell: float
    c_A: float
    c_B: float
    c_Z: float
    n: int
    log_covering: float
    varrho: float

    def __post_init__(self) -> None:
        _require_positive(
            ell=self.ell, c_A=self.c_A, c_B=self.c_B, c_Z=self.c_Z, varrho=self.varrho
        )
        if self.n < 1:
            raise ValueError(f"sample count n must be >= 1, got {self.n}")
        if self.log_covering < 0.0:
            raise ValueError(f"log_covering must be >= 0, got {self.log_covering}")


def offset_rademacher_bound(inputs: RiskBoundInputs) -> float:
    """(1 + logN) / (2 varrho n) + g (1 + varrho g) with g = 4 ell (c_A c_Z + c_B)."""
    g = 4.0 * inputs.ell * (inputs.c_A * inputs.c_Z + inputs.c_B)
    first = (1.0 + inputs.log_covering) / (2.0 * inputs.varrho * inputs.n)
    return first + g * (1.0 + inputs.varrho * g)


def optimal_varrho(ell: float, c_A: float, c_B: float, c_Z: float) -> float:
    """The offset parameter the excess-risk bound fixes: 1 / (4 ell (c_A c_Z + c_B))."""
    _require_positive(ell=ell, c_A=c_A, c_B=c_B, c_Z=c_Z)
    return 1.0 / (4.0 * ell * (c_A * c_Z + c_B))


def excess_risk_bound(
    ell: float, c_A: float, c_B: float, c_Z: float, n: int, log_covering: float
) -> float:
    """Four times the offset-complexity bound at the fixed offset parameter."""
    varrho = optimal_varrho(ell, c_A, c_B, c_Z)
    inputs = RiskBoundInputs(
        ell=ell, c_A=c_A, c_B=c_B, c_Z=c_Z, n=n, log_covering=log_covering, varrho=varrho
    )
    return 4.0 * offset_rademacher_bound(inputs)


def heuristic_log_covering(
    n_classes: int, p: int, c_A: float, c_Z: float, delta: float
) -> float:
    """Crude parametric estimate C (p + 1) log(1 + 4 c_A c_Z / delta).

    A back-of-envelope volume argument only, offered for convenience; it is
    not part of the bound derivation.
    """
    if n_classes < 1 or p < 1:
        raise ValueError("n_classes and p must be >= 1")
    _require_positive(c_A=c_A, c_Z=c_Z, delta=delta)
    return n_classes * (p + 1) * math.log1p(4.0 * c_A * c_Z / delta)


@dataclass(frozen=True)
class RademacherEstimate:
    """Monte-Carlo estimate of an offset Rademacher complexity."""

    value: float
    mc_draws: int
    inner_steps: int

    def __post_init__(self) -> None:
        if self.mc_draws < 1:
            raise ValueError("mc_draws must be >= 1")


def _one_draw(
    X: np.ndarray,
    c_A: float,
    c_B: float,
    varrho: float,
    inner_steps: int,
    seed: int,
    draw: int,
) -> float:
    n, p = X.shape
    rng = np.random.default_rng([seed, draw])
    tau = rng.integers(0, 2, size=n) * 2.0 - 1.0
    a = np.zeros(p)
    b = 0.0
    step = 1.0 / (2.0 * varrho + 1.0)
    best = 0.0  # objective of the zero function
    for _ in range(inner_steps):
        f = X @ a + b
        resid = tau - 2.0 * varrho * f
        a = a + step * (X.T @ resid) / n
        norm = float(np.linalg.norm(a))
        if norm > c_A:
            a *= c_A / norm
        b = float(np.clip(b + step * resid.mean(), -c_B, c_B))
        f = X @ a + b
        obj = float(np.mean(tau * f - varrho * f * f))
        if obj > best:
            best = obj
    return best


def empirical_offset_rademacher(
    features,
    c_A: float,
    c_B: float,
    varrho: float,
    mc_draws: int = 256,
    inner_steps: int = 200,
    seed: int = 0,
    threads: int = 1,
) -> RademacherEstimate:
    """Estimate E sup_f (1/n) sum_i tau_i f(z_i) - varrho f(z_i)^2 over the
    capped linear class f(z) = a^T z + b, ||a|| <= c_A, |b| <= c_B.

    The inner supremum is approximated by projected gradient ascent from the
    zero function with step 1/(2 varrho + 1), keeping the best iterate, so
    every per-draw value is >= 0.  Draws use seeds derived from
    (seed, draw index) and are averaged in index order, making the result
    independent of the thread count.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("features must be a nonempty (n, p) array")
    if c_A < 0.0 or c_B < 0.0:
        raise ValueError("caps must be nonnegative")
    _require_positive(varrho=varrho)
    if mc_draws < 1 or inner_steps < 0:
        raise ValueError("mc_draws must be >= 1 and inner_steps >= 0")

    def run(i: int) -> float:
        return _one_draw(X, c_A, c_B, varrho, inner_steps, seed, i)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(run, range(mc_draws)))
    else:
        values = [run(i) for i in range(mc_draws)]
    return RademacherEstimate(
        value=float(np.mean(values)), mc_draws=mc_draws, inner_steps=inner_steps
    )
