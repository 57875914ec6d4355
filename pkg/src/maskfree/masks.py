"""Deterministic 0/1 masks, density diagnostics and partition weights.

The partition weight of a mask ``D`` and a non-crossing pairing ``pi`` is the
normalised count

    (1 / #assignments) * sum over orbit assignments of prod_{(r,s) in pi} d[i_r, i_s]

with one free index per gamma-pi orbit.  It tends to 1 exactly when the mask
density tends to 1, and equals the density itself for ``k = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .combinat import PairPartition, is_noncrossing, orbit_labels
from .errors import ConfigurationError, DomainError, SizeLimitError

WEIGHT_BUDGET = 10**8
MAX_DIM = 4096


@dataclass(frozen=True, eq=False)
class MaskMatrix:
    """Immutable ``p x n`` array of zeros and ones."""

    entries: np.ndarray
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.entries)
        if arr.ndim != 2 or 0 in arr.shape:
            raise ConfigurationError(f"mask must be a non-empty 2-d array, got shape {arr.shape}")
        if max(arr.shape) > MAX_DIM:
            raise SizeLimitError(f"mask dimension {max(arr.shape)} exceeds {MAX_DIM}")
        if not np.isin(arr, (0, 1)).all():
            raise ConfigurationError("mask entries must be 0 or 1")
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def is_symmetric(self) -> bool:
        return self.p == self.n and bool((self.entries == self.entries.T).all())

    def label(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({args})" if args else self.name


@dataclass(frozen=True)
class DensityReport:
    density: float
    row_set_size: int
    col_set_size: int
    epsilon: float


def density(D: MaskMatrix) -> float:
    return int(D.entries.sum(dtype=np.int64)) / (D.p * D.n)


def epsilon_sets(D: MaskMatrix, eps: float) -> DensityReport:
    """Sizes of the row set (row mean >= 1 - eps) and the column set (column mean >= 1 - eps)."""
    if not 0 < eps < 1:
        raise ConfigurationError(f"eps must lie in (0, 1), got {eps}")
    rows = D.entries.sum(axis=1, dtype=np.int64) / D.n
    cols = D.entries.sum(axis=0, dtype=np.int64) / D.p
    return DensityReport(
        density=density(D),
        row_set_size=int((rows >= 1 - eps).sum()),
        col_set_size=int((cols >= 1 - eps).sum()),
        epsilon=eps,
    )


def weight_layout(pi: PairPartition, p: int, n: int, rectangular: bool):
    """Edge list and index ranges for the orbit-reduced weight sum.

    Returns ``(row_orbit, col_orbit, sizes)``.  In the rectangular layout odd
    positions carry row indices (range ``p``) and even positions column indices
    (range ``n``); the square layout reads ``d[i_r, i_s]`` for each pair
    ``r < s``.
    """
    labels = orbit_labels(pi)
    n_orb = max(labels) + 1
    rows, cols = [], []
    for r, s in pi.pairs:
        if rectangular and r % 2 == 0:
            r, s = s, r
        rows.append(labels[r - 1])
        cols.append(labels[s - 1])
    if rectangular:
        sizes = [0] * n_orb
        for pos, orb in enumerate(labels, start=1):
            sizes[orb] = p if pos % 2 else n
    else:
        sizes = [n] * n_orb
    return (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64),
            np.asarray(sizes, dtype=np.int64))


def mask_partition_weight(D: MaskMatrix, pi: PairPartition, *, rectangular: bool | None = None,
                          budget: int = WEIGHT_BUDGET) -> float:
    """Orbit-reduced brute-force partition weight, in ``[0, 1]``.

    ``rectangular`` defaults to ``D.p != D.n``; see :func:`weight_layout`.
    The count is accumulated in exact integers, so the result does not depend
    on summation order.
    """
    if not is_noncrossing(pi):
        raise DomainError(f"partition weight needs a non-crossing pairing, got {pi}")
    if rectangular is None:
        rectangular = D.p != D.n
    if not rectangular and D.p != D.n:
        raise DomainError(f"square layout needs a square mask, got {D.shape}")
    rows, cols, sizes = weight_layout(pi, D.p, D.n, rectangular)
    terms = math.prod(int(s) for s in sizes)
    if terms > budget:
        raise SizeLimitError(f"{terms} terms exceed the weight budget {budget}")
    hits = _kernels.orbit_weight_count(D.entries, rows, cols, sizes)
    return int(hits) / terms


# --- generators -------------------------------------------------------------

def _check_fraction(name: str, value: float) -> None:
    if not 0 <= value <= 1:
        raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")


def _check_dims(*dims: int) -> None:
    for d in dims:
        if not isinstance(d, (int, np.integer)) or d < 1:
            raise ConfigurationError(f"dimensions must be positive integers, got {d!r}")


def full(p: int, n: int | None = None) -> MaskMatrix:
    n = p if n is None else n
    _check_dims(p, n)
    return MaskMatrix(np.ones((p, n), dtype=np.uint8), "full")


def bernoulli(p: int, n: int, q: float, seed: int) -> MaskMatrix:
    """Entries iid Bernoulli(q), drawn once from ``seed`` and then frozen."""
    _check_dims(p, n)
    _check_fraction("q", q)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    return MaskMatrix((rng.random((p, n)) < q).astype(np.uint8), "bernoulli", {"q": q, "seed": seed})


def band_removed(n: int, w: int) -> MaskMatrix:
    """Symmetric square mask with zeros on the band ``|i - j| <= w``."""
    _check_dims(n)
    if not 0 <= w < n:
        raise ConfigurationError(f"band half-width must satisfy 0 <= w < n, got w={w}, n={n}")
    i, j = np.indices((n, n))
    return MaskMatrix((np.abs(i - j) > w).astype(np.uint8), "band_removed", {"w": w})


def kill_columns(n: int, frac: float, p: int | None = None) -> MaskMatrix:
    """Zero the first ``round(frac * n)`` columns."""
    p = n if p is None else p
    _check_dims(p, n)
    _check_fraction("frac", frac)
    out = np.ones((p, n), dtype=np.uint8)
    out[:, : int(round(frac * n))] = 0
    return MaskMatrix(out, "kill_columns", {"frac": frac})


def checkerboard(n: int, p: int | None = None) -> MaskMatrix:
    p = n if p is None else p
    _check_dims(p, n)
    i, j = np.indices((p, n))
    return MaskMatrix(((i + j) % 2 == 0).astype(np.uint8), "checkerboard")


def block_zero(p: int, n: int, alpha: float, beta: float) -> MaskMatrix:
    """Zero the top-left ``round(alpha p) x round(beta n)`` block."""
    _check_dims(p, n)
    _check_fraction("alpha", alpha)
    _check_fraction("beta", beta)
    out = np.ones((p, n), dtype=np.uint8)
    out[: int(round(alpha * p)), : int(round(beta * n))] = 0
    return MaskMatrix(out, "block_zero", {"alpha": alpha, "beta": beta})


def _sq(fn: Callable) -> Callable:
    def build(p: int, n: int, **params) -> MaskMatrix:
        if p != n:
            raise ConfigurationError(f"{fn.__name__} masks are square, got p={p}, n={n}")
        return fn(n, **params)

    return build


GENERATORS: dict[str, Callable[..., MaskMatrix]] = {
    "full": lambda p, n: full(p, n),
    "bernoulli": lambda p, n, q, seed=0: bernoulli(p, n, q, seed),
    "band_removed": _sq(band_removed),
    "kill_columns": lambda p, n, frac: kill_columns(n, frac, p=p),
    "checkerboard": lambda p, n: checkerboard(n, p=p),
    "block_zero": lambda p, n, alpha, beta: block_zero(p, n, alpha, beta),
}


def make_mask(name: str, p: int, n: int, **params) -> MaskMatrix:
    """Build a mask by generator name; dimensions come from the experiment size."""
    try:
        gen = GENERATORS[name]
    except KeyError:
        raise ConfigurationError(f"unknown mask generator {name!r}; choose from {sorted(GENERATORS)}") from None
    try:
        return gen(p, n, **params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {name}: {exc}") from None
