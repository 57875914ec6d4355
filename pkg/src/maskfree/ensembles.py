"""Random matrix samplers: iid, elliptic and rectangular elliptic, real entries.

Seeding
-------
Every sample is drawn from a PCG64 generator built on a
:class:`numpy.random.SeedSequence`.  Experiments derive per-trial, per-label
substreams with :func:`substream`::

    SeedSequence(master_seed, spawn_key=(trial, label))

so trial ``t`` of label ``l`` sees the same numbers whatever the thread count
or the order in which trials are scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DomainError
from .masks import MaskMatrix

KINDS = {"iid": "iid", "elliptic": "elliptic", "rectelliptic": "rect_elliptic", "rect_elliptic": "rect_elliptic"}
DISTS = ("gaussian", "rademacher")


@dataclass(frozen=True)
class EnsembleSpec:
    """Law of the unmasked matrix: mean 0, variance 1, mirror correlation ``rho``."""

    kind: str = "iid"
    rho: float = 0.0
    dist: str = "gaussian"
    p: int = 1
    n: int = 1

    def __post_init__(self):
        kind = KINDS.get(str(self.kind).lower().replace("-", "_"))
        if kind is None:
            raise ConfigurationError(f"unknown ensemble kind {self.kind!r}")
        dist = str(self.dist).lower()
        if dist not in DISTS:
            raise ConfigurationError(f"unknown entry distribution {self.dist!r}; choose from {DISTS}")
        if not -1 <= self.rho <= 1:
            raise ConfigurationError(f"rho must lie in [-1, 1], got {self.rho}")
        if kind == "iid" and self.rho != 0:
            raise ConfigurationError("iid ensembles have rho = 0")
        if self.p < 1 or self.n < 1:
            raise ConfigurationError(f"dimensions must be positive, got p={self.p}, n={self.n}")
        if kind != "rect_elliptic" and self.p != self.n:
            raise ConfigurationError(f"{kind} matrices are square, got p={self.p}, n={self.n}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "dist", dist)
        object.__setattr__(self, "rho", float(self.rho))

    def resized(self, p: int, n: int | None = None) -> "EnsembleSpec":
        n = p if n is None else n
        return EnsembleSpec(self.kind, self.rho, self.dist, p, n)


@dataclass(frozen=True, eq=False)
class SampledMatrix:
    values: np.ndarray
    spec: EnsembleSpec | None = None
    seed: object = None
    mask: str | None = None
    meta: dict = field(default_factory=dict)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def substream(master_seed: int, trial: int, label: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(trial, label))


def _generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def _draw(rng: np.random.Generator, dist: str, shape) -> np.ndarray:
    if dist == "gaussian":
        return rng.standard_normal(shape)
    return rng.integers(0, 2, size=shape).astype(np.float64) * 2.0 - 1.0


def sample(spec: EnsembleSpec, seed) -> SampledMatrix:
    """Draw one ``p x n`` matrix.

    Mirror pairs ``(i, j), (j, i)`` with ``i != j < min(p, n)`` get correlation
    ``rho``.  Gaussian pairs use ``x_ji = rho x_ij + sqrt(1 - rho^2) v``;
    Rademacher pairs copy ``x_ij`` with probability ``(1 + rho) / 2`` and
    negate it otherwise, which keeps +-1 marginals.
    """
    rng = _generator(seed)
    p, n = spec.p, spec.n
    x = _draw(rng, spec.dist, (p, n))
    if spec.kind != "iid":
        m = min(p, n)
        lower = np.tril_indices(m, -1)
        upper_vals = x[lower[1], lower[0]]
        if spec.dist == "gaussian":
            fresh = rng.standard_normal(len(upper_vals))
            x[lower] = spec.rho * upper_vals + math.sqrt(1.0 - spec.rho**2) * fresh
        else:
            keep = rng.random(len(upper_vals)) < (1.0 + spec.rho) / 2.0
            x[lower] = np.where(keep, upper_vals, -upper_vals)
    return SampledMatrix(x, spec, seed)


def hadamard(D: MaskMatrix, X: SampledMatrix) -> SampledMatrix:
    """``D * X`` entrywise, no scaling (covariance constructions divide by ``n`` later)."""
    if D.shape != X.shape:
        raise DomainError(f"mask shape {D.shape} does not match matrix shape {X.shape}")
    return SampledMatrix(np.where(D.entries == 1, X.values, 0.0), X.spec, X.seed, D.label())


def masked_normalized(D: MaskMatrix, X: SampledMatrix) -> SampledMatrix:
    """``n^{-1/2} D * X``; masked positions are exact zeros."""
    out = hadamard(D, X)
    out.values[...] /= math.sqrt(X.shape[1])
    return out


def dump_matrix_csv(values: np.ndarray, path: str | Path) -> None:
    """Row-major CSV with 17 significant digits (round-trips float64)."""
    np.savetxt(path, np.asarray(values), delimiter=",", fmt="%.17g")
