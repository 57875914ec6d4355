"""Monte Carlo estimates of normalised trace moments of masked random matrices.

Trials are independent: trial ``t`` of label ``l`` samples from
``substream(seed, t, l)`` and the per-trial values are reduced in trial order,
so results are bit-identical for any ``threads`` setting.  The mask is fixed
across trials; only the random matrix is resampled.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .ensembles import EnsembleSpec, SampledMatrix, masked_normalized, sample, substream
from .errors import ConfigurationError, DomainError
from .freelimits import Word, covariance_mixed_moment, free_family_mixed_moment
from .masks import MaskMatrix
from .spectra import covariance_matrix

SIGMAS = 3.0
BIAS_CONSTANT = 10.0
THREADS_ENV = "MASKFREE_THREADS"


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def tolerance(std_error: float, n: int, sigmas: float = SIGMAS, bias_constant: float = BIAS_CONSTANT) -> float:
    """``sigmas * std_error + bias_constant / n``: statistical band plus finite-size allowance."""
    return sigmas * std_error + bias_constant / n


@dataclass(frozen=True)
class MomentEstimate:
    mean: float
    std_error: float
    trials: int
    n: int
    word: object
    values: tuple[float, ...] = ()

    def gap(self, limit: float) -> float:
        return abs(self.mean - limit)


@dataclass(frozen=True)
class LabelModel:
    """Ensemble and fixed mask for one matrix label; ``spec`` is resized per run."""

    spec: EnsembleSpec
    mask: MaskMatrix


def _matrix(m) -> np.ndarray:
    return m.values if isinstance(m, SampledMatrix) else np.asarray(m, dtype=float)


def word_trace(matrices: Mapping[int, SampledMatrix | np.ndarray], word: Word) -> float:
    """``(1/n) Tr`` of the word's product, ``*`` meaning transpose; accumulated left to right."""
    mats = {}
    for lab in set(word.labels):
        if lab not in matrices:
            raise DomainError(f"no matrix for label {lab}")
        mats[lab] = _matrix(matrices[lab])
    sizes = {m.shape for m in mats.values()}
    if len(sizes) != 1 or next(iter(sizes))[0] != next(iter(sizes))[1]:
        raise DomainError(f"word matrices must share one square shape, got {sorted(sizes)}")
    n = next(iter(sizes))[0]
    acc = None
    for lab, star in word.letters:
        factor = mats[lab].T if star else mats[lab]
        acc = factor if acc is None else acc @ factor
    return float(np.trace(acc)) / n


def _run_trials(fn: Callable[[int], float], trials: int, threads: int | None) -> np.ndarray:
    threads = default_threads() if threads is None else max(1, int(threads))
    if threads == 1:
        vals = [fn(t) for t in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = list(pool.map(fn, range(trials)))
    return np.asarray(vals, dtype=np.float64)


def _summarise(vals: np.ndarray, n: int, word) -> MomentEstimate:
    trials = len(vals)
    mean = float(np.sum(vals) / trials)
    se = float(np.std(vals, ddof=1) / math.sqrt(trials))
    return MomentEstimate(mean, se, trials, n, word, tuple(float(v) for v in vals))


def _check_trials(trials: int) -> None:
    if trials < 2:
        raise ConfigurationError(f"need at least 2 trials, got {trials}")


def _check_models(models: Mapping[int, LabelModel], labels, shape: tuple[int, int]) -> None:
    for lab in set(labels):
        if lab not in models:
            raise DomainError(f"no ensemble/mask configured for label {lab}")
        if models[lab].mask.shape != shape:
            raise DomainError(f"mask for label {lab} has shape {models[lab].mask.shape}, expected {shape}")


def estimate_word_moment(models: Mapping[int, LabelModel], word: Word, n: int, trials: int, seed: int,
                         threads: int | None = None) -> MomentEstimate:
    """Mean of ``word_trace`` over fresh ``n^{-1/2} D * X`` samples, one independent matrix per label."""
    _check_trials(trials)
    if n < 8:
        raise ConfigurationError(f"n must be at least 8, got {n}")
    _check_models(models, word.labels, (n, n))
    labels = sorted(set(word.labels))
    specs = {lab: models[lab].spec.resized(n) for lab in labels}

    def one(t: int) -> float:
        mats = {lab: masked_normalized(models[lab].mask, sample(specs[lab], substream(seed, t, lab)))
                for lab in labels}
        return word_trace(mats, word)

    return _summarise(_run_trials(one, trials, threads), n, word)


def _covariance_trace(grams: Sequence[np.ndarray]) -> float:
    acc = grams[0]
    for g in grams[1:]:
        acc = acc @ g
    return float(np.trace(acc)) / acc.shape[0]


def estimate_covariance_moment(D: MaskMatrix, spec: EnsembleSpec, k: int, trials: int, seed: int,
                               threads: int | None = None) -> MomentEstimate:
    """Mean of ``(1/p) Tr(Xbar^k)`` with ``Xbar = (1/n)(D * X)(D * X)^T``."""
    if not 1 <= k <= 6:
        raise ConfigurationError(f"covariance power must be in 1..6, got {k}")
    return estimate_covariance_word_moment({1: LabelModel(spec, D)}, [1] * k, trials, seed, threads)


def estimate_covariance_word_moment(models: Mapping[int, LabelModel], labels: Sequence[int], trials: int,
                                    seed: int, threads: int | None = None) -> MomentEstimate:
    """Mean of ``(1/p) Tr(Xbar^(t1) ... Xbar^(tk))`` for independent masked covariances."""
    _check_trials(trials)
    if not labels:
        raise ConfigurationError("need at least one covariance factor")
    shape = models[labels[0]].mask.shape if labels[0] in models else (0, 0)
    _check_models(models, labels, shape)
    p, n = shape
    if p < 32 or n < 32:
        raise ConfigurationError(f"covariance runs need p, n >= 32, got p={p}, n={n}")
    uniq = sorted(set(labels))
    specs = {lab: models[lab].spec.resized(p, n) for lab in uniq}

    def one(t: int) -> float:
        grams = {lab: covariance_matrix(models[lab].mask, sample(specs[lab], substream(seed, t, lab)))
                 for lab in uniq}
        return _covariance_trace([grams[lab] for lab in labels])

    return _summarise(_run_trials(one, trials, threads), n, tuple(labels))


@dataclass(frozen=True)
class FreenessRow:
    word: str
    estimate: MomentEstimate
    limit: float
    gap: float
    tolerance: float
    passed: bool


def _row(word: str, est: MomentEstimate, limit: float, n: int, sigmas: float, bias_constant: float) -> FreenessRow:
    tol = tolerance(est.std_error, n, sigmas, bias_constant)
    gap = est.gap(limit)
    return FreenessRow(word, est, limit, gap, tol, gap <= tol)


def word_limit(models: Mapping[int, LabelModel], word: Word) -> float:
    """Free elliptic limit of ``word`` with each label's ``rho``."""
    return free_family_mixed_moment(word, {lab: m.spec.rho for lab, m in models.items()})


def freeness_test(models: Mapping[int, LabelModel], words: Sequence[Word], n: int, trials: int, seed: int, *,
                  sigmas: float = SIGMAS, bias_constant: float = BIAS_CONSTANT,
                  threads: int | None = None) -> list[FreenessRow]:
    """Compare Monte Carlo mixed moments with the free-family limits, one row per word."""
    rows = []
    for word in words:
        est = estimate_word_moment(models, word, n, trials, seed, threads)
        rows.append(_row(str(word), est, word_limit(models, word), n, sigmas, bias_constant))
    return rows


def covariance_freeness_test(models: Mapping[int, LabelModel], words: Sequence[Sequence[int]], trials: int,
                             seed: int, *, sigmas: float = SIGMAS, bias_constant: float = BIAS_CONSTANT,
                             threads: int | None = None) -> list[FreenessRow]:
    """Covariance analogue of :func:`freeness_test`; limits use ``y = p / n`` of the masks."""
    rows = []
    for labels in words:
        est = estimate_covariance_word_moment(models, list(labels), trials, seed, threads)
        p, n = models[labels[0]].mask.shape
        limit = covariance_mixed_moment(list(labels), p / n)
        rows.append(_row("cov:" + ",".join(map(str, labels)), est, limit, n, sigmas, bias_constant))
    return rows
