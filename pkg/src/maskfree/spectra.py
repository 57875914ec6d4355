"""Spectra of masked sample covariance matrices and their distance to MP_y."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .ensembles import SampledMatrix
from .errors import DomainError
from .freelimits import MPLaw, mp_cdf_many, mp_density
from .masks import MaskMatrix

PSD_CLAMP = 1e-8
SYM_TOL = 1e-12


class YMismatchWarning(UserWarning):
    """Sample aspect ratio differs from the law's ``y`` by more than 0.01."""


def covariance_matrix(D: MaskMatrix, X: SampledMatrix | np.ndarray) -> np.ndarray:
    """``(1/n) Y Y^T`` with ``Y = D * X``; the lower triangle mirrors the upper one exactly."""
    values = X.values if isinstance(X, SampledMatrix) else np.asarray(X, dtype=float)
    if values.shape != D.shape:
        raise DomainError(f"mask shape {D.shape} does not match matrix shape {values.shape}")
    Y = np.where(D.entries == 1, values, 0.0)
    W = (Y @ Y.T) / D.n
    upper = np.triu(W)
    return upper + np.triu(upper, 1).T


@dataclass(frozen=True, eq=False)
class SpectralSample:
    eigenvalues: np.ndarray
    p: int
    n: int

    @property
    def y(self) -> float:
        return self.p / self.n

    @classmethod
    def from_eigenvalues(cls, eigenvalues, n: int) -> "SpectralSample":
        lam = np.sort(np.asarray(eigenvalues, dtype=float))
        # rank deficiency leaves zeros at rounding level on either side of 0
        lam = np.where(np.abs(lam) <= PSD_CLAMP, 0.0, lam)
        return cls(lam, len(lam), n)

    def empirical_cdf(self, x: float) -> float:
        return np.searchsorted(self.eigenvalues, x, side="right") / self.p


def _check_symmetric(M: np.ndarray) -> np.ndarray:
    M = np.ascontiguousarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError(f"need a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    if np.abs(M - M.T).max(initial=0.0) > SYM_TOL * scale:
        raise DomainError("matrix is not symmetric")
    return M


def eigh_symmetric(M: np.ndarray, want_vectors: bool = True) -> tuple[np.ndarray, np.ndarray | None]:
    """Householder tridiagonalisation followed by implicit-shift QL.

    Returns ascending eigenvalues and, if requested, the matching orthonormal
    eigenvectors as columns.
    """
    M = _check_symmetric(M)
    n = M.shape[0]
    if n == 0:
        return np.empty(0), (np.empty((0, 0)) if want_vectors else None)
    V = M.copy()
    d = np.zeros(n)
    e = np.zeros(n)
    _kernels.tred2(V, d, e)
    status = _kernels.tql2(d, e, V, bool(want_vectors))
    if status:
        raise ArithmeticError(f"QL iteration did not converge for eigenvalue {status - 1}")
    order = np.argsort(d, kind="stable")
    return d[order], (V[:, order] if want_vectors else None)


def eigenvalues_symmetric(M: np.ndarray) -> np.ndarray:
    return eigh_symmetric(M, want_vectors=False)[0]


def spectral_sample(D: MaskMatrix, X: SampledMatrix) -> SpectralSample:
    return SpectralSample.from_eigenvalues(eigenvalues_symmetric(covariance_matrix(D, X)), D.n)


def ks_distance(s: SpectralSample, law: MPLaw) -> float:
    """Two-sided sup ``|F_emp - F_MP|`` over the jump points and 0.

    Both CDFs are right-continuous, so the supremum is attained at a jump
    point or just below one; the MP cdf itself jumps at 0 when ``y > 1``.
    """
    lam = np.asarray(s.eigenvalues, dtype=float)
    if lam.size == 0:
        raise DomainError("empty spectrum")
    if abs(law.y - s.y) > 0.01:
        warnings.warn(f"sample y={s.y:.4g} differs from law y={law.y:.4g}", YMismatchWarning, stacklevel=2)
    lam = np.sort(lam)
    p = lam.size
    pts = np.concatenate([lam, [0.0]])
    F = mp_cdf_many(pts, law)
    F_at, F_zero = F[:-1], F[-1]
    # MP cdf just below a point: equal to the value except at the atom
    F_below = np.where(lam == 0.0, 0.0, F_at) if law.atom > 0 else F_at
    upper = np.searchsorted(lam, lam, side="right") / p
    lower = np.searchsorted(lam, lam, side="left") / p
    emp_zero = np.searchsorted(lam, 0.0, side="right") / p
    emp_below_zero = np.searchsorted(lam, 0.0, side="left") / p
    cands = [
        np.abs(upper - F_at).max(),
        np.abs(lower - F_below).max(),
        abs(emp_zero - F_zero),
        abs(emp_below_zero - 0.0),
    ]
    return float(min(1.0, max(cands)))


def histogram(s: SpectralSample, law: MPLaw, bins: int = 60) -> list[tuple[float, float, int, float]]:
    """Rows ``(bin_left, bin_right, count, mp_density_at_mid)`` spanning ``[0, max(b, lambda_max)]``."""
    hi = max(law.b, float(s.eigenvalues.max(initial=0.0)))
    counts, edges = np.histogram(s.eigenvalues, bins=bins, range=(0.0, hi))
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i]), mp_density((edges[i] + edges[i + 1]) / 2, law))
        for i in range(bins)
    ]
