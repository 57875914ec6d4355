"""Exact limiting moments: elliptic/circular families, Marchenko-Pastur.

Every moment here is a finite sum over non-crossing pair partitions, so the
values are exact up to floating-point evaluation of the weights.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .combinat import K_MAX, enumerate_nc2, gamma_pi_orbits
from .errors import ConfigurationError, DomainError, SizeLimitError, WordParseError

STAR = "*"


@dataclass(frozen=True)
class Word:
    """A mixed moment ``x_{t1}^{e1} ... x_{tk}^{ek}`` as (label, starred) letters."""

    letters: tuple[tuple[int, bool], ...]

    def __post_init__(self):
        if not self.letters:
            raise ConfigurationError("a word needs at least one letter")
        letters = tuple((int(lab), bool(star)) for lab, star in self.letters)
        object.__setattr__(self, "letters", letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return ",".join(f"{lab}{STAR if star else ''}" for lab, star in self.letters)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(lab for lab, _ in self.letters)

    @property
    def stars(self) -> tuple[bool, ...]:
        return tuple(star for _, star in self.letters)

    @classmethod
    def single(cls, stars: Iterable, label: int = 1) -> "Word":
        return cls(tuple((label, _as_star(e)) for e in stars))


def _as_star(flag) -> bool:
    # identity checks for booleans: 1 == True would otherwise read as a star
    if flag is True or (isinstance(flag, str) and flag == STAR):
        return True
    if flag is False or (isinstance(flag, str) and flag == "1") or (type(flag) is int and flag == 1):
        return False
    raise ConfigurationError(f"star flag must be 1 or '*', got {flag!r}")


def parse_word(text: str) -> Word:
    """Parse ``"1,2,1*,2*"`` into a :class:`Word`.

    Raises :class:`WordParseError` carrying the 1-based column of the problem.
    """
    letters = []
    col = 1
    for token in text.split(","):
        body = token.strip()
        lead = len(token) - len(token.lstrip())
        if not body:
            raise WordParseError("empty letter", col)
        star = body.endswith(STAR)
        digits = body[:-1] if star else body
        if not digits.isdigit():
            bad = next((i for i, ch in enumerate(digits) if not ch.isdigit()), len(digits))
            raise WordParseError(f"bad letter {body!r}", col + lead + bad)
        if int(digits) < 1:
            raise WordParseError("labels must be positive integers", col + lead)
        letters.append((int(digits), star))
        col += len(token) + 1
    return Word(tuple(letters))


def _check_length(length: int) -> None:
    if length > 2 * K_MAX:
        raise SizeLimitError(f"word length {length} exceeds 2*K_MAX={2 * K_MAX}")


def free_family_mixed_moment(word: Word, rhos: Mapping[int, float]) -> float:
    """Mixed moment of free elliptic variables with parameters ``rhos[label]``.

    Pairs joining different labels contribute zero; a pair with opposite stars
    contributes 1 and one with equal stars contributes the label's ``rho``.
    """
    _check_length(len(word))
    missing = sorted(set(word.labels) - set(rhos))
    if missing:
        raise ConfigurationError(f"no rho given for labels {missing}")
    for lab in set(word.labels):
        if abs(rhos[lab]) > 1:
            raise DomainError(f"|rho| must be <= 1, got rho[{lab}]={rhos[lab]}")
    if len(word) % 2:
        return 0.0
    labels, stars = word.labels, word.stars
    total = 0.0
    for pi in enumerate_nc2(len(word) // 2):
        term = 1.0
        for r, s in pi.pairs:
            if labels[r - 1] != labels[s - 1]:
                term = 0.0
                break
            if stars[r - 1] == stars[s - 1]:
                term *= rhos[labels[r - 1]]
        total += term
    return total


def elliptic_star_moment(eps: Sequence, rho: float) -> float:
    """``phi(e^{eps_1} ... e^{eps_p})`` for an elliptic variable; ``rho = 0`` is circular.

    ``eps`` entries are ``1``/``"1"``/``False`` (plain) or ``"*"``/``True`` (adjoint).
    """
    if abs(rho) > 1:
        raise DomainError(f"|rho| must be <= 1, got {rho}")
    if not len(eps):
        raise ConfigurationError("empty star sequence")
    return free_family_mixed_moment(Word.single(eps), {1: rho})


def _odd_orbit_count(pi) -> int:
    return sum(1 for orb in gamma_pi_orbits(pi) if all(r % 2 == 1 for r in orb))


def mp_moment_nc(k: int, y: float) -> float:
    """k-th Marchenko-Pastur moment as ``sum over NC2(2k)`` of ``y**(u - 1)``.

    ``u`` counts the gamma-pi orbits made only of odd (row-index) positions.
    """
    return covariance_mixed_moment([1] * k, y)


def covariance_mixed_moment(labels: Sequence[int], y: float) -> float:
    """Limit of ``(1/p) E Tr(Xbar^(t1) ... Xbar^(tk))`` for independent masked covariances.

    Each factor ``Xbar^(t)`` occupies positions ``2t - 1`` (plain) and ``2t``
    (adjoint); only pairings within one label survive.
    """
    if y <= 0:
        raise DomainError(f"y must be positive, got {y}")
    k = len(labels)
    if k < 1:
        raise ConfigurationError("need at least one factor")
    expanded = [lab for lab in labels for _ in range(2)]
    total = 0.0
    for pi in enumerate_nc2(k):
        if all(expanded[r - 1] == expanded[s - 1] for r, s in pi.pairs):
            total += y ** (_odd_orbit_count(pi) - 1)
    return total


def mp_moment_closed(k: int, y: float) -> float:
    """Narayana closed form ``sum_r y^r/(r+1) C(k,r) C(k-1,r)``."""
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if k > 30:
        raise SizeLimitError(f"k={k} exceeds 30")
    return sum(y**r * math.comb(k, r) * math.comb(k - 1, r) / (r + 1) for r in range(k))


@dataclass(frozen=True)
class MPLaw:
    """Marchenko-Pastur law with aspect ratio ``y``."""

    y: float

    def __post_init__(self):
        if not (self.y > 0 and math.isfinite(self.y)):
            raise DomainError(f"y must be a positive real, got {self.y}")

    @property
    def a(self) -> float:
        return (1 - math.sqrt(self.y)) ** 2

    @property
    def b(self) -> float:
        return (1 + math.sqrt(self.y)) ** 2

    @property
    def atom(self) -> float:
        return max(0.0, 1 - 1 / self.y)


def mp_density(x: float, law: MPLaw) -> float:
    """Absolutely continuous part only; the atom at 0 (``y > 1``) is excluded."""
    a, b, y = law.a, law.b, law.y
    if x <= 0 or x < a or x > b:
        return 0.0
    return math.sqrt(max(0.0, (b - x) * (x - a))) / (2 * math.pi * x * y)


# --- quadrature -----------------------------------------------------------
# x = m + h sin(theta) maps [a, b] to [-pi/2, pi/2] and turns f(x) dx into the
# smooth integrand h^2 cos^2 / (2 pi y x); with a = 0 the 1/sqrt(x) edge cancels.

QUAD_TOL = 1e-10


def _theta(x: float, law: MPLaw) -> float:
    m, h = (law.a + law.b) / 2, (law.b - law.a) / 2
    return math.asin(min(1.0, max(-1.0, (x - m) / h)))


def _theta_integrand(fn: Callable[[float], float], law: MPLaw) -> Callable[[float], float]:
    a, y = law.a, law.y
    m, h = (law.a + law.b) / 2, (law.b - law.a) / 2
    scale = 1 / (2 * math.pi * y)

    def g(theta: float) -> float:
        s = math.sin(theta)
        t = 1 + s
        x = a + h * t
        if a == 0:
            base = h * (1 - s) * scale
        else:
            base = h * h * (1 - s) * t * scale / x
        return base * fn(m + h * s)

    return g


def adaptive_simpson(g: Callable[[float], float], lo: float, hi: float, tol: float = QUAD_TOL,
                     max_depth: int = 50, panels: int = 8) -> float:
    """Adaptive Simpson rule with Richardson correction.

    The interval is first cut into ``panels`` pieces; a single symmetric panel
    can report a spuriously small error estimate.
    """
    if hi <= lo:
        return 0.0
    edges = [lo + (hi - lo) * i / panels for i in range(panels)] + [hi]
    return math.fsum(_simpson_panel(g, edges[i], edges[i + 1], tol / panels, max_depth)
                     for i in range(panels))


def _simpson_panel(g, lo, hi, tol, max_depth):
    f_lo, f_hi, f_mid = g(lo), g(hi), g((lo + hi) / 2)
    whole = (hi - lo) * (f_lo + 4 * f_mid + f_hi) / 6

    def recurse(lo, hi, f_lo, f_mid, f_hi, whole, tol, depth):
        mid = (lo + hi) / 2
        lm, rm = (lo + mid) / 2, (mid + hi) / 2
        f_lm, f_rm = g(lm), g(rm)
        left = (mid - lo) * (f_lo + 4 * f_lm + f_mid) / 6
        right = (hi - mid) * (f_mid + 4 * f_rm + f_hi) / 6
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * tol:
            return left + right + delta / 15
        return (recurse(lo, mid, f_lo, f_lm, f_mid, left, tol / 2, depth - 1)
                + recurse(mid, hi, f_mid, f_rm, f_hi, right, tol / 2, depth - 1))

    return recurse(lo, hi, f_lo, f_mid, f_hi, whole, tol, max_depth)


def mp_integrate(fn: Callable[[float], float], law: MPLaw, lo: float = -math.inf, hi: float = math.inf,
                 tol: float = QUAD_TOL) -> float:
    """``integral of fn(x) f(x) dx`` over ``[lo, hi]`` intersected with the support ``[a, b]``."""
    lo, hi = max(lo, law.a), min(hi, law.b)
    if hi <= lo:
        return 0.0
    return adaptive_simpson(_theta_integrand(fn, law), _theta(lo, law), _theta(hi, law), tol)


def _one(x: float) -> float:
    return 1.0


def mp_cdf(x: float, law: MPLaw) -> float:
    if x < 0:
        return 0.0
    return min(1.0, law.atom + mp_integrate(_one, law, hi=x))


def mp_cdf_many(xs, law: MPLaw) -> np.ndarray:
    """Vectorised :func:`mp_cdf`: integrates once across the sorted points."""
    xs = np.asarray(xs, dtype=float)
    order = np.argsort(xs, kind="stable")
    out = np.empty_like(xs)
    acc = 0.0
    prev = law.a
    for idx in order:
        x = xs[idx]
        if x < 0:
            out[idx] = 0.0
            continue
        upper = min(x, law.b)
        if upper > prev:
            acc += mp_integrate(_one, law, lo=prev, hi=upper)
            prev = upper
        out[idx] = min(1.0, law.atom + acc)
    return out


def mp_moment_quadrature(k: int, law: MPLaw) -> float:
    """``integral x^k dMP_y``; the atom sits at 0 so only contributes for ``k = 0``."""
    atom_part = law.atom if k == 0 else 0.0
    return atom_part + mp_integrate(lambda x: x**k, law)
