"""Pair partitions of ``{1, ..., 2k}`` and the cycle statistics of ``gamma * pi``.

A pair partition is stored in canonical form: pairs ``(r, s)`` with ``r < s``,
sorted by first element.  It doubles as the involution swapping each pair, and
``gamma`` is the full cycle ``r -> r + 1 (mod 2k)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterator

from .errors import DomainError, SizeLimitError

K_MAX = 8
CATALAN_MAX = 30


@dataclass(frozen=True)
class Permutation:
    """Bijection on ``{1, ..., size}``; ``images[r - 1]`` is the image of ``r``."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise DomainError(f"not a bijection on 1..{len(self.images)}: {self.images}")

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, r: int) -> int:
        return self.images[r - 1]

    def cycles(self) -> list[tuple[int, ...]]:
        """Cycles in order of their smallest element, each starting there."""
        seen = [False] * (self.size + 1)
        out = []
        for start in range(1, self.size + 1):
            if seen[start]:
                continue
            cyc = []
            r = start
            while not seen[r]:
                seen[r] = True
                cyc.append(r)
                r = self.images[r - 1]
            out.append(tuple(cyc))
        return out


@dataclass(frozen=True)
class PairPartition:
    """Perfect matching of ``{1, ..., 2k}`` in canonical order."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted((min(r, s), max(r, s)) for r, s in self.pairs))
        if not pairs:
            raise DomainError("a pair partition needs at least one pair")
        flat = sorted(x for pr in pairs for x in pr)
        if flat != list(range(1, 2 * len(pairs) + 1)):
            raise DomainError(f"pairs do not form a perfect matching of 1..{2 * len(pairs)}: {self.pairs}")
        object.__setattr__(self, "pairs", pairs)

    @property
    def k(self) -> int:
        return len(self.pairs)

    @classmethod
    def parse(cls, text: str) -> "PairPartition":
        """Read the ``(1,2)(3,4)`` notation used by the CLI."""
        body = text.replace(" ", "")
        if not body.startswith("(") or not body.endswith(")"):
            raise DomainError(f"malformed partition {text!r}")
        pairs = []
        for chunk in body[1:-1].split(")("):
            parts = chunk.split(",")
            if len(parts) != 2:
                raise DomainError(f"malformed pair {chunk!r} in {text!r}")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise DomainError(f"malformed pair {chunk!r} in {text!r}") from None
        return cls(tuple(pairs))

    def __str__(self) -> str:
        return "".join(f"({r},{s})" for r, s in self.pairs)

    def involution(self) -> Permutation:
        images = [0] * (2 * self.k)
        for r, s in self.pairs:
            images[r - 1] = s
            images[s - 1] = r
        return Permutation(tuple(images))

    def partner(self) -> list[int]:
        """Mate table indexed by position: ``partner()[r]`` pairs with ``r`` (slot 0 unused)."""
        out = [0] * (2 * self.k + 1)
        for r, s in self.pairs:
            out[r] = s
            out[s] = r
        return out


def _check_k(k: int, k_max: int | None) -> int:
    limit = K_MAX if k_max is None else k_max
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if k > limit:
        raise SizeLimitError(f"k={k} exceeds K_MAX={limit}")
    return k


def _matchings(free: list[int]) -> Iterator[list[tuple[int, int]]]:
    # smallest unmatched element paired with each larger one, in increasing order
    if not free:
        yield []
        return
    first, rest = free[0], free[1:]
    for idx, mate in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1:]
        for tail in _matchings(remaining):
            yield [(first, mate)] + tail


def _nc_matchings(lo: int, hi: int) -> Iterator[list[tuple[int, int]]]:
    # non-crossing matchings of the interval lo..hi (inclusive), lexicographic order
    if lo > hi:
        yield []
        return
    for mate in range(lo + 1, hi + 1, 2):
        for inner in _nc_matchings(lo + 1, mate - 1):
            for outer in _nc_matchings(mate + 1, hi):
                yield [(lo, mate)] + inner + outer


@lru_cache(maxsize=None)
def _all_pair_partitions(k: int) -> tuple[PairPartition, ...]:
    return tuple(PairPartition(tuple(m)) for m in _matchings(list(range(1, 2 * k + 1))))


@lru_cache(maxsize=None)
def _nc_pair_partitions(k: int) -> tuple[PairPartition, ...]:
    found = (PairPartition(tuple(m)) for m in _nc_matchings(1, 2 * k))
    # lexicographic order of the pair list is exactly the canonical enumeration order
    return tuple(sorted(found, key=lambda p: p.pairs))


def enumerate_pair_partitions(k: int, *, k_max: int | None = None) -> tuple[PairPartition, ...]:
    """All ``(2k - 1)!!`` pair partitions of ``{1, ..., 2k}`` in canonical order."""
    return _all_pair_partitions(_check_k(k, k_max))


def enumerate_nc2(k: int, *, k_max: int | None = None) -> tuple[PairPartition, ...]:
    """The ``catalan(k)`` non-crossing pair partitions, in the same order as
    :func:`enumerate_pair_partitions` restricted by :func:`is_noncrossing`.

    They are generated directly by nesting rather than by filtering, so
    ``k = 8`` stays cheap.
    """
    return _nc_pair_partitions(_check_k(k, k_max))


def is_noncrossing(p: PairPartition) -> bool:
    pairs = p.pairs
    for i, (a, b) in enumerate(pairs):
        for c, d in pairs[i + 1:]:
            if a < c < b < d:
                return False
    return True


def gamma_pi(p: PairPartition) -> Permutation:
    """The permutation ``r -> gamma(pi(r))`` on ``{1, ..., 2k}``."""
    m = 2 * p.k
    mate = p.partner()
    return Permutation(tuple(mate[r] % m + 1 for r in range(1, m + 1)))


def gamma_pi_orbits(p: PairPartition) -> list[frozenset[int]]:
    """Cycles of ``gamma * pi`` as position sets, ordered by smallest element."""
    return [frozenset(c) for c in gamma_pi(p).cycles()]


def gamma_pi_orbit_count(p: PairPartition) -> int:
    return len(gamma_pi(p).cycles())


def orbit_labels(p: PairPartition) -> list[int]:
    """0-based orbit id of every position; ``labels[r - 1]`` for position ``r``."""
    labels = [0] * (2 * p.k)
    for idx, orbit in enumerate(gamma_pi_orbits(p)):
        for r in orbit:
            labels[r - 1] = idx
    return labels


def catalan(m: int) -> int:
    if not isinstance(m, int) or m < 0:
        raise SizeLimitError(f"catalan needs a nonnegative integer, got {m!r}")
    if m > CATALAN_MAX:
        raise SizeLimitError(f"catalan({m}) exceeds the supported bound {CATALAN_MAX}")
    return comb(2 * m, m) // (m + 1)


def double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out
