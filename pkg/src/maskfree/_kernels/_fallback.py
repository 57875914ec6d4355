"""Pure Python / numpy versions of the compiled kernels (same signatures)."""
from __future__ import annotations

import itertools
import math

import numpy as np

_CHUNK = 1 << 20


def _edge_view(D, ro, co, fixed, axis, ndim):
    # boolean view of one d-factor, broadcastable over the inner orbit axes
    if ro in fixed and co in fixed:
        return D[fixed[ro], fixed[co]]
    shape = [1] * ndim
    if ro in fixed:
        shape[axis[co]] = D.shape[1]
        return D[fixed[ro], :].reshape(shape)
    if co in fixed:
        shape[axis[ro]] = D.shape[0]
        return D[:, fixed[co]].reshape(shape)
    if ro == co:
        shape[axis[ro]] = min(D.shape)
        return np.diagonal(D).reshape(shape)
    block = D if axis[ro] < axis[co] else D.T
    lo, hi = sorted((axis[ro], axis[co]))
    shape[lo], shape[hi] = block.shape
    return block.reshape(shape)


def orbit_weight_count(D, row_orbit, col_orbit, sizes) -> int:
    D = np.asarray(D, dtype=bool)
    sizes = [int(s) for s in sizes]
    if any(s <= 0 for s in sizes):
        return 0
    n_orb = len(sizes)
    inner: list[int] = []
    volume = 1
    for o in reversed(range(n_orb)):
        if inner and volume * sizes[o] > _CHUNK:
            break
        inner.insert(0, o)
        volume *= sizes[o]
    outer = [o for o in range(n_orb) if o not in inner]
    axis = {o: i for i, o in enumerate(inner)}
    shape = tuple(sizes[o] for o in inner)
    edges = list(zip((int(r) for r in row_orbit), (int(c) for c in col_orbit)))
    total = 0
    for combo in itertools.product(*(range(sizes[o]) for o in outer)):
        fixed = dict(zip(outer, combo))
        acc = np.ones(shape, dtype=bool)
        for ro, co in edges:
            acc &= _edge_view(D, ro, co, fixed, axis, len(inner))
        total += int(np.count_nonzero(acc))
    return total


def tred2(V, d, e) -> None:
    """Householder tridiagonalisation, vectorised over the inner loops."""
    n = V.shape[0]
    d[:] = V[n - 1, :]
    for i in range(n - 1, 0, -1):
        scale = float(np.abs(d[:i]).sum())
        h = 0.0
        if scale == 0.0:
            e[i] = d[i - 1]
            d[:i] = V[i - 1, :i]
            V[i, :i] = 0.0
            V[:i, i] = 0.0
        else:
            d[:i] /= scale
            h = float(d[:i] @ d[:i])
            f = d[i - 1]
            g = math.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h -= f * g
            d[i - 1] = f - g
            V[:i, i] = d[:i]
            low = np.tril(V[:i, :i])
            sym = low + np.tril(low, -1).T
            e[:i] = sym @ d[:i] / h
            hh = float(e[:i] @ d[:i]) / (h + h)
            e[:i] -= hh * d[:i]
            V[:i, :i] -= np.tril(np.outer(e[:i], d[:i]) + np.outer(d[:i], e[:i]))
            d[:i] = V[i - 1, :i]
            V[i, :i] = 0.0
        d[i] = h

    for i in range(n - 1):
        V[n - 1, i] = V[i, i]
        V[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            d[:i + 1] = V[:i + 1, i + 1] / h
            g = V[:i + 1, i + 1] @ V[:i + 1, :i + 1]
            V[:i + 1, :i + 1] -= np.outer(d[:i + 1], g)
        V[:i + 1, i + 1] = 0.0
    d[:] = V[n - 1, :]
    V[n - 1, :] = 0.0
    V[n - 1, n - 1] = 1.0
    e[0] = 0.0


def tql2(d, e, V, want_vectors, max_iter=60) -> int:
    n = len(d)
    dd = [float(x) for x in d]
    ee = [float(x) for x in e[1:]] + [0.0]
    eps = 2.0 ** -52
    f = 0.0
    tst1 = 0.0
    status = 0
    for l in range(n):
        tst1 = max(tst1, abs(dd[l]) + abs(ee[l]))
        m = l
        while m < n - 1 and abs(ee[m]) > eps * tst1:
            m += 1
        if m > l:
            it = 0
            while True:
                it += 1
                if it > max_iter:
                    status = l + 1
                    break
                g = dd[l]
                p = (dd[l + 1] - g) / (2.0 * ee[l])
                r = math.hypot(p, 1.0)
                if p < 0:
                    r = -r
                dd[l] = ee[l] / (p + r)
                dd[l + 1] = ee[l] * (p + r)
                dl1 = dd[l + 1]
                h = g - dd[l]
                for i in range(l + 2, n):
                    dd[i] -= h
                f += h
                p = dd[m]
                c = c2 = c3 = 1.0
                el1 = ee[l + 1]
                s = s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * ee[i]
                    h = c * p
                    r = math.hypot(p, ee[i])
                    ee[i + 1] = s * r
                    s = ee[i] / r
                    c = p / r
                    p = c * dd[i] - s * g
                    dd[i + 1] = h + s * (c * g + s * dd[i])
                    if want_vectors:
                        left = V[:, i].copy()
                        right = V[:, i + 1].copy()
                        V[:, i + 1] = s * left + c * right
                        V[:, i] = c * left - s * right
                p = -s * s2 * c3 * el1 * ee[l] / dl1
                ee[l] = s * p
                dd[l] = c * p
                if abs(ee[l]) <= eps * tst1:
                    break
            if status:
                break
        dd[l] += f
        ee[l] = 0.0
    d[:] = dd
    e[:] = ee
    return status
