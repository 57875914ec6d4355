# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: orbit-reduced mask sums and the symmetric eigensolver."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, hypot

cnp.import_array()


def orbit_weight_count(const cnp.uint8_t[:, ::1] D,
                       const cnp.int64_t[::1] row_orbit,
                       const cnp.int64_t[::1] col_orbit,
                       const cnp.int64_t[::1] sizes):
    """Number of orbit assignments with ``D[idx[row_orbit[e]], idx[col_orbit[e]]] == 1`` for every edge.

    Orbits are assigned in order; an edge is tested once both of its orbits
    are fixed and a zero prunes the subtree, whose terms all vanish.  The last
    orbit is swept as a bytewise AND of contiguous rows of ``D``, ``D^T`` or
    the diagonal.
    """
    cdef Py_ssize_t n_orb = sizes.shape[0]
    cdef Py_ssize_t n_edge = row_orbit.shape[0]
    cdef Py_ssize_t e, o, lvl, last, m
    cdef cnp.int64_t total = 0
    cdef bint ok

    for o in range(n_orb):
        if sizes[o] <= 0:
            return 0
    last = n_orb - 1
    m = sizes[last]
    # edges grouped by the later of their two orbits
    level = np.maximum(np.asarray(row_orbit), np.asarray(col_orbit))
    order = np.argsort(level, kind="stable")
    cdef cnp.int64_t[::1] er = np.ascontiguousarray(np.asarray(row_orbit)[order])
    cdef cnp.int64_t[::1] ec = np.ascontiguousarray(np.asarray(col_orbit)[order])
    cdef cnp.int64_t[::1] first = np.searchsorted(level[order], np.arange(n_orb + 1)).astype(np.int64)
    cdef const cnp.uint8_t[:, ::1] DT = np.ascontiguousarray(np.asarray(D).T)
    cdef const cnp.uint8_t[::1] diag = np.ascontiguousarray(np.diagonal(np.asarray(D)))
    cdef cnp.uint8_t[::1] buf = np.empty(m, dtype=np.uint8)
    cdef cnp.int64_t[::1] idx = np.zeros(n_orb, dtype=np.int64)

    with nogil:
        lvl = 0
        idx[0] = -1
        if last == 0:
            lvl = -1
        while lvl >= 0:
            idx[lvl] += 1
            if idx[lvl] >= sizes[lvl]:
                lvl -= 1
                continue
            ok = True
            for e in range(first[lvl], first[lvl + 1]):
                if D[idx[er[e]], idx[ec[e]]] == 0:
                    ok = False
                    break
            if not ok:
                continue
            if lvl < last - 1:
                lvl += 1
                idx[lvl] = -1
                continue
            total += _sweep_last(D, DT, diag, er, ec, first[last], first[last + 1], idx, last, buf, m)
        if last == 0:
            total = _sweep_last(D, DT, diag, er, ec, first[0], first[1], idx, 0, buf, m)
    return total


cdef cnp.int64_t _sweep_last(const cnp.uint8_t[:, ::1] D, const cnp.uint8_t[:, ::1] DT,
                             const cnp.uint8_t[::1] diag, const cnp.int64_t[::1] er,
                             const cnp.int64_t[::1] ec, Py_ssize_t lo, Py_ssize_t hi,
                             const cnp.int64_t[::1] idx, Py_ssize_t last, cnp.uint8_t[::1] buf,
                             Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t e, j, t
    cdef cnp.int64_t hits = 0
    cdef const cnp.uint8_t* src[2]
    cdef const cnp.uint8_t* row
    if hi == lo:
        return m
    t = 0
    for e in range(lo, hi):
        if er[e] == last and ec[e] == last:
            row = &diag[0]
        elif er[e] == last:
            row = &DT[idx[ec[e]], 0]
        else:
            row = &D[idx[er[e]], 0]
        if hi - lo <= 2:
            src[t] = row
            t += 1
        else:
            if e == lo:
                for j in range(m):
                    buf[j] = row[j]
            else:
                for j in range(m):
                    buf[j] &= row[j]
    if hi - lo == 1:
        for j in range(m):
            hits += src[0][j]
    elif hi - lo == 2:
        for j in range(m):
            hits += src[0][j] & src[1][j]
    else:
        for j in range(m):
            hits += buf[j]
    return hits


def tred2(double[:, ::1] V, double[::1] d, double[::1] e):
    """Householder reduction of the symmetric matrix held in ``V`` (overwritten).

    On exit ``d`` is the diagonal, ``e[1:]`` the subdiagonal and ``V`` the
    orthogonal transform.
    """
    cdef Py_ssize_t n = V.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double scale, h, f, g, hh
    with nogil:
        for j in range(n):
            d[j] = V[n - 1, j]
        for i in range(n - 1, 0, -1):
            scale = 0.0
            h = 0.0
            for k in range(i):
                scale = scale + fabs(d[k])
            if scale == 0.0:
                e[i] = d[i - 1]
                for j in range(i):
                    d[j] = V[i - 1, j]
                    V[i, j] = 0.0
                    V[j, i] = 0.0
            else:
                for k in range(i):
                    d[k] /= scale
                    h += d[k] * d[k]
                f = d[i - 1]
                g = sqrt(h)
                if f > 0:
                    g = -g
                e[i] = scale * g
                h = h - f * g
                d[i - 1] = f - g
                for j in range(i):
                    e[j] = 0.0
                for j in range(i):
                    f = d[j]
                    V[j, i] = f
                    g = e[j] + V[j, j] * f
                    for k in range(j + 1, i):
                        g += V[k, j] * d[k]
                        e[k] += V[k, j] * f
                    e[j] = g
                f = 0.0
                for j in range(i):
                    e[j] /= h
                    f += e[j] * d[j]
                hh = f / (h + h)
                for j in range(i):
                    e[j] -= hh * d[j]
                for j in range(i):
                    f = d[j]
                    g = e[j]
                    for k in range(j, i):
                        V[k, j] -= (f * e[k] + g * d[k])
                    d[j] = V[i - 1, j]
                    V[i, j] = 0.0
            d[i] = h

        for i in range(n - 1):
            V[n - 1, i] = V[i, i]
            V[i, i] = 1.0
            h = d[i + 1]
            if h != 0.0:
                for k in range(i + 1):
                    d[k] = V[k, i + 1] / h
                for j in range(i + 1):
                    g = 0.0
                    for k in range(i + 1):
                        g += V[k, i + 1] * V[k, j]
                    for k in range(i + 1):
                        V[k, j] -= g * d[k]
            for k in range(i + 1):
                V[k, i + 1] = 0.0
        for j in range(n):
            d[j] = V[n - 1, j]
            V[n - 1, j] = 0.0
        V[n - 1, n - 1] = 1.0
        e[0] = 0.0


def tql2(double[::1] d, double[::1] e, double[:, ::1] V, bint want_vectors, int max_iter=60):
    """QL iteration with implicit shifts on the tridiagonal (d, e[1:]).

    ``d`` receives the unsorted eigenvalues; when ``want_vectors`` the
    rotations are accumulated into ``V``.  Returns 0, or the index of the
    eigenvalue that failed to converge.
    """
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, k, l, m
    cdef double f = 0.0, tst1 = 0.0, eps = 2.220446049250313e-16
    cdef double g, p, r, dl1, h, c, c2, c3, el1, s, s2
    cdef int it
    cdef int status = 0
    with nogil:
        for i in range(1, n):
            e[i - 1] = e[i]
        e[n - 1] = 0.0
        for l in range(n):
            tst1 = max(tst1, fabs(d[l]) + fabs(e[l]))
            m = l
            while m < n - 1:
                if fabs(e[m]) <= eps * tst1:
                    break
                m += 1
            if m > l:
                it = 0
                while True:
                    it += 1
                    if it > max_iter:
                        status = <int>(l + 1)
                        break
                    g = d[l]
                    p = (d[l + 1] - g) / (2.0 * e[l])
                    r = hypot(p, 1.0)
                    if p < 0:
                        r = -r
                    d[l] = e[l] / (p + r)
                    d[l + 1] = e[l] * (p + r)
                    dl1 = d[l + 1]
                    h = g - d[l]
                    for i in range(l + 2, n):
                        d[i] -= h
                    f = f + h
                    p = d[m]
                    c = 1.0
                    c2 = c
                    c3 = c
                    el1 = e[l + 1]
                    s = 0.0
                    s2 = 0.0
                    for i in range(m - 1, l - 1, -1):
                        c3 = c2
                        c2 = c
                        s2 = s
                        g = c * e[i]
                        h = c * p
                        r = hypot(p, e[i])
                        e[i + 1] = s * r
                        s = e[i] / r
                        c = p / r
                        p = c * d[i] - s * g
                        d[i + 1] = h + s * (c * g + s * d[i])
                        if want_vectors:
                            for k in range(n):
                                h = V[k, i + 1]
                                V[k, i + 1] = s * V[k, i] + c * h
                                V[k, i] = c * V[k, i] - s * h
                    p = -s * s2 * c3 * el1 * e[l] / dl1
                    e[l] = s * p
                    d[l] = c * p
                    if fabs(e[l]) <= eps * tst1:
                        break
                if status:
                    break
            d[l] = d[l] + f
            e[l] = 0.0
    return status
