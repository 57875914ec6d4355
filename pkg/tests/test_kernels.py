import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maskfree import _kernels
from maskfree._kernels import _fallback
from maskfree.combinat import enumerate_nc2
from maskfree.masks import weight_layout
from maskfree.spectra import eigh_symmetric

try:
    from maskfree._kernels import _core
except ImportError:  # extension not built
    _core = None

BACKENDS = [pytest.param(_fallback, id="python")]
BACKENDS.append(pytest.param(_core, id="cython", marks=pytest.mark.skipif(_core is None, reason="not compiled")))


def _eig(mod, M, vectors=True):
    n = M.shape[0]
    V, d, e = np.ascontiguousarray(M, dtype=float).copy(), np.zeros(n), np.zeros(n)
    mod.tred2(V, d, e)
    assert mod.tql2(d, e, V, vectors) == 0
    order = np.argsort(d)
    return d[order], V[:, order]


@pytest.mark.parametrize("mod", BACKENDS)
@pytest.mark.parametrize("n", [1, 2, 5, 40])
def test_eigen_matches_lapack(mod, n):
    rng = np.random.default_rng(n)
    A = rng.standard_normal((n, n))
    M = (A + A.T) / 2
    d, V = _eig(mod, M)
    assert np.allclose(d, np.linalg.eigvalsh(M), atol=1e-11)
    assert np.allclose(M @ V, V * d, atol=1e-10)
    assert np.allclose(V.T @ V, np.eye(n), atol=1e-10)


@pytest.mark.parametrize("mod", BACKENDS)
def test_eigen_degenerate_spectrum(mod):
    # rank-deficient Gram matrix plus a repeated eigenvalue
    rng = np.random.default_rng(0)
    Y = rng.standard_normal((30, 10))
    M = Y @ Y.T
    d, _ = _eig(mod, M)
    assert np.allclose(d, np.linalg.eigvalsh(M), atol=1e-9)
    assert np.sum(np.abs(d) < 1e-8) == 20
    d, _ = _eig(mod, np.eye(6) * 3.0)
    assert np.allclose(d, 3.0)


def test_backends_agree_on_weight_counts():
    if _core is None:
        pytest.skip("not compiled")
    rng = np.random.default_rng(5)
    D = (rng.random((13, 17)) < 0.6).astype(np.uint8)
    rows = np.array([0, 1, 1], dtype=np.int64)
    cols = np.array([2, 2, 3], dtype=np.int64)
    sizes = np.array([13, 13, 17, 17], dtype=np.int64)
    assert _core.orbit_weight_count(D, rows, cols, sizes) == _fallback.orbit_weight_count(D, rows, cols, sizes)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_weight_count_single_edge(p, n, seed):
    D = (np.random.default_rng(seed).random((p, n)) < 0.5).astype(np.uint8)
    rows = np.array([0], dtype=np.int64)
    cols = np.array([1], dtype=np.int64)
    sizes = np.array([p, n], dtype=np.int64)
    assert _kernels.orbit_weight_count(D, rows, cols, sizes) == int(D.sum())
    assert _fallback.orbit_weight_count(D, rows, cols, sizes) == int(D.sum())


def test_eigh_symmetric_rejects_asymmetric():
    with pytest.raises(ValueError):
        eigh_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_pure_python_switch():
    env = dict(os.environ, MASKFREE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import maskfree; print(maskfree.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.skipif(_core is None, reason="not compiled")
@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 7), st.integers(1, 7), st.floats(0.2, 0.9), st.integers(0, 2**32 - 1))
def test_backends_agree_on_every_layout(k, p, n, q, seed):
    D = (np.random.default_rng(seed).random((p, n)) < q).astype(np.uint8)
    for pi in enumerate_nc2(k):
        layouts = [weight_layout(pi, p, n, True)]
        if p == n:
            layouts.append(weight_layout(pi, p, n, False))
        for rows, cols, sizes in layouts:
            assert _core.orbit_weight_count(D, rows, cols, sizes) == _fallback.orbit_weight_count(D, rows, cols, sizes)
