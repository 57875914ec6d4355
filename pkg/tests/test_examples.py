"""Worked examples for every public operation, one small check each."""
import math

import numpy as np
import pytest

from maskfree.combinat import (PairPartition, catalan, enumerate_nc2, enumerate_pair_partitions,
                               gamma_pi_orbit_count, gamma_pi_orbits, is_noncrossing)
from maskfree.ensembles import EnsembleSpec, SampledMatrix, masked_normalized, sample
from maskfree.freelimits import (MPLaw, elliptic_star_moment, free_family_mixed_moment, mp_cdf, mp_density,
                                 mp_moment_closed, mp_moment_nc, parse_word)
from maskfree.masks import (MaskMatrix, band_removed, block_zero, checkerboard, density, epsilon_sets, full,
                            kill_columns, mask_partition_weight)
from maskfree.moments import (LabelModel, estimate_covariance_moment, estimate_word_moment, freeness_test,
                              word_trace)
from maskfree.spectra import (SpectralSample, covariance_matrix, eigh_symmetric, eigenvalues_symmetric,
                              ks_distance, spectral_sample)

P = PairPartition.parse


# combinatorics

def test_pair_partition_examples():
    assert [str(p) for p in enumerate_pair_partitions(1)] == ["(1,2)"]
    assert len(enumerate_pair_partitions(5)) == 945
    assert [is_noncrossing(P(s)) for s in ("(1,2)(3,4)", "(1,3)(2,4)", "(1,4)(2,3)")] == [True, False, True]
    assert [str(p) for p in enumerate_nc2(2)] == ["(1,2)(3,4)", "(1,4)(2,3)"]
    assert len(enumerate_nc2(3)) == 5 and len(enumerate_nc2(6)) == 132
    assert [gamma_pi_orbit_count(P(s)) for s in ("(1,2)(3,4)", "(1,3)(2,4)", "(1,4)(2,3)")] == [3, 1, 3]
    assert gamma_pi_orbits(P("(1,2)(3,4)")) == [{1, 3}, {2}, {4}]
    assert sorted(map(sorted, gamma_pi_orbits(P("(1,4)(2,3)")))) == [[1], [2, 4], [3]]
    assert gamma_pi_orbits(P("(1,3)(2,4)")) == [{1, 2, 3, 4}]
    assert (catalan(0), catalan(3), catalan(5)) == (1, 5, 42)


# limits

def test_limit_examples():
    assert elliptic_star_moment([1, "*"], 0.7) == 1
    assert elliptic_star_moment([1, 1], 0.5) == 0.5
    assert elliptic_star_moment([1] * 6, 1.0) == 5
    assert elliptic_star_moment([1, "*", 1, "*"], 0.0) == 2
    zero = {1: 0.0, 2: 0.0}
    assert free_family_mixed_moment(parse_word("1,2,1*,2*"), zero) == 0
    assert free_family_mixed_moment(parse_word("1,1*,2,2*"), zero) == 1
    assert free_family_mixed_moment(parse_word("1,1*,1,1*"), {1: 0.0}) == 2
    assert all(mp_moment_nc(1, y) == 1 for y in (0.3, 1.0, 3.0))
    assert mp_moment_nc(2, 0.7) == pytest.approx(1.7)
    assert mp_moment_nc(3, 1.0) == 5
    assert (mp_moment_closed(1, 0.5), mp_moment_closed(2, 2.0), mp_moment_closed(3, 1.0)) == (1, 3, 5)


def test_mp_density_and_cdf_examples():
    law = MPLaw(1.0)
    assert mp_density(law.b, law) == 0
    assert mp_density(2.0, law) == pytest.approx(1 / (2 * math.pi))
    assert mp_density(MPLaw(0.5).a - 0.1, MPLaw(0.5)) == 0
    assert mp_cdf(-1.0, law) == 0
    assert mp_cdf(law.b, law) == pytest.approx(1, abs=1e-8)
    assert mp_cdf(0.0, MPLaw(2.0)) == pytest.approx(0.5)


def test_parse_word_examples():
    assert parse_word("1,1*").letters == ((1, False), (1, True))
    w = parse_word("1,2,1*,2*")
    assert len(w) == 4 and w.labels == (1, 2, 1, 2)


# masks

def test_mask_examples():
    assert epsilon_sets(checkerboard(16), 0.4).row_set_size == 0
    assert epsilon_sets(band_removed(64, 1), 0.1).row_set_size == 64
    bd = band_removed(6, 0)
    assert np.array_equal(bd.entries, 1 - np.eye(6, dtype=np.uint8)) and density(bd) == 30 / 36
    bz = block_zero(10, 10, 0.5, 0.5)
    assert bz.entries[:5, :5].sum() == 0 and density(bz) == 0.75
    assert mask_partition_weight(checkerboard(16), P("(1,2)")) == 0.5
    assert all(mask_partition_weight(full(7), pi) == 1 for k in (1, 2, 3) for pi in enumerate_nc2(k))


def test_mask_trends():
    for n in (32, 64, 128):
        assert epsilon_sets(band_removed(n, 1), 0.1).row_set_size >= n - 0.1 * n
    assert mask_partition_weight(checkerboard(64), P("(1,2)")) <= 0.6


# ensembles

def test_ensemble_examples():
    x = sample(EnsembleSpec("iid", 0.0, "gaussian", 200, 200), 11).values
    assert abs(x.mean()) < 0.015
    e = sample(EnsembleSpec("elliptic", 0.6, "gaussian", 300, 300), 12).values
    iu = np.triu_indices(300, 1)
    assert abs(np.mean(e[iu] * e.T[iu]) - 0.6) < 0.02
    assert abs(e.var() - 1) < 0.03
    s = sample(EnsembleSpec("elliptic", 1.0, "gaussian", 50, 50), 13).values
    assert np.array_equal(s, s.T)
    z = sample(EnsembleSpec("elliptic", 0.0, "gaussian", 300, 300), 14).values
    assert abs(np.mean(z[iu] * z.T[iu])) < 0.02


def test_masked_normalized_examples():
    X = sample(EnsembleSpec("iid", 0.0, "gaussian", 16, 16), 1)
    assert np.array_equal(masked_normalized(full(16), X).values, X.values / 4)
    assert not masked_normalized(MaskMatrix(np.zeros((16, 16))), X).values.any()
    A = masked_normalized(kill_columns(16, 0.5), X).values
    assert int((~A.any(axis=0)).sum()) == 8


# moments

def test_word_trace_examples():
    n = 4
    one = {1: SampledMatrix(np.eye(n))}
    assert word_trace(one, parse_word("1")) == 1
    assert word_trace({1: SampledMatrix(np.zeros((n, n)))}, parse_word("1,1*")) == 0
    assert word_trace({1: SampledMatrix(np.ones((n, n)) / 2)}, parse_word("1,1*")) == 1


def _model(n, mask, kind="iid", rho=0.0):
    return LabelModel(EnsembleSpec(kind, rho, "gaussian", n, n), mask)


def test_estimate_word_moment_examples():
    n = 500
    models = {1: _model(n, full(n))}
    est = estimate_word_moment(models, parse_word("1,1*"), n, 50, seed=101)
    assert est.gap(1.0) <= 3 * est.std_error + 0.01
    odd = estimate_word_moment(models, parse_word("1"), n, 50, seed=102)
    assert abs(odd.mean) <= 3 * odd.std_error
    kc = {1: _model(n, kill_columns(n, 0.5))}
    est = estimate_word_moment(kc, parse_word("1,1*"), n, 20, seed=103)
    assert est.gap(0.5) <= 3 * est.std_error
    el = {1: _model(n, band_removed(n, 1), "elliptic", 0.5)}
    est = estimate_word_moment(el, parse_word("1,1"), n, 20, seed=104)
    assert est.gap(0.5) <= 3 * est.std_error + 0.02


def test_odd_words_vanish():
    n = 200
    models = {1: _model(n, band_removed(n, 2), "elliptic", 0.4)}
    for text in ("1,1,1", "1,1*,1"):
        est = estimate_word_moment(models, parse_word(text), n, 20, seed=105)
        assert abs(est.mean) <= 3 * est.std_error


def test_std_error_halving_ratio():
    models = {1: _model(16, full(16))}
    w = parse_word("1,1*,1,1*")
    a = estimate_word_moment(models, w, 16, 200, seed=106)
    b = estimate_word_moment(models, w, 16, 400, seed=107)
    assert 0.6 <= b.std_error / a.std_error <= 0.85


def test_covariance_examples():
    spec = EnsembleSpec("rect_elliptic", 0.0, "gaussian", 400, 400)
    est = estimate_covariance_moment(full(400), spec, 1, 10, seed=108)
    assert est.gap(1.0) <= 3 * est.std_error
    est = estimate_covariance_moment(full(200, 400), spec.resized(200, 400), 2, 10, seed=109)
    assert est.gap(1.5) <= 3 * est.std_error + 0.02
    D = block_zero(100, 200, 0.4, 0.5)
    est = estimate_covariance_moment(D, spec.resized(100, 200), 1, 10, seed=110)
    assert density(D) == 0.8 and est.gap(0.8) <= 3 * est.std_error


def test_freeness_examples():
    n = 400
    models = {1: _model(n, full(n)), 2: _model(n, full(n))}
    rows = freeness_test(models, [parse_word(t) for t in ("1,2,1*,2*", "1,1*,2,2*", "1,1*")], n, 10, seed=111)
    assert [r.limit for r in rows] == [0, 1, 1]
    assert rows[0].gap <= 3 * rows[0].estimate.std_error + 0.02
    assert all(r.passed for r in rows)


# spectra

def test_covariance_matrix_examples():
    assert not covariance_matrix(full(3, 5), np.zeros((3, 5))).any()
    n = 8
    H = np.array([[1, 1], [1, -1]], dtype=float)
    had = np.kron(np.kron(H, H), H)
    assert np.allclose(covariance_matrix(full(4, n), had[:4]), np.eye(4))


def test_eigen_examples():
    assert np.allclose(eigenvalues_symmetric(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])
    assert np.allclose(eigenvalues_symmetric(np.array([[0.0, 1.0], [1.0, 0.0]])), [-1, 1])
    rng = np.random.default_rng(3)
    A = rng.standard_normal((50, 50))
    M = A + A.T
    lam, V = eigh_symmetric(M)
    assert lam.sum() == pytest.approx(np.trace(M), rel=1e-9, abs=1e-9)
    norm = np.linalg.norm(M, 2)
    assert np.max(np.linalg.norm(M @ V - V * lam, axis=0)) <= 1e-8 * norm


def test_spectral_sample_invariants():
    p, n = 120, 60
    D = kill_columns(n, 0.25, p=p)
    X = sample(EnsembleSpec("rect_elliptic", 0.0, "gaussian", p, n), 5)
    s = spectral_sample(D, X)
    W = covariance_matrix(D, X)
    assert s.eigenvalues.min() >= 0 and len(s.eigenvalues) == p
    assert s.eigenvalues.sum() == pytest.approx(np.trace(W), rel=1e-6)
    # rank(W) <= n - cn, so at least p - (n - cn) zeros
    assert np.sum(s.eigenvalues == 0) >= p - (n - 15)
    sq = spectral_sample(kill_columns(40, 0.25), sample(EnsembleSpec("rect_elliptic", 0.0, "gaussian", 40, 40), 6))
    assert np.sum(sq.eigenvalues == 0) >= 10


def test_ks_examples():
    law = MPLaw(1.0)
    spike = SpectralSample.from_eigenvalues(np.full(100, law.b + 1.0), 100)
    assert ks_distance(spike, law) == pytest.approx(1.0)
    s = spectral_sample(full(500), sample(EnsembleSpec("rect_elliptic", 0.0, "gaussian", 500, 500), 7))
    assert ks_distance(s, law) < 0.05
    shuffled = SpectralSample(np.random.default_rng(0).permutation(s.eigenvalues), s.p, s.n)
    assert ks_distance(shuffled, law) == ks_distance(s, law)
    y2 = spectral_sample(full(500, 250), sample(EnsembleSpec("rect_elliptic", 0.0, "gaussian", 500, 250), 8))
    assert abs(np.mean(y2.eigenvalues <= 1e-8) - 0.5) <= 0.05


def test_ks_trend_in_n():
    law = MPLaw(1.0)
    good = 0
    for seed in range(5):
        ks = [ks_distance(spectral_sample(full(n), sample(EnsembleSpec("rect_elliptic", 0.0, "gaussian", n, n),
                                                                 200 + seed)), law) for n in (100, 200, 400)]
        good += sum(a >= b for a, b in zip(ks, ks[1:]))
    # at least 2 of every 3 comparisons on average
    assert good >= 2 * 5 * 2 / 3
