import string

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from maskfree.combinat import PairPartition, enumerate_nc2
from maskfree.errors import ConfigurationError, DomainError, SizeLimitError
from maskfree.masks import (MaskMatrix, band_removed, bernoulli, block_zero, checkerboard, density, epsilon_sets,
                            full, kill_columns, make_mask, mask_partition_weight)


def orbit_of(pi):
    """Orbit id per position 1..2k from an explicit walk of r -> mate(r) + 1."""
    m = 2 * pi.k
    mate = {}
    for a, b in pi.pairs:
        mate[a], mate[b] = b, a
    ids = {}
    for start in range(1, m + 1):
        if start in ids:
            continue
        r, oid = start, len(set(ids.values()))
        while r not in ids:
            ids[r] = oid
            r = mate[r] % m + 1
    return ids


def einsum_weight(D, pi, rectangular):
    ids = orbit_of(pi)
    letters = string.ascii_letters
    operands, subs, sizes = [], [], {}
    for r, s in pi.pairs:
        if rectangular and r % 2 == 0:
            r, s = s, r
        subs.append(letters[ids[r]] + letters[ids[s]])
        operands.append(D.entries.astype(np.float64))
    for pos, oid in ids.items():
        sizes[oid] = (D.p if pos % 2 else D.n) if rectangular else D.n
    total = np.einsum(",".join(subs) + "->", *operands)
    return total / np.prod([float(v) for v in sizes.values()])


def test_generators_shapes_and_values():
    assert density(full(5, 7)) == 1
    b = band_removed(6, 1)
    assert b.is_symmetric() and b.entries[2, 3] == 0 and b.entries[2, 4] == 1
    assert density(checkerboard(4)) == 0.5
    kc = kill_columns(10, 0.3)
    assert kc.entries[:, :3].sum() == 0 and kc.entries[:, 3:].all()
    bz = block_zero(10, 20, 0.4, 0.5)
    assert density(bz) == pytest.approx(0.8)
    bern = bernoulli(50, 40, 0.3, seed=1)
    assert np.array_equal(bern.entries, bernoulli(50, 40, 0.3, seed=1).entries)
    assert 0.2 < density(bern) < 0.4


def test_mask_is_read_only():
    D = full(3)
    with pytest.raises(ValueError):
        D.entries[0, 0] = 0


@pytest.mark.parametrize("bad", [np.array([[0, 2]]), np.zeros((0, 3)), np.ones(3)])
def test_mask_validation(bad):
    with pytest.raises(ConfigurationError):
        MaskMatrix(bad)


def test_generator_errors():
    with pytest.raises(ConfigurationError):
        band_removed(5, 5)
    with pytest.raises(ConfigurationError):
        kill_columns(5, 1.5)
    with pytest.raises(ConfigurationError):
        make_mask("nope", 4, 4)
    with pytest.raises(ConfigurationError):
        make_mask("band_removed", 4, 5, w=1)
    with pytest.raises(ConfigurationError):
        make_mask("block_zero", 4, 4, alpha=0.5)
    with pytest.raises(SizeLimitError):
        full(5000)


def test_epsilon_sets():
    rep = epsilon_sets(kill_columns(10, 0.5), 0.1)
    assert rep.row_set_size == 0 and rep.col_set_size == 5
    with pytest.raises(ConfigurationError):
        epsilon_sets(full(3), 0)


def test_weight_k1_is_density():
    for D in (checkerboard(64), band_removed(20, 2), bernoulli(15, 15, 0.7, 3)):
        assert mask_partition_weight(D, PairPartition(((1, 2),))) == density(D)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_weight_matches_einsum_square(k):
    D = bernoulli(9, 9, 0.6, seed=k)
    for pi in enumerate_nc2(k):
        assert mask_partition_weight(D, pi) == pytest.approx(einsum_weight(D, pi, False), rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_weight_matches_einsum_rectangular(k):
    D = bernoulli(7, 11, 0.5, seed=10 + k)
    for pi in enumerate_nc2(k):
        assert mask_partition_weight(D, pi) == pytest.approx(einsum_weight(D, pi, True), rel=1e-12)


def test_weight_full_mask_is_one():
    for pi in enumerate_nc2(3):
        assert mask_partition_weight(full(6), pi) == 1
        assert mask_partition_weight(full(4, 6), pi) == 1


def test_weight_frozen_regression():
    assert mask_partition_weight(kill_columns(12, 0.5), PairPartition.parse("(1,2)(3,4)")) == 0.25
    assert mask_partition_weight(band_removed(8, 1), PairPartition.parse("(1,2)(3,4)")) == 0.43359375


def test_weight_errors():
    with pytest.raises(DomainError):
        mask_partition_weight(full(4), PairPartition.parse("(1,3)(2,4)"))
    with pytest.raises(SizeLimitError):
        mask_partition_weight(full(200), enumerate_nc2(4)[0])
    with pytest.raises(DomainError):
        mask_partition_weight(full(3, 4), PairPartition(((1, 2),)), rectangular=False)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(0, 2**31), st.integers(1, 3), st.data())
def test_weight_in_unit_interval_and_monotone(n, seed, k, data):
    D = bernoulli(n, n, 0.5, seed)
    pi = data.draw(st.sampled_from(enumerate_nc2(k)))
    w = mask_partition_weight(D, pi)
    assert 0 <= w <= 1
    # adding ones cannot lower the weight
    more = MaskMatrix(np.maximum(D.entries, bernoulli(n, n, 0.3, seed + 1).entries))
    assert mask_partition_weight(more, pi) >= w
